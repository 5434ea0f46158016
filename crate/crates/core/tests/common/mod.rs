//! Random feasible fractional solutions for stress-testing the rounding.

use fairclust::lp::FractionalSolution;
use fairclust::metric::MetricContext;
use rand::Rng;

/// `y = 1 - z`, and each point spreads `1 - z_v` over its fair ball with
/// whatever is left landing on itself, so coverage and `x <= y` hold. About
/// a third of the points get a fractional `z`, which leaves them with open
/// mass that the rounding has to move.
pub fn random_fractional<R: Rng>(rng: &mut R, ctx: &MetricContext) -> FractionalSolution {
    let n = ctx.n();
    let z: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(0.35) { rng.gen_range(0.05..0.95) } else { 0.0 })
        .collect();
    let y: Vec<f64> = z.iter().map(|z| 1.0 - z).collect();
    let mut x = std::collections::BTreeMap::new();
    for (v, &zv) in z.iter().enumerate() {
        let mut left = 1.0 - zv;
        for u in ctx.fair_ball(v, 1.0) {
            if u == v || left <= 0.0 {
                continue;
            }
            let share = (left * rng.gen_range(0.0..0.6)).min(y[u]);
            if share > 0.0 {
                x.insert((v, u), share);
                left -= share;
            }
        }
        if left > 0.0 {
            x.insert((v, v), left);
        }
    }
    FractionalSolution { x, y, z, objective: 0.0 }
}
