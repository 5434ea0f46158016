//! Rounding the repaired fractional solution to at most `k` centers.
//!
//! Inliers are scanned by increasing fair radius. A point joins the filter
//! set `F` unless its ball of radius `R(v) = 2·r(v)` meets the ball of an
//! earlier representative. The balls of `F` are disjoint and each holds at
//! least one unit of `y'` mass, so `|F| <= Σ y' <= k`. Each representative
//! opens the nearest fractionally open inlier inside its ball (or itself).
//! Every inlier ends up within `R(v) + 2·R(f) <= 6·r(v)` of a center.
//!
//! The balls are wide, so `F` is often much smaller than `k`. The remaining
//! budget is filled greedily from the support of `y'`, each step adding the
//! center with the largest cost reduction. Extra centers only shorten
//! distances, so the fairness bound and `|S| <= k` are unaffected, and an
//! integral `y'` with `k` open centers is returned unchanged.

use crate::metric::MetricContext;
use crate::outround::RoundedFractional;
use crate::{Error, Exec, Power, Result};
use std::io::Write;
use std::path::Path;

/// Fairness stretch guaranteed by the filtering procedure.
pub const FILTER_STRETCH: f64 = 6.0;

/// Fair-radius stretch tolerated end to end.
pub const FAIRNESS_ENVELOPE: f64 = 16.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    /// Ascending, deduplicated.
    pub centers: Vec<usize>,
    /// Nearest center of every inlier; `None` for outliers.
    pub assignment: Vec<Option<usize>>,
    pub cost: f64,
    pub max_fairness_ratio: f64,
    /// Representatives in selection order.
    pub filter_set: Vec<usize>,
    /// Centers opened by the representatives, before the budget fill.
    pub filter_centers: Vec<usize>,
}

impl ClusteringResult {
    pub fn inliers(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(v, a)| a.map(|_| v))
    }

    /// `index,assigned_center,distance,r,ratio` per point; outliers leave the
    /// last columns except `r` empty.
    pub fn write_points_csv(&self, ctx: &MetricContext, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::from("index,assigned_center,distance,r,ratio\n");
        for (v, a) in self.assignment.iter().enumerate() {
            let r = ctx.fair_radius(v);
            match a {
                Some(c) => {
                    let d = ctx.dist(v, *c);
                    out.push_str(&format!("{v},{c},{d},{r},{}\n", fairness_ratio(d, r)));
                }
                None => out.push_str(&format!("{v},,,{r},\n")),
            }
        }
        std::fs::File::create(path)
            .and_then(|mut f| f.write_all(out.as_bytes()))
            .map_err(|e| Error::io(path, e))
    }
}

/// `d / r`, with `0/0 = 0` and `d/0 = ∞`.
pub fn fairness_ratio(d: f64, r: f64) -> f64 {
    if r > 0.0 {
        d / r
    } else if d == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn check_centers(ctx: &MetricContext, centers: &[usize]) -> Result<()> {
    if centers.is_empty() {
        return Err(Error::InvalidParameter("center set is empty".into()));
    }
    if let Some(&c) = centers.iter().find(|&&c| c >= ctx.n()) {
        return Err(Error::InvalidParameter(format!("center {c} out of range")));
    }
    Ok(())
}

/// `Σ_{v ∈ inliers} d(v, S)^p`.
pub fn compute_cost(ctx: &MetricContext, centers: &[usize], inliers: &[usize], p: Power) -> Result<f64> {
    check_centers(ctx, centers)?;
    Ok(inliers
        .iter()
        .map(|&v| p.apply(ctx.nearest(v, centers.iter().copied()).unwrap().1))
        .sum())
}

/// `max_{v ∈ inliers} d(v, S) / r(v)`; see [`fairness_ratio`] for `r = 0`.
pub fn max_fairness_ratio(ctx: &MetricContext, centers: &[usize], inliers: &[usize]) -> Result<f64> {
    check_centers(ctx, centers)?;
    Ok(inliers
        .iter()
        .map(|&v| {
            let d = ctx.nearest(v, centers.iter().copied()).unwrap().1;
            fairness_ratio(d, ctx.fair_radius(v))
        })
        .fold(0.0, f64::max))
}

pub fn fair_round(ctx: &MetricContext, rf: &RoundedFractional, p: Power, exec: Exec) -> Result<ClusteringResult> {
    let n = ctx.n();
    let k = ctx.k();
    if rf.y_prime.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "|y'| = {}, metric has n = {n}",
            rf.y_prime.len()
        )));
    }
    let inliers = rf.inliers();
    if inliers.is_empty() {
        return Err(Error::AllOutliers);
    }
    let opening: f64 = rf.y_prime.iter().sum();
    if opening > k as f64 + 1e-6 {
        return Err(Error::Invariant(format!("Σ y' = {opening} exceeds k = {k}")));
    }

    let reach = |v: usize| 2.0 * ctx.fair_radius(v);
    let mut order = inliers.clone();
    order.sort_by(|&a, &b| ctx.fair_radius(a).total_cmp(&ctx.fair_radius(b)).then(a.cmp(&b)));

    let mut filter_set: Vec<usize> = Vec::new();
    for &v in &order {
        if filter_set.iter().all(|&f| ctx.dist(v, f) > reach(v) + reach(f)) {
            filter_set.push(v);
        }
    }
    if filter_set.len() > k {
        return Err(Error::TooManyRepresentatives {
            found: filter_set.len(),
            k,
            deficit: rf.total_deficit(),
        });
    }

    let mut centers: Vec<usize> = filter_set
        .iter()
        .map(|&f| {
            let open = inliers
                .iter()
                .copied()
                .filter(|&u| rf.y_prime[u] > 0.0 && ctx.dist(f, u) <= reach(f));
            ctx.nearest(f, open).map_or(f, |(u, _)| u)
        })
        .collect();
    centers.sort_unstable();
    centers.dedup();
    let filter_centers = centers.clone();
    fill_budget(ctx, rf, &inliers, &mut centers, k, p, exec);

    let assignment: Vec<Option<usize>> = exec.map_range(n, |v| {
        if rf.is_outlier(v) {
            None
        } else {
            ctx.nearest(v, centers.iter().copied()).map(|(c, _)| c)
        }
    });
    let cost = inliers
        .iter()
        .map(|&v| p.apply(ctx.dist(v, assignment[v].unwrap())))
        .sum();
    let max_ratio = inliers
        .iter()
        .map(|&v| fairness_ratio(ctx.dist(v, assignment[v].unwrap()), ctx.fair_radius(v)))
        .fold(0.0, f64::max);

    for (i, &f) in filter_set.iter().enumerate() {
        for &g in &filter_set[i + 1..] {
            if ctx.dist(f, g) <= reach(f) + reach(g) {
                return Err(Error::Invariant(format!("filter balls of {f} and {g} overlap")));
            }
        }
    }
    let bound = if rf.has_deficit() { FAIRNESS_ENVELOPE } else { FILTER_STRETCH };
    if max_ratio > bound + 1e-9 {
        return Err(Error::Invariant(format!(
            "fairness ratio {max_ratio} exceeds {bound}"
        )));
    }

    Ok(ClusteringResult {
        centers,
        assignment,
        cost,
        max_fairness_ratio: max_ratio,
        filter_set,
        filter_centers,
    })
}

/// Greedy fill up to `k` centers from `supp(y')`; stops early when no
/// candidate lowers the cost. Ties go to the smallest index.
fn fill_budget(
    ctx: &MetricContext,
    rf: &RoundedFractional,
    inliers: &[usize],
    centers: &mut Vec<usize>,
    k: usize,
    p: Power,
    exec: Exec,
) {
    let mut best: Vec<f64> = inliers
        .iter()
        .map(|&v| ctx.nearest(v, centers.iter().copied()).unwrap().1)
        .collect();
    let mut candidates: Vec<usize> = inliers
        .iter()
        .copied()
        .filter(|&u| rf.y_prime[u] > 0.0 && !centers.contains(&u))
        .collect();
    while centers.len() < k && !candidates.is_empty() {
        let gains = exec.map_slice(&candidates, |&u| {
            inliers
                .iter()
                .zip(&best)
                .map(|(&v, &b)| (p.apply(b) - p.apply(ctx.dist(v, u))).max(0.0))
                .sum::<f64>()
        });
        let (pos, &gain) = gains
            .iter()
            .enumerate()
            .fold((0, &gains[0]), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if gain <= 0.0 {
            break;
        }
        let u = candidates.remove(pos);
        for (b, &v) in best.iter_mut().zip(inliers) {
            *b = b.min(ctx.dist(v, u));
        }
        centers.push(u);
    }
    centers.sort_unstable();
}
