//! Exhaustive optimum of fair clustering with outliers on tiny instances.

use crate::metric::MetricContext;
use crate::{Error, Exec, Power, Result};
use std::cmp::Ordering;

pub const MAX_ORACLE_POINTS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// `f64::INFINITY` when no `(Z, S)` satisfies the fairness constraint.
    pub opt_cost: f64,
    pub opt_centers: Vec<usize>,
    pub opt_outliers: Vec<usize>,
}

impl OracleResult {
    pub fn is_feasible(&self) -> bool {
        self.opt_cost.is_finite()
    }
}

/// All `size`-subsets of `items`, each ascending, in lexicographic order.
fn subsets_of_size(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    fn rec(items: &[usize], size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        let need = size - cur.len();
        for i in start..=items.len().saturating_sub(need) {
            if i >= items.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, size, 0, &mut Vec::with_capacity(size), &mut out);
    out
}

type Candidate = (f64, Vec<usize>, Vec<usize>);

/// Lower cost wins; ties go to the lexicographically smaller `(Z, S)`.
fn better(a: &Candidate, b: &Candidate) -> bool {
    match a.0.total_cmp(&b.0) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => (&a.1, &a.2) < (&b.1, &b.2),
    }
}

pub fn brute_force_opt(ctx: &MetricContext, p: Power, k: usize, m: usize, alpha: f64) -> Result<OracleResult> {
    brute_force_opt_with(ctx, p, k, m, alpha, Exec::default())
}

/// Enumerates every outlier set `Z` with `|Z| <= m` and every center set
/// `S ⊆ X \ Z` with `1 <= |S| <= k`, keeping those where each non-outlier is
/// within `alpha · r(v)` of `S`, and returns the cheapest.
pub fn brute_force_opt_with(
    ctx: &MetricContext,
    p: Power,
    k: usize,
    m: usize,
    alpha: f64,
    exec: Exec,
) -> Result<OracleResult> {
    let n = ctx.n();
    if n > MAX_ORACLE_POINTS {
        return Err(Error::InstanceTooLarge { n, max: MAX_ORACLE_POINTS });
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be >= 1")));
    }
    let all: Vec<usize> = (0..n).collect();
    let outlier_sets: Vec<Vec<usize>> = (0..=m.min(n - 1))
        .flat_map(|size| subsets_of_size(&all, size))
        .collect();

    let per_z: Vec<Option<Candidate>> = exec.map_slice(&outlier_sets, |z| {
        let kept: Vec<usize> = all.iter().copied().filter(|v| !z.contains(v)).collect();
        let mut best: Option<Candidate> = None;
        for size in 1..=k.min(kept.len()) {
            for s in subsets_of_size(&kept, size) {
                let mut cost = 0.0;
                let mut feasible = true;
                for &v in &kept {
                    let d = s.iter().map(|&u| ctx.dist(v, u)).fold(f64::INFINITY, f64::min);
                    if d > alpha * ctx.fair_radius(v) {
                        feasible = false;
                        break;
                    }
                    cost += p.apply(d);
                }
                if !feasible {
                    continue;
                }
                let cand = (cost, z.clone(), s);
                if best.as_ref().is_none_or(|b| better(&cand, b)) {
                    best = Some(cand);
                }
            }
        }
        best
    });

    let best = per_z
        .into_iter()
        .flatten()
        .reduce(|a, b| if better(&b, &a) { b } else { a });
    Ok(match best {
        Some((opt_cost, opt_outliers, opt_centers)) => OracleResult {
            opt_cost,
            opt_centers,
            opt_outliers,
        },
        None => OracleResult {
            opt_cost: f64::INFINITY,
            opt_centers: vec![],
            opt_outliers: vec![],
        },
    })
}
