//! Thresholding of the outlier variables and repair of the fractional
//! assignment around removed centers.
//!
//! Points with `z* > tau` become outliers. Their assignment rows are dropped.
//! Every outlier that was (fractionally) open hands its opening and its
//! assigned mass to the nearest inlier `u'`. Because `u'` is at least as close
//! to the outlier as any inlier `v` it served, `d(v,u') <= 2·d(v,u_out)`, so
//! all surviving support lies within twice the fair radius.

use crate::lp::{Assignment, FractionalSolution, FEASIBILITY_TOL};
use crate::metric::MetricContext;
use crate::{Error, Power, Result};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

/// Absolute slack allowed in the reassignment distance check.
pub const LEMMA_TOL: f64 = 1e-9;

/// Coverage deficits at or below this are treated as zero.
pub const DEFICIT_TOL: f64 = 1e-6;

/// One outlier center whose mass moved to an inlier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reassignment {
    pub from: usize,
    pub to: usize,
    /// Increase of `y'[to]` (after clipping at 1).
    pub opening_moved: f64,
    /// Σ_v x*_{v,from} over the inliers that were moved.
    pub moved_mass: f64,
    /// Mass lost to the `x' <= y'` clip.
    pub clipped_mass: f64,
    /// max_v d(v,to) / d(v,from) over the moved points; never above 2.
    pub max_stretch: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundedFractional {
    pub x_prime: Assignment,
    pub y_prime: Vec<f64>,
    pub outlier_indices: BTreeSet<usize>,
    pub reassignments: Vec<Reassignment>,
    /// `max(0, 1 - Σ_u x'_vu)` per point; 0 for outliers.
    pub coverage_deficit: Vec<f64>,
    /// Number of `d(v,u') <= 2·d(v,u_out)` checks performed.
    pub lemma_checks: usize,
    pub tau: f64,
}

#[derive(Serialize)]
struct Audit<'a> {
    tau: f64,
    outlier_indices: &'a BTreeSet<usize>,
    reassignments: &'a [Reassignment],
    coverage_deficit: BTreeMap<usize, f64>,
    total_deficit: f64,
    lemma_checks: usize,
}

impl RoundedFractional {
    pub fn is_outlier(&self, v: usize) -> bool {
        self.outlier_indices.contains(&v)
    }

    pub fn inliers(&self) -> Vec<usize> {
        (0..self.y_prime.len()).filter(|v| !self.is_outlier(*v)).collect()
    }

    pub fn total_deficit(&self) -> f64 {
        self.coverage_deficit.iter().sum()
    }

    pub fn has_deficit(&self) -> bool {
        self.coverage_deficit.iter().any(|&d| d > DEFICIT_TOL)
    }

    /// `Σ d(v,u)^p · x'_vu` over the repaired assignment.
    pub fn cost(&self, ctx: &MetricContext, p: Power) -> f64 {
        self.x_prime
            .iter()
            .map(|(&(v, u), &x)| p.apply(ctx.dist(v, u)) * x)
            .sum()
    }

    pub fn audit_json(&self) -> Result<String> {
        let audit = Audit {
            tau: self.tau,
            outlier_indices: &self.outlier_indices,
            reassignments: &self.reassignments,
            coverage_deficit: self
                .coverage_deficit
                .iter()
                .enumerate()
                .filter(|(_, &d)| d > 0.0)
                .map(|(v, &d)| (v, d))
                .collect(),
            total_deficit: self.total_deficit(),
            lemma_checks: self.lemma_checks,
        };
        Ok(serde_json::to_string_pretty(&audit)?)
    }

    pub fn write_audit(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.audit_json()?).map_err(|e| Error::io(path, e))
    }
}

/// Worst-case `LP' / LP*` after rounding with `tau = 0`: 1 + 2 for k-median,
/// 1 + 2² for k-means.
pub fn cost_bound_factor(p: Power) -> f64 {
    match p {
        Power::One => 3.0,
        Power::Two => 5.0,
    }
}

pub fn out_round(ctx: &MetricContext, sol: &FractionalSolution, tau: f64) -> Result<RoundedFractional> {
    let n = ctx.n();
    if sol.y.len() != n || sol.z.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "solution has |y| = {}, |z| = {}, metric has n = {n}",
            sol.y.len(),
            sol.z.len()
        )));
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::InvalidParameter(format!("tau = {tau} must be >= 0")));
    }
    for (&(v, u), &x) in &sol.x {
        if u >= n || v >= n {
            return Err(Error::SupportOutsideInstance { v, u });
        }
        if x > sol.y[u] + FEASIBILITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "input assigns x({v},{u}) = {x} above y({u}) = {}",
                sol.y[u]
            )));
        }
    }

    let outlier: Vec<bool> = sol.z.iter().map(|&z| z > tau).collect();
    let outlier_indices: BTreeSet<usize> = (0..n).filter(|&v| outlier[v]).collect();
    let inliers: Vec<usize> = (0..n).filter(|&v| !outlier[v]).collect();
    if inliers.is_empty() {
        return Err(Error::AllOutliers);
    }

    let mut x_prime: Assignment = sol
        .x
        .iter()
        .filter(|(&(v, _), _)| !outlier[v])
        .map(|(&k, &x)| (k, x))
        .collect();
    let mut y_prime = sol.y.clone();

    // Inlier mass held by each outlier column, in ascending v.
    let mut column_mass: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    for (&(v, u), &x) in &sol.x {
        if outlier[u] && !outlier[v] && x != 0.0 {
            column_mass.entry(u).or_default().push((v, x));
        }
    }

    let mut reassignments = Vec::new();
    let mut lemma_checks = 0;
    for &u_out in outlier_indices.iter().filter(|&&u| sol.y[u] != 0.0) {
        y_prime[u_out] = 0.0;
        let (target, _) = ctx
            .nearest(u_out, inliers.iter().copied())
            .expect("at least one inlier");
        let before = y_prime[target];
        y_prime[target] = (before + sol.y[u_out]).min(1.0);

        let mut moved_mass = 0.0;
        let mut clipped_mass = 0.0;
        let mut max_stretch: f64 = 0.0;
        for &(v, x) in column_mass.get(&u_out).map(Vec::as_slice).unwrap_or(&[]) {
            let d_old = ctx.dist(v, u_out);
            let d_new = ctx.dist(v, target);
            lemma_checks += 1;
            if d_new > 2.0 * d_old + LEMMA_TOL {
                return Err(Error::Invariant(format!(
                    "reassigning {v} from {u_out} to {target}: d = {d_new} > 2 · {d_old}"
                )));
            }
            if d_old > 0.0 {
                max_stretch = max_stretch.max(d_new / d_old);
            }
            x_prime.remove(&(v, u_out));
            let slot = x_prime.entry((v, target)).or_insert(0.0);
            let raised = *slot + x;
            *slot = raised.min(y_prime[target]);
            clipped_mass += raised - *slot;
            moved_mass += x;
        }
        reassignments.push(Reassignment {
            from: u_out,
            to: target,
            opening_moved: y_prime[target] - before,
            moved_mass,
            clipped_mass,
            max_stretch,
        });
    }

    // Columns of closed outliers can still carry solver dust.
    x_prime.retain(|&(_, u), _| !outlier[u]);
    for &u in &outlier_indices {
        y_prime[u] = 0.0;
    }

    let mut coverage = vec![0.0; n];
    for (&(v, u), &x) in &x_prime {
        coverage[v] += x;
        let limit = 2.0 * ctx.fair_radius(v);
        if ctx.dist(v, u) > limit + LEMMA_TOL {
            return Err(Error::Invariant(format!(
                "repaired support ({v},{u}) at distance {} exceeds 2·r(v) = {limit}",
                ctx.dist(v, u)
            )));
        }
        if x > y_prime[u] + FEASIBILITY_TOL {
            return Err(Error::Invariant(format!(
                "x'({v},{u}) = {x} exceeds y'({u}) = {}",
                y_prime[u]
            )));
        }
    }
    let coverage_deficit = (0..n)
        .map(|v| if outlier[v] { 0.0 } else { (1.0 - coverage[v]).max(0.0) })
        .collect();

    Ok(RoundedFractional {
        x_prime,
        y_prime,
        outlier_indices,
        reassignments,
        coverage_deficit,
        lemma_checks,
        tau,
    })
}
