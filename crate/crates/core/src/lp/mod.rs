//! The outlier-aware fair-clustering LP and its solver boundary.

mod model;
mod solve;

pub use model::{
    build_lp, build_outlier_free_lp, check_feasibility, lp_cost, Assignment, Constraint,
    ConstraintKind, FractionalSolution, LpInstance, Sense, VarRef, Violation, FEASIBILITY_TOL,
};
pub use solve::{
    solve_lp, solve_with, BackendOutcome, InteriorPointBackend, LpBackend, RawSolution, SimplexBackend,
    SolveReport, SolveStatus,
};

/// `|a - b| <= 1e-6 · max(|a|, |b|) + 1e-9`.
pub fn objectives_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= FEASIBILITY_TOL * a.abs().max(b.abs()) + 1e-9
}
