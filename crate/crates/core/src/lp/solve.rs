use super::model::{check_feasibility, lp_cost, FractionalSolution, LpInstance, Sense, FEASIBILITY_TOL};
use super::objectives_match;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Error,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// NaN unless optimal.
    pub objective: f64,
    /// Present iff `status == Optimal`.
    pub solution: Option<FractionalSolution>,
    pub solve_time: f64,
    pub solver_name: String,
    pub message: Option<String>,
}

impl SolveReport {
    fn failed(status: SolveStatus, solver_name: &str, solve_time: f64, message: String) -> Self {
        SolveReport {
            status,
            objective: f64::NAN,
            solution: None,
            solve_time,
            solver_name: solver_name.to_string(),
            message: Some(message),
        }
    }
}

/// Dense primal values (indexed by variable id) and the backend's own
/// objective value.
#[derive(Debug, Clone)]
pub struct RawSolution {
    pub values: Vec<f64>,
    pub objective: f64,
}

pub enum BackendOutcome {
    Solved(RawSolution),
    Infeasible,
    Failed(String),
}

/// A pluggable LP solver. Implementations only need to minimise the
/// objective subject to [`LpInstance::constraints`] and `[0,1]` bounds;
/// [`solve_with`] takes care of cleanup and verification.
pub trait LpBackend: Send + Sync {
    fn name(&self) -> &'static str;

    fn solve_raw(&self, inst: &LpInstance) -> BackendOutcome;

    /// Values within this distance of 0 or 1 are snapped onto the bound.
    fn snap_tolerance(&self) -> f64 {
        0.0
    }
}

/// Solves with the default backend ([`SimplexBackend`]).
pub fn solve_lp(inst: &LpInstance) -> SolveReport {
    solve_with(&SimplexBackend, inst)
}

/// Runs `backend`, snaps and clamps the values into `[0,1]`, then checks the
/// result against every constraint and against the backend's objective. A
/// solution that fails either check is reported as `Error`.
pub fn solve_with(backend: &dyn LpBackend, inst: &LpInstance) -> SolveReport {
    let name = backend.name();
    let start = Instant::now();
    let outcome = backend.solve_raw(inst);
    let elapsed = start.elapsed().as_secs_f64();
    let raw = match outcome {
        BackendOutcome::Solved(raw) => raw,
        BackendOutcome::Infeasible => {
            return SolveReport::failed(SolveStatus::Infeasible, name, elapsed, "LP is infeasible".into())
        }
        BackendOutcome::Failed(msg) => return SolveReport::failed(SolveStatus::Error, name, elapsed, msg),
    };
    if raw.values.len() != inst.num_vars() {
        return SolveReport::failed(
            SolveStatus::Error,
            name,
            elapsed,
            format!("backend returned {} values for {} variables", raw.values.len(), inst.num_vars()),
        );
    }
    let snap = backend.snap_tolerance();
    let values: Vec<f64> = raw
        .values
        .iter()
        .map(|&x| {
            if x <= snap {
                0.0
            } else if x >= 1.0 - snap {
                1.0
            } else {
                x
            }
        })
        .collect();
    let sol = inst.solution_from_dense(&values);

    let recomputed = match lp_cost(inst, &sol.x) {
        Ok(c) => c,
        Err(e) => return SolveReport::failed(SolveStatus::Error, name, elapsed, e.to_string()),
    };
    if !objectives_match(recomputed, raw.objective) {
        return SolveReport::failed(
            SolveStatus::Error,
            name,
            elapsed,
            format!("objective {} disagrees with recomputed cost {recomputed}", raw.objective),
        );
    }
    match check_feasibility(inst, &sol, FEASIBILITY_TOL) {
        Ok(v) if v.is_empty() => {}
        Ok(v) => {
            return SolveReport::failed(
                SolveStatus::Error,
                name,
                elapsed,
                format!("{} constraint(s) violated, first: {:?}", v.len(), v[0]),
            )
        }
        Err(e) => return SolveReport::failed(SolveStatus::Error, name, elapsed, e.to_string()),
    }
    SolveReport {
        status: SolveStatus::Optimal,
        objective: recomputed,
        solution: Some(sol),
        solve_time: elapsed,
        solver_name: name.to_string(),
        message: None,
    }
}

/// Revised dual simplex (`microlp`). Returns vertex solutions, so most
/// variables are exactly 0 or 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct SimplexBackend;

impl LpBackend for SimplexBackend {
    fn name(&self) -> &'static str {
        "simplex"
    }

    fn snap_tolerance(&self) -> f64 {
        1e-9
    }

    fn solve_raw(&self, inst: &LpInstance) -> BackendOutcome {
        use microlp::{ComparisonOp, OptimizationDirection, Problem};

        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<_> = inst
            .objective_coefficients()
            .into_iter()
            .map(|c| problem.add_var(c, (0.0, 1.0)))
            .collect();
        for row in inst.constraints() {
            let expr: Vec<_> = row.terms.iter().map(|&(id, c)| (vars[id], c)).collect();
            let op = match row.sense {
                Sense::Le => ComparisonOp::Le,
                Sense::Ge => ComparisonOp::Ge,
            };
            problem.add_constraint(expr.as_slice(), op, row.rhs);
        }
        match problem.solve() {
            Ok(outcome) => match outcome.solution() {
                Some(sol) => BackendOutcome::Solved(RawSolution {
                    values: vars.iter().map(|&v| sol.var_value(v)).collect(),
                    objective: sol.objective(),
                }),
                None => BackendOutcome::Failed("solve interrupted before a solution was found".into()),
            },
            Err(microlp::Error::Infeasible) => BackendOutcome::Infeasible,
            Err(e) => BackendOutcome::Failed(e.to_string()),
        }
    }
}

/// Primal-dual interior point (`clarabel`). Converges to the analytic centre
/// of the optimal face, so values are rarely exactly 0; use it to cross-check
/// objectives rather than to feed thresholding.
#[derive(Debug, Clone, Copy)]
pub struct InteriorPointBackend {
    pub tolerance: f64,
}

impl Default for InteriorPointBackend {
    fn default() -> Self {
        InteriorPointBackend { tolerance: 1e-9 }
    }
}

impl LpBackend for InteriorPointBackend {
    fn name(&self) -> &'static str {
        "interior-point"
    }

    fn solve_raw(&self, inst: &LpInstance) -> BackendOutcome {
        use clarabel::algebra::CscMatrix;
        use clarabel::solver::{DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};

        let nv = inst.num_vars();
        // Every row as a·x <= b; constraints first, then x <= 1, then -x <= 0.
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nv];
        let mut b = Vec::new();
        for (r, row) in inst.constraints().iter().enumerate() {
            let sign = match row.sense {
                Sense::Le => 1.0,
                Sense::Ge => -1.0,
            };
            for &(id, c) in &row.terms {
                cols[id].push((r, sign * c));
            }
            b.push(sign * row.rhs);
        }
        let base = b.len();
        for (id, col) in cols.iter_mut().enumerate() {
            col.push((base + id, 1.0));
            col.push((base + nv + id, -1.0));
        }
        b.extend(std::iter::repeat_n(1.0, nv));
        b.extend(std::iter::repeat_n(0.0, nv));
        let nrows = b.len();

        let mut colptr = Vec::with_capacity(nv + 1);
        let mut rowval = Vec::new();
        let mut nzval = Vec::new();
        for col in &mut cols {
            colptr.push(rowval.len());
            col.sort_by_key(|&(r, _)| r);
            for &(r, c) in col.iter() {
                rowval.push(r);
                nzval.push(c);
            }
        }
        colptr.push(rowval.len());
        let a = CscMatrix::new(nrows, nv, colptr, rowval, nzval);
        let p = CscMatrix::<f64>::zeros((nv, nv));
        let q = inst.objective_coefficients();
        let cones = [SupportedConeT::NonnegativeConeT(nrows)];
        let settings = match DefaultSettingsBuilder::default()
            .verbose(false)
            .tol_gap_abs(self.tolerance)
            .tol_gap_rel(self.tolerance)
            .tol_feas(self.tolerance)
            .max_iter(500)
            .build()
        {
            Ok(s) => s,
            Err(e) => return BackendOutcome::Failed(e.to_string()),
        };
        let mut solver = match DefaultSolver::new(&p, &q, &a, &b, &cones, settings) {
            Ok(s) => s,
            Err(e) => return BackendOutcome::Failed(e.to_string()),
        };
        solver.solve();
        match solver.solution.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => {
                let values: Vec<f64> = solver.solution.x.iter().map(|&x| x.clamp(0.0, 1.0)).collect();
                // Report the objective of the clamped point; the raw one can
                // differ by the solver's tolerance.
                let objective = q.iter().zip(&values).map(|(c, x)| c * x).sum();
                if !super::objectives_match(objective, solver.solution.obj_val) {
                    return BackendOutcome::Failed(format!(
                        "interior point objective {} far from clamped {objective}",
                        solver.solution.obj_val
                    ));
                }
                BackendOutcome::Solved(RawSolution { values, objective })
            }
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => BackendOutcome::Infeasible,
            other => BackendOutcome::Failed(format!("interior point stopped with {other:?}")),
        }
    }
}
