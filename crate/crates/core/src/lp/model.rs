use crate::metric::MetricContext;
use crate::{Error, Power, Result};
use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::path::Path;

/// Default tolerance for constraint and objective checks.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Sparse `(v, u) -> value` map: point `v` served by center `u`.
pub type Assignment = BTreeMap<(usize, usize), f64>;

/// A variable of the LP, named by role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarRef {
    /// Fractional assignment of point `v` to center `u`.
    X(usize, usize),
    /// Fractional opening of `u`.
    Y(usize),
    /// Fractional outlier indicator of `v`.
    Z(usize),
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarRef::X(v, u) => write!(f, "x_{v}_{u}"),
            VarRef::Y(u) => write!(f, "y_{u}"),
            VarRef::Z(v) => write!(f, "z_{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintKind {
    /// Σ_u y_u <= k
    CenterBudget,
    /// Σ_v z_v <= m
    OutlierBudget,
    /// Σ_u x_vu >= 1 - z_v
    Coverage { v: usize },
    /// x_vu <= y_u
    OpenCenter { v: usize, u: usize },
    /// y_u <= 1 - z_u
    InlierCenter { u: usize },
    /// x_vu may only be nonzero within alpha · r(v)
    Support { v: usize, u: usize },
    /// 0 <= var <= 1
    Bound(VarRef),
}

impl ConstraintKind {
    /// Short LP-format row name.
    pub fn name(&self) -> String {
        match *self {
            ConstraintKind::CenterBudget => "centers".into(),
            ConstraintKind::OutlierBudget => "outliers".into(),
            ConstraintKind::Coverage { v } => format!("cover_{v}"),
            ConstraintKind::OpenCenter { v, u } => format!("open_{v}_{u}"),
            ConstraintKind::InlierCenter { u } => format!("inlier_{u}"),
            ConstraintKind::Support { v, u } => format!("support_{v}_{u}"),
            ConstraintKind::Bound(var) => format!("bound_{var}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
}

/// One linear row `Σ coeff · var (<= | >=) rhs`, over variable ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ConstraintKind,
    /// Signed slack; negative means violated.
    pub slack: f64,
}

/// The sparsified LP. Assignment variables exist only for pairs with
/// `d(v,u) <= alpha · r(v)`; other pairs are fixed to zero by omission.
///
/// Variable ids: `x` pairs first (sorted by `(v, u)`), then `y_0..y_{n-1}`,
/// then `z_0..z_{n-1}` when the instance models outliers.
#[derive(Debug, Clone)]
pub struct LpInstance {
    p: Power,
    k: usize,
    m: usize,
    alpha: f64,
    n: usize,
    with_outliers: bool,
    x_pairs: Vec<(usize, usize)>,
    x_costs: Vec<f64>,
    x_index: HashMap<(usize, usize), usize>,
    row_start: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    /// Nonzero assignment values.
    pub x: Assignment,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub objective: f64,
}

fn check_params(ctx: &MetricContext, k: usize, m: usize, alpha: f64) -> Result<()> {
    let n = ctx.n();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("k = {k} must be in 1..={n}")));
    }
    if m >= n {
        return Err(Error::InvalidParameter(format!("m = {m} must be below n = {n}")));
    }
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be >= 1")));
    }
    Ok(())
}

/// Builds the LP with outlier variables: centers <= k, outliers <= m,
/// coverage, open-center, inlier-center rows and [0,1] bounds.
pub fn build_lp(ctx: &MetricContext, p: Power, k: usize, m: usize, alpha: f64) -> Result<LpInstance> {
    check_params(ctx, k, m, alpha)?;
    Ok(LpInstance::assemble(ctx, p, k, m, alpha, true))
}

/// The fair-clustering LP without any outlier variables (every point must be
/// covered). Used to cross-check the `m = 0` reduction.
pub fn build_outlier_free_lp(ctx: &MetricContext, p: Power, k: usize, alpha: f64) -> Result<LpInstance> {
    check_params(ctx, k, 0, alpha)?;
    Ok(LpInstance::assemble(ctx, p, k, 0, alpha, false))
}

impl LpInstance {
    fn assemble(ctx: &MetricContext, p: Power, k: usize, m: usize, alpha: f64, with_outliers: bool) -> Self {
        let n = ctx.n();
        let mut x_pairs = Vec::new();
        let mut x_costs = Vec::new();
        let mut row_start = Vec::with_capacity(n + 1);
        for v in 0..n {
            row_start.push(x_pairs.len());
            for u in ctx.fair_ball(v, alpha) {
                x_pairs.push((v, u));
                x_costs.push(p.apply(ctx.dist(v, u)));
            }
        }
        row_start.push(x_pairs.len());
        let x_index = x_pairs.iter().enumerate().map(|(i, &pair)| (pair, i)).collect();
        LpInstance {
            p,
            k,
            m,
            alpha,
            n,
            with_outliers,
            x_pairs,
            x_costs,
            x_index,
            row_start,
        }
    }

    pub fn power(&self) -> Power {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn models_outliers(&self) -> bool {
        self.with_outliers
    }

    pub fn num_x(&self) -> usize {
        self.x_pairs.len()
    }

    pub fn num_vars(&self) -> usize {
        self.x_pairs.len() + if self.with_outliers { 2 * self.n } else { self.n }
    }

    pub fn x_pairs(&self) -> &[(usize, usize)] {
        &self.x_pairs
    }

    /// Pairs `(v, u)` available to point `v`.
    pub fn pairs_of(&self, v: usize) -> &[(usize, usize)] {
        &self.x_pairs[self.row_start[v]..self.row_start[v + 1]]
    }

    pub fn x_id(&self, v: usize, u: usize) -> Option<usize> {
        self.x_index.get(&(v, u)).copied()
    }

    pub fn y_id(&self, u: usize) -> usize {
        self.x_pairs.len() + u
    }

    pub fn z_id(&self, v: usize) -> Option<usize> {
        self.with_outliers.then(|| self.x_pairs.len() + self.n + v)
    }

    pub fn var_ref(&self, id: usize) -> VarRef {
        let nx = self.x_pairs.len();
        if id < nx {
            let (v, u) = self.x_pairs[id];
            VarRef::X(v, u)
        } else if id < nx + self.n {
            VarRef::Y(id - nx)
        } else {
            VarRef::Z(id - nx - self.n)
        }
    }

    /// Objective coefficient of every variable, indexed by id.
    pub fn objective_coefficients(&self) -> Vec<f64> {
        let mut c = self.x_costs.clone();
        c.resize(self.num_vars(), 0.0);
        c
    }

    /// `d(v,u)^p` for an instance pair.
    pub fn cost_of(&self, v: usize, u: usize) -> Option<f64> {
        self.x_id(v, u).map(|i| self.x_costs[i])
    }

    /// All rows except the [0,1] variable bounds.
    pub fn constraints(&self) -> Vec<Constraint> {
        let n = self.n;
        let mut rows = Vec::with_capacity(2 + 2 * n + self.x_pairs.len());
        rows.push(Constraint {
            kind: ConstraintKind::CenterBudget,
            terms: (0..n).map(|u| (self.y_id(u), 1.0)).collect(),
            sense: Sense::Le,
            rhs: self.k as f64,
        });
        if self.with_outliers {
            rows.push(Constraint {
                kind: ConstraintKind::OutlierBudget,
                terms: (0..n).filter_map(|v| self.z_id(v)).map(|id| (id, 1.0)).collect(),
                sense: Sense::Le,
                rhs: self.m as f64,
            });
        }
        for v in 0..n {
            let mut terms: Vec<(usize, f64)> = (self.row_start[v]..self.row_start[v + 1])
                .map(|id| (id, 1.0))
                .collect();
            terms.extend(self.z_id(v).map(|id| (id, 1.0)));
            rows.push(Constraint {
                kind: ConstraintKind::Coverage { v },
                terms,
                sense: Sense::Ge,
                rhs: 1.0,
            });
        }
        for (id, &(v, u)) in self.x_pairs.iter().enumerate() {
            rows.push(Constraint {
                kind: ConstraintKind::OpenCenter { v, u },
                terms: vec![(id, 1.0), (self.y_id(u), -1.0)],
                sense: Sense::Le,
                rhs: 0.0,
            });
        }
        if self.with_outliers {
            for u in 0..n {
                rows.push(Constraint {
                    kind: ConstraintKind::InlierCenter { u },
                    terms: vec![(self.y_id(u), 1.0), (self.z_id(u).unwrap(), 1.0)],
                    sense: Sense::Le,
                    rhs: 1.0,
                });
            }
        }
        rows
    }

    /// Dense variable vector of a solution; errors on support outside the instance.
    pub fn dense_values(&self, sol: &FractionalSolution) -> Result<Vec<f64>> {
        if sol.y.len() != self.n || sol.z.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "solution has |y| = {}, |z| = {}, instance has n = {}",
                sol.y.len(),
                sol.z.len(),
                self.n
            )));
        }
        let mut vals = vec![0.0; self.num_vars()];
        for (&(v, u), &val) in &sol.x {
            let id = self.x_id(v, u).ok_or(Error::SupportOutsideInstance { v, u })?;
            vals[id] = val;
        }
        for u in 0..self.n {
            vals[self.y_id(u)] = sol.y[u];
            if let Some(id) = self.z_id(u) {
                vals[id] = sol.z[u];
            }
        }
        Ok(vals)
    }

    /// Converts a dense variable vector back to a [`FractionalSolution`].
    pub fn solution_from_dense(&self, vals: &[f64]) -> FractionalSolution {
        let x: Assignment = self
            .x_pairs
            .iter()
            .zip(vals)
            .filter(|(_, &val)| val != 0.0)
            .map(|(&pair, &val)| (pair, val))
            .collect();
        let y = (0..self.n).map(|u| vals[self.y_id(u)]).collect();
        let z = (0..self.n)
            .map(|v| self.z_id(v).map_or(0.0, |id| vals[id]))
            .collect();
        let objective = self.x_costs.iter().zip(vals).map(|(c, x)| c * x).sum();
        FractionalSolution { x, y, z, objective }
    }

    /// Writes the instance in CPLEX LP text format with variable names
    /// `x_v_u`, `y_u`, `z_v`.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "\\ fair clustering with outliers: n={} k={} m={} p={} alpha={}",
            self.n, self.k, self.m, self.p, self.alpha
        );
        out.push_str("Minimize\n obj:");
        let obj: Vec<(usize, f64)> = self
            .x_costs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(i, &c)| (i, c))
            .collect();
        if obj.is_empty() {
            out.push_str(" 0 y_0");
        }
        self.write_terms(&mut out, &obj);
        out.push_str("\nSubject To\n");
        for row in self.constraints() {
            let _ = write!(out, " {}:", row.kind.name());
            self.write_terms(&mut out, &row.terms);
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
            };
            let _ = writeln!(out, " {op} {}", row.rhs);
        }
        out.push_str("Bounds\n");
        for id in 0..self.num_vars() {
            let _ = writeln!(out, " 0 <= {} <= 1", self.var_ref(id));
        }
        out.push_str("End\n");
        out
    }

    fn write_terms(&self, out: &mut String, terms: &[(usize, f64)]) {
        for (i, &(id, c)) in terms.iter().enumerate() {
            // LP-format readers cap line length
            if i > 0 && i % 8 == 0 {
                out.push_str("\n   ");
            }
            let sign = if c < 0.0 { '-' } else { '+' };
            let mag = c.abs();
            if i == 0 && sign == '+' {
                out.push(' ');
            } else {
                let _ = write!(out, " {sign} ");
            }
            if mag != 1.0 {
                let _ = write!(out, "{mag} ");
            }
            let _ = write!(out, "{}", self.var_ref(id));
        }
    }

    pub fn write_lp_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_lp_format()).map_err(|e| Error::io(path, e))
    }
}

/// Every row or bound violated by more than `tol`. Empty iff feasible.
pub fn check_feasibility(inst: &LpInstance, sol: &FractionalSolution, tol: f64) -> Result<Vec<Violation>> {
    if sol.y.len() != inst.n || sol.z.len() != inst.n {
        return Err(Error::DimensionMismatch(format!(
            "solution has |y| = {}, |z| = {}, instance has n = {}",
            sol.y.len(),
            sol.z.len(),
            inst.n
        )));
    }
    let mut violations = Vec::new();
    let mut vals = vec![0.0; inst.num_vars()];
    for (&(v, u), &val) in &sol.x {
        match inst.x_id(v, u) {
            Some(id) => vals[id] = val,
            None if val.abs() > tol => violations.push(Violation {
                kind: ConstraintKind::Support { v, u },
                slack: -val.abs(),
            }),
            None => {}
        }
    }
    for u in 0..inst.n {
        vals[inst.y_id(u)] = sol.y[u];
        if let Some(id) = inst.z_id(u) {
            vals[id] = sol.z[u];
        }
    }
    // Without outlier variables every z must be zero (Σ z <= 0).
    if !inst.with_outliers {
        let total: f64 = sol.z.iter().map(|z| z.abs()).sum();
        if total > tol {
            violations.push(Violation {
                kind: ConstraintKind::OutlierBudget,
                slack: -total,
            });
        }
    }
    for row in inst.constraints() {
        let lhs: f64 = row.terms.iter().map(|&(id, c)| c * vals[id]).sum();
        let slack = match row.sense {
            Sense::Le => row.rhs - lhs,
            Sense::Ge => lhs - row.rhs,
        };
        if slack < -tol {
            violations.push(Violation { kind: row.kind, slack });
        }
    }
    for (id, &val) in vals.iter().enumerate() {
        let slack = val.min(1.0 - val);
        if slack < -tol {
            violations.push(Violation {
                kind: ConstraintKind::Bound(inst.var_ref(id)),
                slack,
            });
        }
    }
    Ok(violations)
}

/// `Σ d(v,u)^p · x_vu` over the instance's pairs.
pub fn lp_cost(inst: &LpInstance, x: &Assignment) -> Result<f64> {
    let mut total = 0.0;
    for (&(v, u), &val) in x {
        let c = inst.cost_of(v, u).ok_or(Error::SupportOutsideInstance { v, u })?;
        total += c * val;
    }
    Ok(total)
}
