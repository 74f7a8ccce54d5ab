//! Self-contained LP/MILP solving capability.
//!
//! A two-phase primal simplex (Bland's anti-cycling rule) handles pure LPs;
//! branch-and-bound over binary/integer variables handles MILPs. Indicator
//! links are enforced by branching: when a link's binary variable is fixed at
//! its activating value at a node, the implied equality is appended to that
//! node's LP. No big-M constants are introduced by the engine itself.
//!
//! Every claimed certificate (optimal basis, Farkas multipliers, unbounded
//! ray) is re-verified numerically before an outcome is returned.

mod branch;
mod canonical;
mod check;
mod simplex;
#[cfg(test)]
mod tests;

pub use canonical::{model_from_canonical_text, model_to_canonical_text};
pub use check::{farkas_or_incumbent_check, CheckFailure};

use crate::ext::ExtReal;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Integrality marker of a decision variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrality {
    Continuous,
    /// Integer restricted to {0, 1}; bounds must lie inside [0, 1].
    Binary,
    Integer,
}

/// One decision variable: bounds (`f64::NEG_INFINITY` / `f64::INFINITY`
/// encode absent bounds) and integrality.
#[derive(Debug, Clone, Copy)]
pub struct Variable {
    pub lower: f64,
    pub upper: f64,
    pub integrality: Integrality,
}

impl Variable {
    pub fn continuous(lower: f64, upper: f64) -> Self {
        Variable {
            lower,
            upper,
            integrality: Integrality::Continuous,
        }
    }

    pub fn nonneg() -> Self {
        Variable::continuous(0.0, f64::INFINITY)
    }

    pub fn free() -> Self {
        Variable::continuous(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn binary() -> Self {
        Variable {
            lower: 0.0,
            upper: 1.0,
            integrality: Integrality::Binary,
        }
    }

    pub fn is_integral_kind(&self) -> bool {
        !matches!(self.integrality, Integrality::Continuous)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

impl RowSense {
    pub fn symbol(self) -> &'static str {
        match self {
            RowSense::Le => "<=",
            RowSense::Eq => "=",
            RowSense::Ge => ">=",
        }
    }
}

/// A linear constraint `coeffs . x  (sense)  rhs`.
#[derive(Debug, Clone)]
pub struct LinRow {
    pub coeffs: Vec<f64>,
    pub sense: RowSense,
    pub rhs: f64,
}

/// Conditional equality `binary == activating value  =>  row . x == rhs`.
#[derive(Debug, Clone)]
pub struct IndicatorLink {
    pub binary: usize,
    pub activate_on: bool,
    pub row: Vec<f64>,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjSense {
    Min,
    Max,
}

#[derive(Debug, Clone)]
pub struct Objective {
    pub sense: ObjSense,
    pub coeffs: Vec<f64>,
    pub offset: f64,
}

/// A linear model: variables, one linear objective, linear constraints and
/// optional indicator links. Hosts every LP/MILP built by the other modules.
#[derive(Debug, Clone)]
pub struct LinearModel {
    pub variables: Vec<Variable>,
    pub objective: Objective,
    pub constraints: Vec<LinRow>,
    pub indicator_links: Vec<IndicatorLink>,
}

impl LinearModel {
    pub fn minimize(n: usize) -> Self {
        LinearModel {
            variables: vec![Variable::nonneg(); n],
            objective: Objective {
                sense: ObjSense::Min,
                coeffs: vec![0.0; n],
                offset: 0.0,
            },
            constraints: Vec::new(),
            indicator_links: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn is_pure_lp(&self) -> bool {
        self.indicator_links.is_empty()
            && self.variables.iter().all(|v| !v.is_integral_kind())
    }

    /// Structural well-formedness: consistent dimensions, finite data, binary
    /// bounds inside [0, 1], indicator links referencing binary variables.
    pub fn validate(&self) -> Result<(), SolverError> {
        let n = self.num_vars();
        if self.objective.coeffs.len() != n {
            return Err(SolverError::Malformed(format!(
                "objective has {} coefficients for {} variables",
                self.objective.coeffs.len(),
                n
            )));
        }
        if !self.objective.offset.is_finite()
            || self.objective.coeffs.iter().any(|c| !c.is_finite())
        {
            return Err(SolverError::Malformed("non-finite objective".into()));
        }
        for (j, v) in self.variables.iter().enumerate() {
            if v.lower.is_nan() || v.upper.is_nan() || v.lower == f64::INFINITY
                || v.upper == f64::NEG_INFINITY
            {
                return Err(SolverError::Malformed(format!("bad bounds on variable {j}")));
            }
            if v.lower > v.upper {
                return Err(SolverError::Malformed(format!(
                    "variable {j} has lower bound {} above upper bound {}",
                    v.lower, v.upper
                )));
            }
            if v.integrality == Integrality::Binary && (v.lower < -0.0 || v.upper > 1.0) {
                return Err(SolverError::Malformed(format!(
                    "binary variable {j} has bounds [{}, {}]",
                    v.lower, v.upper
                )));
            }
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(SolverError::Malformed(format!(
                    "row {i} has {} coefficients for {} variables",
                    row.coeffs.len(),
                    n
                )));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(SolverError::Malformed(format!("non-finite data in row {i}")));
            }
        }
        for (k, link) in self.indicator_links.iter().enumerate() {
            if link.binary >= n
                || self.variables[link.binary].integrality != Integrality::Binary
            {
                return Err(SolverError::Malformed(format!(
                    "indicator link {k} does not reference a binary variable"
                )));
            }
            if link.row.len() != n || !link.rhs.is_finite()
                || link.row.iter().any(|c| !c.is_finite())
            {
                return Err(SolverError::Malformed(format!("bad row in indicator link {k}")));
            }
        }
        Ok(())
    }
}

/// Small helper for assembling models from sparse coefficient lists.
#[derive(Debug, Clone)]
pub struct ModelBuilder {
    model: LinearModel,
}

impl ModelBuilder {
    pub fn new(sense: ObjSense) -> Self {
        let mut model = LinearModel::minimize(0);
        model.objective.sense = sense;
        ModelBuilder { model }
    }

    pub fn add_var(&mut self, var: Variable, obj_coeff: f64) -> usize {
        self.model.variables.push(var);
        self.model.objective.coeffs.push(obj_coeff);
        for row in &mut self.model.constraints {
            row.coeffs.push(0.0);
        }
        for link in &mut self.model.indicator_links {
            link.row.push(0.0);
        }
        self.model.variables.len() - 1
    }

    pub fn set_offset(&mut self, offset: f64) {
        self.model.objective.offset = offset;
    }

    pub fn add_offset(&mut self, delta: f64) {
        self.model.objective.offset += delta;
    }

    pub fn add_obj(&mut self, var: usize, coeff: f64) {
        self.model.objective.coeffs[var] += coeff;
    }

    pub fn add_row(&mut self, terms: &[(usize, f64)], sense: RowSense, rhs: f64) -> usize {
        let mut coeffs = vec![0.0; self.model.num_vars()];
        for &(j, c) in terms {
            coeffs[j] += c;
        }
        self.model.constraints.push(LinRow { coeffs, sense, rhs });
        self.model.constraints.len() - 1
    }

    pub fn add_dense_row(&mut self, coeffs: Vec<f64>, sense: RowSense, rhs: f64) -> usize {
        assert_eq!(coeffs.len(), self.model.num_vars());
        self.model.constraints.push(LinRow { coeffs, sense, rhs });
        self.model.constraints.len() - 1
    }

    pub fn add_indicator_link(
        &mut self,
        binary: usize,
        activate_on: bool,
        terms: &[(usize, f64)],
        rhs: f64,
    ) {
        let mut row = vec![0.0; self.model.num_vars()];
        for &(j, c) in terms {
            row[j] += c;
        }
        self.model.indicator_links.push(IndicatorLink {
            binary,
            activate_on,
            row,
            rhs,
        });
    }

    pub fn num_vars(&self) -> usize {
        self.model.num_vars()
    }

    pub fn finish(self) -> LinearModel {
        self.model
    }
}

/// Numeric tolerances. The defaults are the ones used throughout the crate.
#[derive(Debug, Clone, Copy)]
pub struct ToleranceConfig {
    /// Row/bound feasibility tolerance.
    pub feasibility: f64,
    /// Integrality tolerance.
    pub integrality: f64,
    /// Relative MILP gap at which branch-and-bound declares optimality.
    pub relative_gap: f64,
    /// Pivot magnitude below which a column entry is treated as zero.
    pub pivot: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            feasibility: 1e-6,
            integrality: 1e-6,
            relative_gap: 1e-9,
            pivot: 1e-9,
        }
    }
}

/// Work limits for a single solve.
#[derive(Debug, Clone, Copy, Default)]
pub struct Limits {
    pub max_nodes: Option<u64>,
    pub deadline: Option<Instant>,
}

impl Limits {
    pub fn none() -> Self {
        Limits::default()
    }

    pub fn with_deadline(deadline: Option<Instant>) -> Self {
        Limits {
            max_nodes: None,
            deadline,
        }
    }

    pub fn exceeded_time(&self) -> bool {
        self.deadline.map_or(false, |d| Instant::now() >= d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Node/time limit hit; `primal` holds the best incumbent if one exists
    /// and `bound` the best proven bound. Never claims optimality.
    LimitReached,
    /// Numerical breakdown; never a silent wrong answer.
    NumericalFailure,
}

/// Result of one LP/MILP solve.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Objective value in the model's own sense (`+inf` for an infeasible
    /// minimization, `-inf` for an unbounded one; mirrored for maximization).
    pub value: ExtReal,
    /// Present iff status is Optimal, or LimitReached with an incumbent.
    pub primal: Option<Vec<f64>>,
    /// Row duals, present only for pure-LP optimal solves. Sign convention
    /// (for the model's own sense): a minimization has duals >= 0 on `>=`
    /// rows and <= 0 on `<=` rows; a maximization flips both signs.
    pub duals: Option<Vec<f64>>,
    /// Farkas row multipliers certifying infeasibility (pure LP only).
    pub farkas: Option<Vec<f64>>,
    /// Unbounded ray in the structural variables.
    pub ray: Option<Vec<f64>>,
    /// Best proven objective bound (equals `value` on optimal solves).
    pub bound: ExtReal,
    pub node_count: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("malformed model: {0}")]
    Malformed(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Anything able to answer LP/MILP queries. The bundled engine implements
/// this; external backends may be plugged in through the same interface,
/// taking the model in the canonical text serialization if they live out of
/// process. Bit-exactness is not required of external backends, only
/// tolerance compliance.
pub trait SolverBackend {
    fn solve(
        &self,
        model: &LinearModel,
        tolerances: &ToleranceConfig,
        limits: &Limits,
    ) -> Result<SolveOutcome, SolverError>;
}

/// The bundled deterministic simplex + branch-and-bound engine.
///
/// Instances are stateless and reentrant; distinct instances may run in
/// parallel with no shared mutable state.
#[derive(Debug, Default, Clone, Copy)]
pub struct BundledSolver;

impl SolverBackend for BundledSolver {
    fn solve(
        &self,
        model: &LinearModel,
        tolerances: &ToleranceConfig,
        limits: &Limits,
    ) -> Result<SolveOutcome, SolverError> {
        if model.is_pure_lp() {
            solve_lp(model, tolerances)
        } else {
            solve_milp(model, tolerances, limits)
        }
    }
}

/// Solve a pure LP (no integrality, no indicator links).
pub fn solve_lp(
    model: &LinearModel,
    tolerances: &ToleranceConfig,
) -> Result<SolveOutcome, SolverError> {
    model.validate()?;
    if !model.is_pure_lp() {
        return Err(SolverError::Precondition(
            "solve_lp requires a model without integrality flags or indicator links".into(),
        ));
    }
    let started = Instant::now();
    let mut outcome = simplex::solve_lp_internal(model, tolerances)?;
    outcome.elapsed = started.elapsed();
    debug_verify(model, &outcome, tolerances);
    Ok(outcome)
}

/// Solve a mixed-integer linear model by branch-and-bound.
pub fn solve_milp(
    model: &LinearModel,
    tolerances: &ToleranceConfig,
    limits: &Limits,
) -> Result<SolveOutcome, SolverError> {
    model.validate()?;
    let started = Instant::now();
    let mut outcome = branch::solve_milp_internal(model, tolerances, limits)?;
    outcome.elapsed = started.elapsed();
    debug_verify(model, &outcome, tolerances);
    Ok(outcome)
}

#[cfg(debug_assertions)]
fn debug_verify(model: &LinearModel, outcome: &SolveOutcome, tolerances: &ToleranceConfig) {
    if let Err(failure) = farkas_or_incumbent_check(model, outcome, tolerances) {
        panic!("solver produced an unverifiable outcome: {failure}");
    }
}

#[cfg(not(debug_assertions))]
fn debug_verify(_: &LinearModel, _: &SolveOutcome, _: &ToleranceConfig) {}
