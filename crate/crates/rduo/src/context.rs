//! Shared solve context: tolerances, limits, caps, and the solver backend
//! every higher-level operation routes through.

use crate::solver::{
    BundledSolver, Limits, LinearModel, SolveOutcome, SolverBackend, SolverError, ToleranceConfig,
};
use std::sync::Arc;

#[derive(Clone)]
pub struct Ctx {
    pub tol: ToleranceConfig,
    pub limits: Limits,
    /// Zero tolerance for penalty and violation values.
    pub zero_tol: f64,
    /// Uncertainty-enumeration cap (scenario oracles refuse above this).
    pub enum_cap: usize,
    /// Maximum multiplier doublings in the search for an optimal multiplier.
    pub doubling_cap: u32,
    /// Cap on enumerated discrete recourse points in the inner loop.
    pub discrete_cap: usize,
    backend: Arc<dyn SolverBackend + Send + Sync>,
}

impl std::fmt::Debug for Ctx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ctx")
            .field("tol", &self.tol)
            .field("limits", &self.limits)
            .field("zero_tol", &self.zero_tol)
            .field("enum_cap", &self.enum_cap)
            .finish_non_exhaustive()
    }
}

impl Default for Ctx {
    fn default() -> Self {
        Ctx {
            tol: ToleranceConfig::default(),
            limits: Limits::none(),
            zero_tol: 1e-6,
            enum_cap: 20,
            doubling_cap: 60,
            discrete_cap: 10_000,
            backend: Arc::new(BundledSolver),
        }
    }
}

impl Ctx {
    pub fn with_backend(backend: Arc<dyn SolverBackend + Send + Sync>) -> Self {
        Ctx {
            backend,
            ..Ctx::default()
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn solve(&self, model: &LinearModel) -> Result<SolveOutcome, SolverError> {
        self.backend.solve(model, &self.tol, &self.limits)
    }

    /// Feasibility comparisons at the model level.
    pub fn feas_tol(&self) -> f64 {
        self.tol.feasibility
    }
}
