//! Data model for two-stage robust problems with binary uncertainty, in two
//! flavors: the general form, whose right-hand side (and costs) are affine
//! in the scenario vector, and the indicator form, where scenario entries
//! switch selected constraint rows into equalities.
//!
//! Also hosts scenario enumeration, second-stage evaluation, the brute-force
//! scenario-expansion oracle, and the big-M conversion from indicator to
//! general form.

mod convert;
mod enumerate;
mod evaluate;
mod validate;

pub use convert::indicator_to_general;
pub use enumerate::{enumerate_uncertainty, EnumerationError};
pub use evaluate::{
    scenario_expansion_solve, second_stage_value, Evaluation, ScenarioOracleResult,
};
pub use validate::{validate, Finding, FindingKind};

use crate::matrix::Matrix;
use crate::solver::{LinRow, RowSense, Variable};
use thiserror::Error;

/// An affine function `xi -> constant + slope * xi` from scenario space into
/// some value space. Hosts the cost vectors and the right-hand side.
#[derive(Debug, Clone)]
pub struct AffineMap {
    pub constant: Vec<f64>,
    pub slope: Matrix,
}

impl AffineMap {
    pub fn constant_only(values: Vec<f64>, scenario_dim: usize) -> Self {
        let slope = Matrix::zeros(values.len(), scenario_dim);
        AffineMap {
            constant: values,
            slope,
        }
    }

    pub fn new(constant: Vec<f64>, slope: Matrix) -> Self {
        assert_eq!(constant.len(), slope.rows(), "affine map shape mismatch");
        AffineMap { constant, slope }
    }

    pub fn output_dim(&self) -> usize {
        self.constant.len()
    }

    pub fn scenario_dim(&self) -> usize {
        self.slope.cols()
    }

    pub fn eval(&self, scenario: &[f64]) -> Vec<f64> {
        let mut out = self.slope.mul_vec(scenario);
        for (o, c) in out.iter_mut().zip(&self.constant) {
            *o += c;
        }
        out
    }

    pub fn is_constant(&self) -> bool {
        self.slope.is_zero()
    }
}

/// Variables (bounds, integrality) plus linear constraints: the MILP
/// representation of a feasible set.
#[derive(Debug, Clone)]
pub struct MixedIntegerSet {
    pub variables: Vec<Variable>,
    pub constraints: Vec<LinRow>,
}

impl MixedIntegerSet {
    pub fn continuous_nonneg(dim: usize) -> Self {
        MixedIntegerSet {
            variables: vec![Variable::nonneg(); dim],
            constraints: Vec::new(),
        }
    }

    pub fn binary(dim: usize) -> Self {
        MixedIntegerSet {
            variables: vec![Variable::binary(); dim],
            constraints: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn add_row(&mut self, terms: &[(usize, f64)], sense: RowSense, rhs: f64) {
        let mut coeffs = vec![0.0; self.dim()];
        for &(j, c) in terms {
            coeffs[j] += c;
        }
        self.constraints.push(LinRow { coeffs, sense, rhs });
    }

    pub fn all_binary(&self) -> bool {
        self.variables
            .iter()
            .all(|v| v.integrality == crate::solver::Integrality::Binary)
    }

    pub fn has_integer_vars(&self) -> bool {
        self.variables.iter().any(|v| v.is_integral_kind())
    }

    pub fn is_point_feasible(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        for (j, v) in self.variables.iter().enumerate() {
            if x[j] < v.lower - tol || x[j] > v.upper + tol {
                return false;
            }
            if v.is_integral_kind() && (x[j] - x[j].round()).abs() > tol {
                return false;
            }
        }
        self.constraints.iter().all(|row| {
            let lhs: f64 = row.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            match row.sense {
                RowSense::Le => lhs <= row.rhs + tol,
                RowSense::Ge => lhs >= row.rhs - tol,
                RowSense::Eq => (lhs - row.rhs).abs() <= tol,
            }
        })
    }
}

/// Which closed-form multiplier-bound recipe an instance is known to admit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiplierHint {
    Box,
    ObjectiveMonotone,
    StaticRobust,
}

/// Caller-asserted structural knowledge riding along with an instance.
#[derive(Debug, Clone, Default)]
pub struct ProblemMeta {
    /// Second stage feasible for every first-stage decision and scenario.
    pub relatively_complete_recourse: bool,
    /// If a first-stage decision is feasible for every scenario in the set,
    /// it stays feasible for every binary scenario vector (the premise of
    /// the closed-form multiplier). Asserted, probed, never proven.
    pub all_binary_scenarios_feasible: bool,
    /// Preferred closed-form bound recipe, when one is known to apply.
    pub multiplier_hint: Option<MultiplierHint>,
    /// Componentwise box known to contain an optimal recourse response for
    /// every scenario (used by the box bound recipe).
    pub recourse_value_box: Option<(Vec<f64>, Vec<f64>)>,
    pub family: Option<String>,
    pub label: Option<String>,
}

/// Index partition of the recourse variables into continuous and discrete
/// blocks, required by the nested worst-case scheme.
#[derive(Debug, Clone)]
pub struct RecourseSplit {
    pub continuous: Vec<usize>,
    pub discrete: Vec<usize>,
}

/// The general form: choose x in X, an adversary picks a binary scenario,
/// then recourse y in Y must satisfy `T x + W y >= h(xi)` at cost
/// `c(xi).x + d(xi).y`.
#[derive(Debug, Clone)]
pub struct GeneralProblem {
    pub first_stage: MixedIntegerSet,
    pub recourse: MixedIntegerSet,
    pub uncertainty: MixedIntegerSet,
    pub first_cost: AffineMap,
    pub recourse_cost: AffineMap,
    pub rhs: AffineMap,
    pub tech: Matrix,
    pub recourse_mat: Matrix,
    pub recourse_split: Option<RecourseSplit>,
    pub meta: ProblemMeta,
}

impl GeneralProblem {
    pub fn n1(&self) -> usize {
        self.first_stage.dim()
    }
    pub fn n2(&self) -> usize {
        self.recourse.dim()
    }
    pub fn np(&self) -> usize {
        self.uncertainty.dim()
    }
    pub fn rows(&self) -> usize {
        self.tech.rows()
    }
}

/// The indicator form: plain constraints `g(x, y) = T x + W y - h0 >= 0`
/// always hold; scenario entry j at value 1 forces rows `switch_on_one[j]`
/// of g to zero (and at value 0 the rows `switch_on_zero[j]`).
#[derive(Debug, Clone)]
pub struct IndicatorProblem {
    pub first_stage: MixedIntegerSet,
    pub recourse: MixedIntegerSet,
    pub uncertainty: MixedIntegerSet,
    pub first_cost: AffineMap,
    pub recourse_cost: AffineMap,
    pub tech: Matrix,
    pub recourse_mat: Matrix,
    pub rhs_const: Vec<f64>,
    pub switch_on_one: Vec<Vec<usize>>,
    pub switch_on_zero: Vec<Vec<usize>>,
    /// Valid per-row big-M values for the conversion to general form, where
    /// the builder knows them (rows not in any family may carry 0).
    pub suggested_big_m: Vec<f64>,
    pub meta: ProblemMeta,
}

impl IndicatorProblem {
    pub fn n1(&self) -> usize {
        self.first_stage.dim()
    }
    pub fn n2(&self) -> usize {
        self.recourse.dim()
    }
    pub fn np(&self) -> usize {
        self.uncertainty.dim()
    }
    pub fn rows(&self) -> usize {
        self.tech.rows()
    }

    /// Rows switched by scenario entry `j` when it takes `value`.
    pub fn switched_rows(&self, j: usize, value: bool) -> &[usize] {
        if value {
            &self.switch_on_one[j]
        } else {
            &self.switch_on_zero[j]
        }
    }

    /// g(x, y) = T x + W y - h0.
    pub fn g_values(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let tx = self.tech.mul_vec(x);
        let wy = self.recourse_mat.mul_vec(y);
        tx.iter()
            .zip(&wy)
            .zip(&self.rhs_const)
            .map(|((a, b), h)| a + b - h)
            .collect()
    }
}

/// Either problem flavor, for interfaces that accept both.
#[derive(Debug, Clone)]
pub enum Problem {
    General(GeneralProblem),
    Indicator(IndicatorProblem),
}

impl Problem {
    pub fn meta(&self) -> &ProblemMeta {
        match self {
            Problem::General(p) => &p.meta,
            Problem::Indicator(p) => &p.meta,
        }
    }

    pub fn meta_mut(&mut self) -> &mut ProblemMeta {
        match self {
            Problem::General(p) => &mut p.meta,
            Problem::Indicator(p) => &mut p.meta,
        }
    }

    pub fn uncertainty(&self) -> &MixedIntegerSet {
        match self {
            Problem::General(p) => &p.uncertainty,
            Problem::Indicator(p) => &p.uncertainty,
        }
    }

    pub fn first_stage(&self) -> &MixedIntegerSet {
        match self {
            Problem::General(p) => &p.first_stage,
            Problem::Indicator(p) => &p.first_stage,
        }
    }

    pub fn recourse(&self) -> &MixedIntegerSet {
        match self {
            Problem::General(p) => &p.recourse,
            Problem::Indicator(p) => &p.recourse,
        }
    }

    pub fn dims(&self) -> (usize, usize, usize, usize) {
        match self {
            Problem::General(p) => (p.n1(), p.n2(), p.np(), p.rows()),
            Problem::Indicator(p) => (p.n1(), p.n2(), p.np(), p.rows()),
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("enumeration unavailable: {0}")]
    Enumeration(#[from] EnumerationError),
    #[error("invalid data: {0}")]
    Invalid(String),
    #[error(transparent)]
    Solver(#[from] crate::solver::SolverError),
}
