//! Two-phase primal simplex over bounded variables with Bland's anti-cycling
//! pivot rule. Dense tableau; every column (structural, slack, artificial)
//! stays in the tableau so row duals can be read off the slack columns.

use super::{
    LinearModel, ObjSense, RowSense, SolveOutcome, SolveStatus, SolverError, ToleranceConfig,
};
use crate::ext::ExtReal;
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Free variable parked at zero.
    FreeAtZero,
}

struct Lp {
    /// Column bounds for structural + slack + artificial variables.
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Phase-2 costs (structural only; slacks and artificials cost zero).
    cost: Vec<f64>,
    n_struct: usize,
    n_rows: usize,
    n_art: usize,
    /// Row-major tableau holding B^-1 A for all columns.
    tab: Vec<f64>,
    stride: usize,
    /// Reduced-cost row for the active phase.
    zrow: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    /// Values of basic variables per row.
    xb: Vec<f64>,
    /// Current value of each nonbasic variable.
    nb_value: Vec<f64>,
    rhs: Vec<f64>,
    pivots: u64,
}

enum LpVerdict {
    Optimal,
    Infeasible { farkas: Vec<f64> },
    Unbounded { ray: Vec<f64> },
    Numerical(String),
}

const ENTER_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-12;

impl Lp {
    fn primal(&self) -> Vec<f64> {
        (0..self.n_struct).map(|j| self.value_of(j)).collect()
    }

    /// Row duals `y` for the internal minimization problem.
    fn duals(&self) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| -self.zrow[self.n_struct + i])
            .collect()
    }

    fn objective(&self) -> f64 {
        (0..self.n_struct)
            .map(|j| self.cost[j] * self.value_of(j))
            .sum()
    }

    fn value_of(&self, col: usize) -> f64 {
        match self.state[col] {
            VarState::Basic(row) => self.xb[row],
            _ => self.nb_value[col],
        }
    }

    fn build(model: &LinearModel, tol: &ToleranceConfig) -> Lp {
        let n = model.num_vars();
        let m = model.constraints.len();

        let mut lower = Vec::with_capacity(n + m);
        let mut upper = Vec::with_capacity(n + m);
        let mut cost = vec![0.0; n + m];
        for (j, v) in model.variables.iter().enumerate() {
            lower.push(v.lower);
            upper.push(v.upper);
            cost[j] = model.objective.coeffs[j];
        }
        for row in &model.constraints {
            let (lo, up) = match row.sense {
                RowSense::Le => (0.0, f64::INFINITY),
                RowSense::Ge => (f64::NEG_INFINITY, 0.0),
                RowSense::Eq => (0.0, 0.0),
            };
            lower.push(lo);
            upper.push(up);
        }

        let mut lp = Lp {
            lower,
            upper,
            cost,
            n_struct: n,
            n_rows: m,
            n_art: 0,
            tab: Vec::new(),
            stride: 0,
            zrow: Vec::new(),
            state: vec![VarState::AtLower; n + m],
            basis: vec![usize::MAX; m],
            xb: vec![0.0; m],
            nb_value: vec![0.0; n + m],
            rhs: model.constraints.iter().map(|r| r.rhs).collect(),
            pivots: 0,
        };

        // Park nonbasic structural variables at a finite bound.
        for j in 0..n {
            let (lo, up) = (lp.lower[j], lp.upper[j]);
            if lo.is_finite() {
                lp.state[j] = VarState::AtLower;
                lp.nb_value[j] = lo;
            } else if up.is_finite() {
                lp.state[j] = VarState::AtUpper;
                lp.nb_value[j] = up;
            } else {
                lp.state[j] = VarState::FreeAtZero;
                lp.nb_value[j] = 0.0;
            }
        }
        // Park slacks at their finite bound (both are 0).
        for (i, row) in model.constraints.iter().enumerate() {
            let s = n + i;
            lp.state[s] = match row.sense {
                RowSense::Le | RowSense::Eq => VarState::AtLower,
                RowSense::Ge => VarState::AtUpper,
            };
            lp.nb_value[s] = 0.0;
        }

        // Residual each row must absorb through slack, a crash column, or an
        // artificial.
        let mut residual = vec![0.0; m];
        for (i, row) in model.constraints.iter().enumerate() {
            let mut acc = row.rhs;
            for (j, &a) in row.coeffs.iter().enumerate() {
                if a != 0.0 {
                    acc -= a * lp.nb_value[j];
                }
            }
            residual[i] = acc;
        }

        // Singleton crash: a structural column appearing in exactly one row
        // can carry that row's residual if its bounds allow, avoiding an
        // artificial. Catches slack-like penalty and epigraph variables.
        let mut col_rows: Vec<(u32, usize)> = vec![(0, usize::MAX); n];
        for (i, row) in model.constraints.iter().enumerate() {
            for (j, &a) in row.coeffs.iter().enumerate() {
                if a != 0.0 {
                    col_rows[j].0 += 1;
                    col_rows[j].1 = i;
                }
            }
        }
        let mut row_owner: Vec<Option<usize>> = vec![None; m];
        for j in 0..n {
            let (count, i) = col_rows[j];
            if count != 1 || row_owner[i].is_some() {
                continue;
            }
            let slack = n + i;
            if residual[i] >= lp.lower[slack] - tol.feasibility
                && residual[i] <= lp.upper[slack] + tol.feasibility
            {
                continue; // the slack will do
            }
            let a = model.constraints[i].coeffs[j];
            let target = lp.nb_value[j] + residual[i] / a;
            if target >= lp.lower[j] - tol.feasibility && target <= lp.upper[j] + tol.feasibility
            {
                row_owner[i] = Some(j);
            }
        }

        let mut art_sign = Vec::new();
        let mut art_of_row = vec![usize::MAX; m];
        for i in 0..m {
            if row_owner[i].is_some() {
                continue;
            }
            let slack = n + i;
            if residual[i] >= lp.lower[slack] - tol.feasibility
                && residual[i] <= lp.upper[slack] + tol.feasibility
            {
                continue;
            }
            art_of_row[i] = art_sign.len();
            art_sign.push(if residual[i] > 0.0 { 1.0 } else { -1.0 });
        }
        lp.n_art = art_sign.len();
        let total = n + m + lp.n_art;
        lp.stride = total;
        lp.tab = vec![0.0; m * total];
        lp.cost.resize(total, 0.0);
        lp.lower.resize(total, 0.0);
        lp.upper.resize(total, f64::INFINITY);
        lp.state.resize(total, VarState::AtLower);
        lp.nb_value.resize(total, 0.0);

        for (i, row) in model.constraints.iter().enumerate() {
            let t = &mut lp.tab[i * total..(i + 1) * total];
            t[..n].copy_from_slice(&row.coeffs);
            t[n + i] = 1.0;
            if art_of_row[i] != usize::MAX {
                t[n + m + art_of_row[i]] = art_sign[art_of_row[i]];
            }
        }

        // Install the starting basis. Crash columns are singletons, so making
        // their row read +1 requires only a row scaling.
        for i in 0..m {
            if let Some(j) = row_owner[i] {
                let a = model.constraints[i].coeffs[j];
                let target = lp.nb_value[j] + residual[i] / a;
                lp.basis[i] = j;
                lp.state[j] = VarState::Basic(i);
                lp.xb[i] = target;
                lp.scale_row(i, 1.0 / a);
            } else if art_of_row[i] == usize::MAX {
                let slack = n + i;
                lp.basis[i] = slack;
                lp.state[slack] = VarState::Basic(i);
                lp.xb[i] = residual[i];
            } else {
                let art = n + m + art_of_row[i];
                lp.basis[i] = art;
                lp.state[art] = VarState::Basic(i);
                lp.xb[i] = residual[i].abs();
                if art_sign[art_of_row[i]] < 0.0 {
                    lp.scale_row(i, -1.0); // keep the basic column at +1
                }
            }
        }
        lp
    }

    fn scale_row(&mut self, i: usize, factor: f64) {
        if factor == 1.0 {
            return;
        }
        for v in &mut self.tab[i * self.stride..(i + 1) * self.stride] {
            *v *= factor;
        }
    }

    fn compute_zrow(&mut self, phase1: bool) {
        let total = self.stride;
        let art0 = self.n_struct + self.n_rows;
        let phase_cost = |lp: &Lp, j: usize| -> f64 {
            if phase1 {
                if j >= art0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                lp.cost[j]
            }
        };
        let mut z: Vec<f64> = (0..total).map(|j| phase_cost(self, j)).collect();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = phase_cost(self, b);
            if cb != 0.0 {
                let row = &self.tab[i * total..(i + 1) * total];
                for (zj, a) in z.iter_mut().zip(row) {
                    *zj -= cb * a;
                }
            }
        }
        self.zrow = z;
    }

    fn eligible_direction(&self, j: usize) -> Option<f64> {
        if j >= self.n_struct + self.n_rows {
            return None; // artificials never re-enter
        }
        let z = self.zrow[j];
        match self.state[j] {
            VarState::Basic(_) => None,
            VarState::AtLower => {
                if self.upper[j] - self.lower[j] <= 0.0 {
                    return None; // fixed
                }
                (z < -ENTER_TOL).then_some(1.0)
            }
            VarState::AtUpper => {
                if self.upper[j] - self.lower[j] <= 0.0 {
                    return None;
                }
                (z > ENTER_TOL).then_some(-1.0)
            }
            VarState::FreeAtZero => {
                if z < -ENTER_TOL {
                    Some(1.0)
                } else if z > ENTER_TOL {
                    Some(-1.0)
                } else {
                    None
                }
            }
        }
    }

    /// Run simplex iterations for the active phase until optimal or an
    /// exceptional verdict. Returns None when phase-optimal.
    fn iterate(&mut self, tol: &ToleranceConfig, max_pivots: u64) -> Option<LpVerdict> {
        loop {
            if self.pivots > max_pivots {
                return Some(LpVerdict::Numerical(format!(
                    "pivot limit {max_pivots} exceeded"
                )));
            }
            // Bland: smallest-index eligible entering column.
            let mut entering = None;
            for j in 0..self.stride {
                if let Some(dir) = self.eligible_direction(j) {
                    entering = Some((j, dir));
                    break;
                }
            }
            let Some((q, dir)) = entering else {
                return None;
            };

            // Ratio test over basic variables plus the entering bound flip.
            // Bland tie-break: smallest leaving-variable index.
            let mut best_t = f64::INFINITY;
            let mut best_var = usize::MAX;
            let mut best_row: Option<(usize, bool)> = None; // (row, hits_upper)
            let range = self.upper[q] - self.lower[q];
            if range.is_finite() {
                best_t = range;
                best_var = q;
                best_row = None;
            }
            for i in 0..self.n_rows {
                let w = self.tab[i * self.stride + q];
                if w.abs() <= tol.pivot {
                    continue;
                }
                let delta = -dir * w; // movement of basic i per unit step
                let b = self.basis[i];
                let cap = if delta > 0.0 {
                    if self.upper[b].is_finite() {
                        (self.upper[b] - self.xb[i]) / delta
                    } else {
                        continue;
                    }
                } else {
                    if self.lower[b].is_finite() {
                        (self.xb[i] - self.lower[b]) / -delta
                    } else {
                        continue;
                    }
                };
                let cap = cap.max(0.0);
                if cap < best_t - TIE_TOL || (cap <= best_t + TIE_TOL && b < best_var) {
                    best_t = best_t.min(cap);
                    best_var = b;
                    best_row = Some((i, delta > 0.0));
                }
            }

            if best_t.is_infinite() {
                return Some(LpVerdict::Unbounded {
                    ray: self.extract_ray(q, dir),
                });
            }

            let t = best_t;
            match best_row {
                None => {
                    // Bound flip of the entering variable; basis unchanged.
                    for i in 0..self.n_rows {
                        let w = self.tab[i * self.stride + q];
                        if w != 0.0 {
                            self.xb[i] -= dir * t * w;
                        }
                    }
                    self.state[q] = match self.state[q] {
                        VarState::AtLower => VarState::AtUpper,
                        VarState::AtUpper => VarState::AtLower,
                        s => s,
                    };
                    self.nb_value[q] = if dir > 0.0 {
                        self.upper[q]
                    } else {
                        self.lower[q]
                    };
                    self.pivots += 1;
                }
                Some((r, hits_upper)) => {
                    let lvar = self.basis[r];
                    let entering_value = self.value_of(q) + dir * t;
                    for i in 0..self.n_rows {
                        if i != r {
                            let w = self.tab[i * self.stride + q];
                            if w != 0.0 {
                                self.xb[i] -= dir * t * w;
                            }
                        }
                    }
                    self.pivot(r, q);
                    self.xb[r] = entering_value;
                    self.state[lvar] = if hits_upper {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                    self.nb_value[lvar] = if hits_upper {
                        self.upper[lvar]
                    } else {
                        self.lower[lvar]
                    };
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        self.pivots += 1;
        let stride = self.stride;
        let inv = 1.0 / self.tab[r * stride + q];
        for v in &mut self.tab[r * stride..(r + 1) * stride] {
            *v *= inv;
        }
        self.tab[r * stride + q] = 1.0;
        for i in 0..self.n_rows {
            if i == r {
                continue;
            }
            let factor = self.tab[i * stride + q];
            if factor.abs() > 1e-13 {
                let (pr, ir) = row_pair(&mut self.tab, stride, r, i);
                for (t, p) in ir.iter_mut().zip(pr.iter()) {
                    *t -= factor * *p;
                }
                self.tab[i * stride + q] = 0.0;
            }
        }
        let zfac = self.zrow[q];
        if zfac.abs() > 1e-13 {
            let pr = &self.tab[r * stride..(r + 1) * stride];
            for (z, p) in self.zrow.iter_mut().zip(pr.iter()) {
                *z -= zfac * *p;
            }
            self.zrow[q] = 0.0;
        }
        self.state[q] = VarState::Basic(r);
        self.basis[r] = q;
    }

    fn extract_ray(&self, q: usize, dir: f64) -> Vec<f64> {
        let mut d = vec![0.0; self.n_struct];
        if q < self.n_struct {
            d[q] = dir;
        }
        for i in 0..self.n_rows {
            let b = self.basis[i];
            if b < self.n_struct {
                d[b] = -dir * self.tab[i * self.stride + q];
            }
        }
        d
    }

    fn phase1_infeasibility(&self) -> f64 {
        let art0 = self.n_struct + self.n_rows;
        self.basis
            .iter()
            .enumerate()
            .filter(|(_, b)| **b >= art0)
            .map(|(i, _)| self.xb[i])
            .sum()
    }

    /// Pivot basic artificials out where possible, then freeze all of them.
    fn retire_artificials(&mut self, tol: &ToleranceConfig) {
        let art0 = self.n_struct + self.n_rows;
        for r in 0..self.n_rows {
            if self.basis[r] < art0 {
                continue;
            }
            debug_assert!(self.xb[r].abs() <= tol.feasibility * 100.0);
            let mut target = None;
            for j in 0..art0 {
                if matches!(self.state[j], VarState::Basic(_)) {
                    continue;
                }
                if self.tab[r * self.stride + j].abs() > tol.pivot * 10.0 {
                    target = Some(j);
                    break;
                }
            }
            if let Some(j) = target {
                // Degenerate pivot: the artificial sits at zero, so no basic
                // value moves and the entering variable keeps its value.
                let old = self.basis[r];
                let entering_value = self.value_of(j);
                self.pivot(r, j);
                self.xb[r] = entering_value;
                self.state[old] = VarState::AtLower;
                self.nb_value[old] = 0.0;
            }
        }
        for a in art0..self.stride {
            self.lower[a] = 0.0;
            self.upper[a] = 0.0;
            if !matches!(self.state[a], VarState::Basic(_)) {
                self.nb_value[a] = 0.0;
            }
        }
    }

    fn max_bound_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, &b) in self.basis.iter().enumerate() {
            let v = self.xb[i];
            if self.lower[b].is_finite() {
                worst = worst.max(self.lower[b] - v);
            }
            if self.upper[b].is_finite() {
                worst = worst.max(v - self.upper[b]);
            }
        }
        worst
    }
}

fn row_pair(tab: &mut [f64], stride: usize, a: usize, b: usize) -> (&[f64], &mut [f64]) {
    debug_assert_ne!(a, b);
    if a < b {
        let (lo, hi) = tab.split_at_mut(b * stride);
        (&lo[a * stride..(a + 1) * stride], &mut hi[..stride])
    } else {
        let (lo, hi) = tab.split_at_mut(a * stride);
        (&hi[..stride], &mut lo[b * stride..(b + 1) * stride])
    }
}

/// Solve an LP given in the crate's model form. Assumes `model.validate()`
/// passed and that the model is a pure LP.
pub(super) fn solve_lp_internal(
    model: &LinearModel,
    tol: &ToleranceConfig,
) -> Result<SolveOutcome, SolverError> {
    let maximize = model.objective.sense == ObjSense::Max;
    let mut internal;
    let work = if maximize {
        internal = model.clone();
        for c in &mut internal.objective.coeffs {
            *c = -*c;
        }
        internal.objective.offset = -internal.objective.offset;
        internal.objective.sense = ObjSense::Min;
        &internal
    } else {
        model
    };

    let (verdict, lp) = run_two_phase(work, tol);
    let mut outcome = SolveOutcome {
        status: SolveStatus::NumericalFailure,
        value: ExtReal::Finite(0.0),
        primal: None,
        duals: None,
        farkas: None,
        ray: None,
        bound: if maximize {
            ExtReal::PosInf
        } else {
            ExtReal::NegInf
        },
        node_count: 1,
        elapsed: Duration::ZERO,
    };

    match verdict {
        LpVerdict::Optimal => {
            let value = lp.objective() + work.objective.offset;
            let duals = lp.duals();
            outcome.status = SolveStatus::Optimal;
            outcome.primal = Some(lp.primal());
            outcome.value = ExtReal::Finite(if maximize { -value } else { value });
            outcome.duals = Some(if maximize {
                duals.iter().map(|y| -y).collect()
            } else {
                duals
            });
            outcome.bound = outcome.value;
        }
        LpVerdict::Infeasible { farkas } => {
            outcome.status = SolveStatus::Infeasible;
            outcome.value = if maximize {
                ExtReal::NegInf
            } else {
                ExtReal::PosInf
            };
            outcome.bound = outcome.value;
            outcome.farkas = Some(farkas);
        }
        LpVerdict::Unbounded { ray } => {
            outcome.status = SolveStatus::Unbounded;
            outcome.value = if maximize {
                ExtReal::PosInf
            } else {
                ExtReal::NegInf
            };
            outcome.bound = outcome.value;
            outcome.ray = Some(ray);
        }
        LpVerdict::Numerical(msg) => {
            log::warn!("simplex numerical failure: {msg}");
            outcome.status = SolveStatus::NumericalFailure;
        }
    }
    Ok(outcome)
}

fn run_two_phase(model: &LinearModel, tol: &ToleranceConfig) -> (LpVerdict, Lp) {
    let mut lp = Lp::build(model, tol);
    let max_pivots = 50_000 + 200 * (lp.n_rows as u64 + lp.stride as u64);

    if lp.n_art > 0 {
        lp.compute_zrow(true);
        if let Some(v) = lp.iterate(tol, max_pivots) {
            // Phase 1 minimizes a sum of nonnegatives; it cannot be unbounded.
            let verdict = match v {
                LpVerdict::Numerical(m) => LpVerdict::Numerical(m),
                _ => LpVerdict::Numerical("phase 1 reported unbounded".into()),
            };
            return (verdict, lp);
        }
        let infeas = lp.phase1_infeasibility();
        let scale = 1.0 + lp.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if infeas > tol.feasibility * scale {
            let farkas = lp.duals();
            return (LpVerdict::Infeasible { farkas }, lp);
        }
        lp.retire_artificials(tol);
    }

    lp.compute_zrow(false);
    if let Some(v) = lp.iterate(tol, max_pivots) {
        return (v, lp);
    }

    let drift = lp.max_bound_violation();
    let scale = 1.0 + lp.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if drift > tol.feasibility * scale * 10.0 {
        return (
            LpVerdict::Numerical(format!("basic values drifted by {drift}")),
            lp,
        );
    }
    (LpVerdict::Optimal, lp)
}
