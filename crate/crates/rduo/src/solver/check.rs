//! Independent re-verification of solve outcomes: feasibility residuals,
//! objective match, dual conditions, Farkas certificates, and unbounded rays.
//! Debug builds run this on every solve.

use super::{
    LinearModel, ObjSense, RowSense, SolveOutcome, SolveStatus, ToleranceConfig,
};
use std::fmt;

#[derive(Debug, Clone)]
pub struct CheckFailure(pub String);

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "certificate check failed: {}", self.0)
    }
}

impl std::error::Error for CheckFailure {}

fn fail(msg: String) -> Result<(), CheckFailure> {
    Err(CheckFailure(msg))
}

fn data_scale(model: &LinearModel) -> f64 {
    let mut s = 1.0f64;
    for row in &model.constraints {
        s = s.max(row.rhs.abs());
        for c in &row.coeffs {
            s = s.max(c.abs());
        }
    }
    s
}

/// Re-verify whatever certificate `outcome` claims for `model`.
///
/// Optimal LPs are checked for primal feasibility, dual feasibility,
/// complementary slackness and matching primal/dual objectives; optimal
/// MILPs for feasibility, integrality and indicator enforcement; infeasible
/// pure LPs for a valid Farkas certificate; unbounded outcomes for a valid
/// improving ray. Limit and numerical-failure outcomes are accepted as long
/// as any incumbent they carry is feasible.
pub fn farkas_or_incumbent_check(
    model: &LinearModel,
    outcome: &SolveOutcome,
    tol: &ToleranceConfig,
) -> Result<(), CheckFailure> {
    let scale = data_scale(model);
    let feas = tol.feasibility * scale * 10.0;
    match outcome.status {
        SolveStatus::Optimal => {
            let x = outcome
                .primal
                .as_ref()
                .ok_or_else(|| CheckFailure("optimal outcome without primal".into()))?;
            check_primal_feasible(model, x, feas, tol)?;
            let value: f64 = model
                .objective
                .coeffs
                .iter()
                .zip(x)
                .map(|(c, v)| c * v)
                .sum::<f64>()
                + model.objective.offset;
            let claimed = outcome
                .value
                .finite()
                .ok_or_else(|| CheckFailure("optimal outcome with infinite value".into()))?;
            if (value - claimed).abs() > 1e-6 * (1.0 + claimed.abs()) {
                return fail(format!(
                    "objective mismatch: recomputed {value}, claimed {claimed}"
                ));
            }
            if let Some(duals) = &outcome.duals {
                check_duals(model, x, duals, claimed, tol)?;
            } else if model.is_pure_lp() {
                return fail("optimal pure-LP outcome without duals".into());
            }
            Ok(())
        }
        SolveStatus::Infeasible => {
            if model.is_pure_lp() {
                let y = outcome
                    .farkas
                    .as_ref()
                    .ok_or_else(|| CheckFailure("infeasible LP without Farkas".into()))?;
                check_farkas(model, y, scale)
            } else {
                // MILP infeasibility established by exhausting the tree has
                // no compact certificate to re-verify.
                Ok(())
            }
        }
        SolveStatus::Unbounded => {
            let ray = outcome
                .ray
                .as_ref()
                .ok_or_else(|| CheckFailure("unbounded outcome without ray".into()))?;
            check_ray(model, ray)
        }
        SolveStatus::LimitReached => {
            if let Some(x) = &outcome.primal {
                check_primal_feasible(model, x, feas, tol)?;
            }
            Ok(())
        }
        SolveStatus::NumericalFailure => Ok(()),
    }
}

fn check_primal_feasible(
    model: &LinearModel,
    x: &[f64],
    feas: f64,
    tol: &ToleranceConfig,
) -> Result<(), CheckFailure> {
    if x.len() != model.num_vars() {
        return fail("primal has wrong dimension".into());
    }
    for (j, v) in model.variables.iter().enumerate() {
        if x[j] < v.lower - feas || x[j] > v.upper + feas {
            return fail(format!(
                "variable {j} = {} outside [{}, {}]",
                x[j], v.lower, v.upper
            ));
        }
        if v.is_integral_kind() && (x[j] - x[j].round()).abs() > tol.integrality * 10.0 {
            return fail(format!("variable {j} = {} not integral", x[j]));
        }
    }
    for (i, row) in model.constraints.iter().enumerate() {
        let lhs: f64 = row.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let ok = match row.sense {
            RowSense::Le => lhs <= row.rhs + feas,
            RowSense::Ge => lhs >= row.rhs - feas,
            RowSense::Eq => (lhs - row.rhs).abs() <= feas,
        };
        if !ok {
            return fail(format!(
                "row {i} violated: lhs {lhs} {} rhs {}",
                row.sense.symbol(),
                row.rhs
            ));
        }
    }
    for (k, link) in model.indicator_links.iter().enumerate() {
        let act = if link.activate_on { 1.0 } else { 0.0 };
        if (x[link.binary] - act).abs() <= tol.integrality * 10.0 {
            let lhs: f64 = link.row.iter().zip(x).map(|(a, v)| a * v).sum();
            if (lhs - link.rhs).abs() > feas {
                return fail(format!(
                    "indicator link {k} active but implied equality off by {}",
                    lhs - link.rhs
                ));
            }
        }
    }
    Ok(())
}

/// Dual conditions for an LP with row duals `y` (sign convention of
/// `SolveOutcome::duals`): dual feasibility through reduced-cost signs at
/// bounds, plus primal/dual objective match.
fn check_duals(
    model: &LinearModel,
    x: &[f64],
    y: &[f64],
    primal_value: f64,
    tol: &ToleranceConfig,
) -> Result<(), CheckFailure> {
    if y.len() != model.constraints.len() {
        return fail("dual vector has wrong dimension".into());
    }
    let minimize = model.objective.sense == ObjSense::Min;
    // Work in minimization orientation; for maximization flip y and c.
    let oriented_y: Vec<f64> = if minimize {
        y.to_vec()
    } else {
        y.iter().map(|v| -v).collect()
    };
    let cost: Vec<f64> = if minimize {
        model.objective.coeffs.clone()
    } else {
        model.objective.coeffs.iter().map(|c| -c).collect()
    };
    let scale = data_scale(model);
    let dtol = 1e-6 * scale * 10.0;

    for (i, row) in model.constraints.iter().enumerate() {
        let yi = oriented_y[i];
        match row.sense {
            RowSense::Ge => {
                if yi < -dtol {
                    return fail(format!("dual {i} negative on >= row"));
                }
            }
            RowSense::Le => {
                if yi > dtol {
                    return fail(format!("dual {i} positive on <= row"));
                }
            }
            RowSense::Eq => {}
        }
        // Complementary slackness on rows.
        let lhs: f64 = row.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        if yi.abs() > dtol && (lhs - row.rhs).abs() > tol.feasibility * scale * 100.0 {
            return fail(format!(
                "dual {i} nonzero but row slack {}",
                lhs - row.rhs
            ));
        }
    }

    // Reduced costs r = c - A^T y; sign conditions at bounds and the dual
    // objective y^T b + sum of bound terms.
    let n = model.num_vars();
    let mut reduced = cost;
    for (i, row) in model.constraints.iter().enumerate() {
        let yi = oriented_y[i];
        if yi != 0.0 {
            for (r, a) in reduced.iter_mut().zip(&row.coeffs) {
                *r -= yi * a;
            }
        }
    }
    let mut dual_obj: f64 = model
        .constraints
        .iter()
        .enumerate()
        .map(|(i, row)| oriented_y[i] * row.rhs)
        .sum();
    for j in 0..n {
        let r = reduced[j];
        let v = &model.variables[j];
        if r > dtol {
            if !v.lower.is_finite() {
                return fail(format!("positive reduced cost on unbounded-below var {j}"));
            }
            dual_obj += r * v.lower;
        } else if r < -dtol {
            if !v.upper.is_finite() {
                return fail(format!("negative reduced cost on unbounded-above var {j}"));
            }
            dual_obj += r * v.upper;
        }
    }
    let offset = if minimize {
        model.objective.offset
    } else {
        -model.objective.offset
    };
    dual_obj += offset;
    let oriented_primal = if minimize { primal_value } else { -primal_value };
    if (dual_obj - oriented_primal).abs() > 1e-6 * (1.0 + oriented_primal.abs()) * 10.0 {
        return fail(format!(
            "strong duality violated: primal {oriented_primal}, dual {dual_obj}"
        ));
    }
    Ok(())
}

/// `y` certifies infeasibility when valuing the rows by `y` bounds the
/// achievable left-hand side strictly below (above) what the right-hand
/// side requires over the variable box.
fn check_farkas(model: &LinearModel, y: &[f64], scale: f64) -> Result<(), CheckFailure> {
    if y.len() != model.constraints.len() {
        return fail("Farkas vector has wrong dimension".into());
    }
    for flip in [1.0, -1.0] {
        if farkas_valid(model, y, flip, scale) {
            return Ok(());
        }
    }
    fail("Farkas certificate does not separate".into())
}

fn farkas_valid(model: &LinearModel, y: &[f64], flip: f64, scale: f64) -> bool {
    let margin = 1e-7 * scale;
    // Row-sense sign conditions: combination must weight <= rows
    // nonpositively and >= rows nonnegatively (equality rows free).
    let mut yb = 0.0;
    for (i, row) in model.constraints.iter().enumerate() {
        let yi = flip * y[i];
        match row.sense {
            RowSense::Le if yi > margin => return false,
            RowSense::Ge if yi < -margin => return false,
            _ => {}
        }
        yb += yi * row.rhs;
    }
    // sup over the box of (y^T A) x must fall short of y^T b.
    let n = model.num_vars();
    let mut v = vec![0.0; n];
    for (i, row) in model.constraints.iter().enumerate() {
        let yi = flip * y[i];
        if yi != 0.0 {
            for (vj, a) in v.iter_mut().zip(&row.coeffs) {
                *vj += yi * a;
            }
        }
    }
    let mut sup = 0.0;
    for (j, vj) in v.iter().enumerate() {
        let b = &model.variables[j];
        if vj.abs() <= margin {
            continue;
        }
        let at = if *vj > 0.0 { b.upper } else { b.lower };
        if !at.is_finite() {
            return false; // sup is +inf, no separation
        }
        sup += vj * at;
    }
    sup < yb - margin
}

/// A ray must respect every row sense, every finite bound direction, and
/// strictly improve the objective.
fn check_ray(model: &LinearModel, d: &[f64]) -> Result<(), CheckFailure> {
    if d.len() != model.num_vars() {
        return fail("ray has wrong dimension".into());
    }
    let norm = d.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if norm <= 0.0 {
        return fail("zero ray".into());
    }
    let rtol = 1e-7 * norm * data_scale(model);
    for (j, v) in model.variables.iter().enumerate() {
        if v.lower.is_finite() && d[j] < -rtol {
            return fail(format!("ray decreases bounded-below var {j}"));
        }
        if v.upper.is_finite() && d[j] > rtol {
            return fail(format!("ray increases bounded-above var {j}"));
        }
    }
    for (i, row) in model.constraints.iter().enumerate() {
        let ad: f64 = row.coeffs.iter().zip(d).map(|(a, v)| a * v).sum();
        let ok = match row.sense {
            RowSense::Le => ad <= rtol,
            RowSense::Ge => ad >= -rtol,
            RowSense::Eq => ad.abs() <= rtol,
        };
        if !ok {
            return fail(format!("ray violates row {i} direction"));
        }
    }
    let cd: f64 = model.objective.coeffs.iter().zip(d).map(|(c, v)| c * v).sum();
    let improving = match model.objective.sense {
        ObjSense::Min => cd < 0.0,
        ObjSense::Max => cd > 0.0,
    };
    if !improving {
        return fail("ray does not improve the objective".into());
    }
    Ok(())
}
