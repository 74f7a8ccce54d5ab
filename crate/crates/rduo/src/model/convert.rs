//! Big-M conversion from the indicator form to the general form.

use super::{AffineMap, GeneralProblem, IndicatorProblem, ModelError};
use crate::matrix::Matrix;

/// Replace each switched row `i` of family `j` by a big-M counterpart:
/// active-on-one rows become `g_i(x, y) <= M_i (1 - xi_j)` and active-on-zero
/// rows `g_i(x, y) <= M_i xi_j`, on top of the always-present `g(x, y) >= 0`.
/// With M valid for the instance the result is an equivalent general-form
/// problem whose right-hand side is affine in the scenario.
///
/// The caller asserts validity of the supplied per-row bounds; nonpositive
/// entries on referenced rows are rejected.
pub fn indicator_to_general(
    p: &IndicatorProblem,
    big_m: &[f64],
) -> Result<GeneralProblem, ModelError> {
    let m = p.rows();
    if big_m.len() != m {
        return Err(ModelError::Dimension(format!(
            "big-M vector has length {}, expected {m}",
            big_m.len()
        )));
    }
    let mut referenced = vec![false; m];
    for fam in p.switch_on_one.iter().chain(&p.switch_on_zero) {
        for &i in fam {
            if i >= m {
                return Err(ModelError::Invalid(format!(
                    "switch family references row {i} of {m}"
                )));
            }
            referenced[i] = true;
        }
    }
    for i in 0..m {
        if referenced[i] && big_m[i] <= 0.0 {
            return Err(ModelError::Invalid(format!(
                "nonpositive big-M {} on switched row {i}",
                big_m[i]
            )));
        }
    }

    let extra: usize = p
        .switch_on_one
        .iter()
        .chain(&p.switch_on_zero)
        .map(|f| f.len())
        .sum();
    let n1 = p.n1();
    let n2 = p.n2();
    let np = p.np();
    let total_rows = m + extra;

    let mut tech = Matrix::zeros(total_rows, n1);
    let mut rec = Matrix::zeros(total_rows, n2);
    let mut h0 = vec![0.0; total_rows];
    let mut slope = Matrix::zeros(total_rows, np);

    for i in 0..m {
        tech.row_mut(i).copy_from_slice(p.tech.row(i));
        rec.row_mut(i).copy_from_slice(p.recourse_mat.row(i));
        h0[i] = p.rhs_const[i];
    }
    let mut r = m;
    // -g_i >= -h0_i - M_i + M_i xi_j   (switched on one)
    for (j, fam) in p.switch_on_one.iter().enumerate() {
        for &i in fam {
            for (dst, src) in tech.row_mut(r).iter_mut().zip(p.tech.row(i)) {
                *dst = -src;
            }
            for (dst, src) in rec.row_mut(r).iter_mut().zip(p.recourse_mat.row(i)) {
                *dst = -src;
            }
            h0[r] = -p.rhs_const[i] - big_m[i];
            slope[(r, j)] = big_m[i];
            r += 1;
        }
    }
    // -g_i >= -h0_i - M_i xi_j   (switched on zero)
    for (j, fam) in p.switch_on_zero.iter().enumerate() {
        for &i in fam {
            for (dst, src) in tech.row_mut(r).iter_mut().zip(p.tech.row(i)) {
                *dst = -src;
            }
            for (dst, src) in rec.row_mut(r).iter_mut().zip(p.recourse_mat.row(i)) {
                *dst = -src;
            }
            h0[r] = -p.rhs_const[i];
            slope[(r, j)] = -big_m[i];
            r += 1;
        }
    }
    debug_assert_eq!(r, total_rows);

    Ok(GeneralProblem {
        first_stage: p.first_stage.clone(),
        recourse: p.recourse.clone(),
        uncertainty: p.uncertainty.clone(),
        first_cost: p.first_cost.clone(),
        recourse_cost: p.recourse_cost.clone(),
        rhs: AffineMap::new(h0, slope),
        tech,
        recourse_mat: rec,
        recourse_split: None,
        meta: p.meta.clone(),
    })
}
