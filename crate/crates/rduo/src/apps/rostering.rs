//! Staff rostering under uncertain shift demands.
//!
//! First stage assigns regular staff to shifts (binary); each scenario
//! raises up to `budget` shift demands by their forecast deviation; recourse
//! hires part-time staff (binary hire decision plus continuous hours) and
//! pays a per-unit penalty for any demand still unmet. The penalty variable
//! gives relatively complete recourse, and with deterministic cost vectors
//! and a nonnegative demand deviation the objective-monotone bound recipe
//! applies, so the closed-form multiplier path is available.

use crate::matrix::Matrix;
use crate::model::{
    AffineMap, GeneralProblem, MixedIntegerSet, ModelError, MultiplierHint, ProblemMeta,
    RecourseSplit,
};
use crate::solver::{RowSense, Variable};

#[derive(Debug, Clone)]
pub struct StaffRosteringInstance {
    /// Wage of regular staff member i on shift t (customers x shifts).
    pub wages: Matrix,
    /// Minimum/maximum number of shifts each regular staff member works.
    pub shift_min: Vec<f64>,
    pub shift_max: Vec<f64>,
    /// Fixed and hourly cost of part-timer j on shift t.
    pub pt_fixed: Matrix,
    pub pt_hourly: Matrix,
    /// Minimum/maximum number of shifts each part-timer works.
    pub pt_min: Vec<f64>,
    pub pt_max: Vec<f64>,
    /// Work hours per shift per person.
    pub hours_per_shift: f64,
    /// Nominal demand and deviation per shift, in hours.
    pub demand_base: Vec<f64>,
    pub demand_dev: Vec<f64>,
    /// Penalty per unmet demand hour, per shift.
    pub penalties: Vec<f64>,
    /// Maximum number of shifts whose demand surges simultaneously.
    pub budget: usize,
    pub label: String,
}

impl StaffRosteringInstance {
    pub fn regulars(&self) -> usize {
        self.wages.rows()
    }
    pub fn part_timers(&self) -> usize {
        self.pt_fixed.rows()
    }
    pub fn shifts(&self) -> usize {
        self.demand_base.len()
    }

    fn check(&self) -> Result<(), ModelError> {
        let (i, j, t) = (self.regulars(), self.part_timers(), self.shifts());
        if self.wages.cols() != t
            || self.shift_min.len() != i
            || self.shift_max.len() != i
            || self.pt_fixed.cols() != t
            || self.pt_hourly.rows() != j
            || self.pt_hourly.cols() != t
            || self.pt_min.len() != j
            || self.pt_max.len() != j
            || self.demand_dev.len() != t
            || self.penalties.len() != t
        {
            return Err(ModelError::Dimension(
                "rostering instance arrays disagree on sizes".into(),
            ));
        }
        for k in 0..i {
            if self.shift_min[k] > self.shift_max[k] {
                return Err(ModelError::Invalid(format!(
                    "regular {k} has shift_min above shift_max"
                )));
            }
        }
        for k in 0..j {
            if self.pt_min[k] > self.pt_max[k] {
                return Err(ModelError::Invalid(format!(
                    "part-timer {k} has pt_min above pt_max"
                )));
            }
        }
        let nonneg = (0..i).all(|r| self.wages.row(r).iter().all(|v| *v >= 0.0))
            && (0..j).all(|r| {
                self.pt_fixed.row(r).iter().all(|v| *v >= 0.0)
                    && self.pt_hourly.row(r).iter().all(|v| *v >= 0.0)
            })
            && self
                .demand_base
                .iter()
                .chain(&self.demand_dev)
                .chain(&self.penalties)
                .all(|v| *v >= 0.0);
        if !nonneg {
            return Err(ModelError::Invalid(
                "rostering costs and demands must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// First-stage layout: x[i][t] at `i * shifts + t`.
/// Recourse layout: hire y[j][t] at `j * shifts + t` (binary), hours v[j][t]
/// at `pt*shifts + j*shifts + t`, unmet w[t] at `2*pt*shifts + t`.
///
/// Coupling rows: per-shift coverage (scenario-dependent demand), then the
/// hour-link rows `v_jt <= N y_jt`. Hire-pattern rows (no two consecutive
/// shifts, shift-count bounds) live in the recourse set itself since they
/// touch only the discrete block.
pub fn build_staff_rostering(
    inst: &StaffRosteringInstance,
) -> Result<GeneralProblem, ModelError> {
    inst.check()?;
    let (ni, nj, nt) = (inst.regulars(), inst.part_timers(), inst.shifts());
    let n1 = ni * nt;
    let n2 = 2 * nj * nt + nt;
    let np = nt;
    let n = inst.hours_per_shift;
    let hire = |j: usize, t: usize| j * nt + t;
    let hours = |j: usize, t: usize| nj * nt + j * nt + t;
    let unmet = |t: usize| 2 * nj * nt + t;

    let mut first_stage = MixedIntegerSet::binary(n1);
    for i in 0..ni {
        for t in 0..nt.saturating_sub(2) {
            first_stage.add_row(
                &[
                    (i * nt + t, 1.0),
                    (i * nt + t + 1, 1.0),
                    (i * nt + t + 2, 1.0),
                ],
                RowSense::Le,
                2.0,
            );
        }
        let all: Vec<(usize, f64)> = (0..nt).map(|t| (i * nt + t, 1.0)).collect();
        first_stage.add_row(&all, RowSense::Ge, inst.shift_min[i]);
        first_stage.add_row(&all, RowSense::Le, inst.shift_max[i]);
    }

    let mut recourse = MixedIntegerSet {
        variables: Vec::new(),
        constraints: Vec::new(),
    };
    for _ in 0..nj * nt {
        recourse.variables.push(Variable::binary());
    }
    for _ in 0..nj * nt {
        recourse.variables.push(Variable::continuous(0.0, n));
    }
    let max_demand = inst
        .demand_base
        .iter()
        .zip(&inst.demand_dev)
        .map(|(a, b)| a + b)
        .fold(0.0f64, f64::max);
    for _ in 0..nt {
        recourse.variables.push(Variable::continuous(0.0, max_demand));
    }
    for j in 0..nj {
        for t in 0..nt.saturating_sub(1) {
            recourse.add_row(
                &[(hire(j, t), 1.0), (hire(j, t + 1), 1.0)],
                RowSense::Le,
                1.0,
            );
        }
        let all: Vec<(usize, f64)> = (0..nt).map(|t| (hire(j, t), 1.0)).collect();
        recourse.add_row(&all, RowSense::Ge, inst.pt_min[j]);
        recourse.add_row(&all, RowSense::Le, inst.pt_max[j]);
    }

    let mut uncertainty = MixedIntegerSet::binary(np);
    let budget_terms: Vec<(usize, f64)> = (0..np).map(|t| (t, 1.0)).collect();
    uncertainty.add_row(&budget_terms, RowSense::Le, inst.budget as f64);

    let m = nt + nj * nt;
    let mut tech = Matrix::zeros(m, n1);
    let mut rec = Matrix::zeros(m, n2);
    let mut h0 = vec![0.0; m];
    let mut slope = Matrix::zeros(m, np);
    for t in 0..nt {
        for i in 0..ni {
            tech[(t, i * nt + t)] = n;
        }
        for j in 0..nj {
            rec[(t, hours(j, t))] = 1.0;
        }
        rec[(t, unmet(t))] = 1.0;
        h0[t] = inst.demand_base[t];
        slope[(t, t)] = inst.demand_dev[t];
    }
    for j in 0..nj {
        for t in 0..nt {
            let r = nt + j * nt + t;
            rec[(r, hire(j, t))] = n;
            rec[(r, hours(j, t))] = -1.0;
        }
    }

    let mut first_costs = vec![0.0; n1];
    for i in 0..ni {
        for t in 0..nt {
            first_costs[i * nt + t] = inst.wages[(i, t)];
        }
    }
    let mut rec_costs = vec![0.0; n2];
    for j in 0..nj {
        for t in 0..nt {
            rec_costs[hire(j, t)] = inst.pt_fixed[(j, t)];
            rec_costs[hours(j, t)] = inst.pt_hourly[(j, t)];
        }
    }
    for t in 0..nt {
        rec_costs[unmet(t)] = inst.penalties[t];
    }

    let box_hi: Vec<f64> = recourse.variables.iter().map(|v| v.upper).collect();
    let split = RecourseSplit {
        continuous: (nj * nt..n2).collect(),
        discrete: (0..nj * nt).collect(),
    };

    Ok(GeneralProblem {
        first_stage,
        recourse,
        uncertainty,
        first_cost: AffineMap::constant_only(first_costs, np),
        recourse_cost: AffineMap::constant_only(rec_costs, np),
        rhs: AffineMap::new(h0, slope),
        tech,
        recourse_mat: rec,
        recourse_split: Some(split),
        meta: ProblemMeta {
            relatively_complete_recourse: true,
            all_binary_scenarios_feasible: true,
            multiplier_hint: Some(MultiplierHint::ObjectiveMonotone),
            recourse_value_box: Some((vec![0.0; n2], box_hi)),
            family: Some("rostering".into()),
            label: Some(inst.label.clone()),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apps::{generate_random_instance, Family};
    use crate::model::Problem;

    #[test]
    fn first_stage_row_count() {
        // I=4, J=2, T=7: 4*5 consecutive-shift rows plus 8 bound rows.
        let p = match generate_random_instance(Family::Rostering, &[4, 2, 7], 1, 7).unwrap() {
            Problem::General(p) => p,
            _ => unreachable!(),
        };
        assert_eq!(p.first_stage.constraints.len(), 4 * 5 + 8);
        assert_eq!(p.rows(), 7 + 2 * 7);
        assert!(p.recourse_split.is_some());
    }
}
