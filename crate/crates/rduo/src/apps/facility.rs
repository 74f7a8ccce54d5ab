//! Facility location with random facility disruptions.
//!
//! First stage opens facilities; each scenario disrupts up to `budget` of
//! them, shutting their outflow to zero; recourse routes demand or pays a
//! per-unit penalty for unmet demand. Penalties give relatively complete
//! recourse by construction.

use crate::matrix::Matrix;
use crate::model::{
    AffineMap, IndicatorProblem, MixedIntegerSet, ModelError, MultiplierHint, ProblemMeta,
};
use crate::solver::RowSense;

#[derive(Debug, Clone)]
pub struct FacilityLocationInstance {
    /// Customer demands.
    pub demands: Vec<f64>,
    /// Per-unit penalty for unmet demand, per customer.
    pub penalties: Vec<f64>,
    /// Fixed opening cost per location.
    pub fixed_costs: Vec<f64>,
    /// Capacity per location.
    pub capacities: Vec<f64>,
    /// Per-unit transport cost, customers x locations.
    pub transport: Matrix,
    /// Maximum number of simultaneous disruptions.
    pub budget: usize,
    pub label: String,
}

impl FacilityLocationInstance {
    pub fn customers(&self) -> usize {
        self.demands.len()
    }

    pub fn locations(&self) -> usize {
        self.fixed_costs.len()
    }

    /// Two locations, one customer with demand 10 and penalty 100, unit
    /// opening costs, capacities 10, transport costs 1 and 2, budget 1.
    pub fn micro() -> Self {
        FacilityLocationInstance {
            demands: vec![10.0],
            penalties: vec![100.0],
            fixed_costs: vec![1.0, 1.0],
            capacities: vec![10.0, 10.0],
            transport: Matrix::from_rows(vec![vec![1.0, 2.0]]),
            budget: 1,
            label: "facility-micro".into(),
        }
    }

    fn check(&self) -> Result<(), ModelError> {
        let (i, j) = (self.customers(), self.locations());
        if self.penalties.len() != i
            || self.capacities.len() != j
            || self.transport.rows() != i
            || self.transport.cols() != j
        {
            return Err(ModelError::Dimension(
                "facility instance arrays disagree on customer/location counts".into(),
            ));
        }
        let nonneg = self
            .demands
            .iter()
            .chain(&self.penalties)
            .chain(&self.fixed_costs)
            .chain(&self.capacities)
            .all(|v| *v >= 0.0)
            && (0..i).all(|r| self.transport.row(r).iter().all(|v| *v >= 0.0));
        if !nonneg {
            return Err(ModelError::Invalid(
                "facility instance data must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Recourse variable layout: flows y[i][j] at index `i * locations + j`,
/// then unmet-demand u[i] at `customers * locations + i`.
///
/// Rows: demand rows (one per customer), capacity rows (one per location),
/// then per-location outflow rows, switched to zero when the location is
/// disrupted.
pub fn build_facility_location(
    inst: &FacilityLocationInstance,
) -> Result<IndicatorProblem, ModelError> {
    inst.check()?;
    let nc = inst.customers();
    let nl = inst.locations();
    let n1 = nl;
    let n2 = nc * nl + nc;
    let np = nl;
    let m = nc + nl + nl;

    let first_stage = MixedIntegerSet::binary(n1);
    let recourse = MixedIntegerSet::continuous_nonneg(n2);
    let mut uncertainty = MixedIntegerSet::binary(np);
    let budget_terms: Vec<(usize, f64)> = (0..np).map(|j| (j, 1.0)).collect();
    uncertainty.add_row(&budget_terms, RowSense::Le, inst.budget as f64);

    let mut tech = Matrix::zeros(m, n1);
    let mut rec = Matrix::zeros(m, n2);
    let mut h0 = vec![0.0; m];
    // Demand rows: sum_j y_ij + u_i - h_i >= 0.
    for i in 0..nc {
        for j in 0..nl {
            rec[(i, i * nl + j)] = 1.0;
        }
        rec[(i, nc * nl + i)] = 1.0;
        h0[i] = inst.demands[i];
    }
    // Capacity rows: C_j x_j - sum_i y_ij >= 0.
    for j in 0..nl {
        let r = nc + j;
        tech[(r, j)] = inst.capacities[j];
        for i in 0..nc {
            rec[(r, i * nl + j)] = -1.0;
        }
    }
    // Outflow rows: sum_i y_ij >= 0, forced to zero when disrupted.
    let mut switch_on_one = vec![Vec::new(); np];
    let switch_on_zero = vec![Vec::new(); np];
    let mut suggested_big_m = vec![0.0; m];
    for j in 0..nl {
        let r = nc + nl + j;
        for i in 0..nc {
            rec[(r, i * nl + j)] = 1.0;
        }
        switch_on_one[j].push(r);
        suggested_big_m[r] = inst.capacities[j];
    }

    let mut cost_terms = vec![0.0; n2];
    for i in 0..nc {
        for j in 0..nl {
            cost_terms[i * nl + j] = inst.transport[(i, j)];
        }
        cost_terms[nc * nl + i] = inst.penalties[i];
    }

    // Optimal flows never exceed min(capacity, demand); unmet demand never
    // exceeds the demand itself.
    let mut box_hi = vec![0.0; n2];
    for i in 0..nc {
        for j in 0..nl {
            box_hi[i * nl + j] = inst.capacities[j].min(inst.demands[i]);
        }
        box_hi[nc * nl + i] = inst.demands[i];
    }

    Ok(IndicatorProblem {
        first_stage,
        recourse,
        uncertainty,
        first_cost: AffineMap::constant_only(inst.fixed_costs.clone(), np),
        recourse_cost: AffineMap::constant_only(cost_terms, np),
        tech,
        recourse_mat: rec,
        rhs_const: h0,
        switch_on_one,
        switch_on_zero,
        suggested_big_m,
        meta: ProblemMeta {
            relatively_complete_recourse: true,
            all_binary_scenarios_feasible: true,
            multiplier_hint: Some(MultiplierHint::ObjectiveMonotone),
            recourse_value_box: Some((vec![0.0; n2], box_hi)),
            family: Some("facility".into()),
            label: Some(inst.label.clone()),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::Ctx;
    use crate::ext::ExtReal;
    use crate::model::{scenario_expansion_solve, second_stage_value, validate, Problem};

    #[test]
    fn micro_row_count() {
        let p = build_facility_location(&FacilityLocationInstance::micro()).unwrap();
        assert_eq!(p.rows(), 1 + 2 + 2);
        assert_eq!(p.n2(), 2 + 1);
    }

    #[test]
    fn micro_second_stage_values() {
        let ctx = Ctx::default();
        let p = Problem::Indicator(
            build_facility_location(&FacilityLocationInstance::micro()).unwrap(),
        );
        let x = [1.0, 1.0];
        // Both open, nothing disrupted: serve from the cheap facility.
        let q00 = second_stage_value(&p, &x, &[0.0, 0.0], &ctx).unwrap();
        assert!(q00.value.approx_eq(ExtReal::Finite(12.0), 1e-6));
        // Facility 1 disrupted: serve 10 units from facility 2.
        let q10 = second_stage_value(&p, &x, &[1.0, 0.0], &ctx).unwrap();
        assert!(q10.value.approx_eq(ExtReal::Finite(22.0), 1e-6));
    }

    #[test]
    fn micro_oracle_value() {
        let ctx = Ctx::default();
        let p = Problem::Indicator(
            build_facility_location(&FacilityLocationInstance::micro()).unwrap(),
        );
        let res = scenario_expansion_solve(&p, &ctx).unwrap();
        assert_eq!(res.scenario_count, 3);
        assert!(res.value.approx_eq(ExtReal::Finite(22.0), 1e-6));
        let x = res.x.unwrap();
        assert!((x[0] - 1.0).abs() < 1e-6 && (x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn micro_validates_clean() {
        let ctx = Ctx::default();
        let p = Problem::Indicator(
            build_facility_location(&FacilityLocationInstance::micro()).unwrap(),
        );
        assert!(validate(&p, &ctx).is_empty());
    }

    #[test]
    fn full_budget_enumerates_cube() {
        let mut inst = FacilityLocationInstance::micro();
        inst.budget = 2;
        let p = build_facility_location(&inst).unwrap();
        let pts = crate::model::enumerate_uncertainty(&p.uncertainty, 20).unwrap();
        assert_eq!(pts.len(), 4);
    }
}
