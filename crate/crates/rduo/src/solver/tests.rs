use super::*;
use crate::ext::ExtReal;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

#[test]
fn lp_single_variable_bound_row() {
    // min x1 s.t. x1 >= 3, x1 <= 10: optimal 3, dual on the >= row is 1.
    let mut b = ModelBuilder::new(ObjSense::Min);
    let x = b.add_var(Variable::free(), 1.0);
    b.add_row(&[(x, 1.0)], RowSense::Ge, 3.0);
    b.add_row(&[(x, 1.0)], RowSense::Le, 10.0);
    let out = solve_lp(&b.finish(), &tol()).unwrap();
    assert_eq!(out.status, SolveStatus::Optimal);
    assert!(out.value.approx_eq(ExtReal::Finite(3.0), 1e-9));
    let duals = out.duals.unwrap();
    assert!((duals[0] - 1.0).abs() < 1e-9);
    assert!(duals[1].abs() < 1e-9);
}

#[test]
fn lp_contradictory_rows_infeasible() {
    // min 0 s.t. x1 >= 1, x1 <= 0.
    let mut b = ModelBuilder::new(ObjSense::Min);
    let x = b.add_var(Variable::free(), 0.0);
    b.add_row(&[(x, 1.0)], RowSense::Ge, 1.0);
    b.add_row(&[(x, 1.0)], RowSense::Le, 0.0);
    let model = b.finish();
    let out = solve_lp(&model, &tol()).unwrap();
    assert_eq!(out.status, SolveStatus::Infeasible);
    assert_eq!(out.value, ExtReal::PosInf);
    assert!(out.farkas.is_some());
    farkas_or_incumbent_check(&model, &out, &tol()).unwrap();
}

#[test]
fn lp_open_ray_unbounded() {
    // min -x1 s.t. x1 >= 0 with no upper bound.
    let mut b = ModelBuilder::new(ObjSense::Min);
    let _x = b.add_var(Variable::nonneg(), -1.0);
    let out = solve_lp(&b.finish(), &tol()).unwrap();
    assert_eq!(out.status, SolveStatus::Unbounded);
    assert_eq!(out.value, ExtReal::NegInf);
    assert!(out.ray.is_some());
}

#[test]
fn lp_maximization_and_offset() {
    // max 2x + 3y + 1 s.t. x + y <= 4, x <= 3, x, y >= 0 -> 4*3 + 1 = 13 at y=4.
    let mut b = ModelBuilder::new(ObjSense::Max);
    let x = b.add_var(Variable::nonneg(), 2.0);
    let y = b.add_var(Variable::nonneg(), 3.0);
    b.set_offset(1.0);
    b.add_row(&[(x, 1.0), (y, 1.0)], RowSense::Le, 4.0);
    b.add_row(&[(x, 1.0)], RowSense::Le, 3.0);
    let out = solve_lp(&b.finish(), &tol()).unwrap();
    assert_eq!(out.status, SolveStatus::Optimal);
    assert!(out.value.approx_eq(ExtReal::Finite(13.0), 1e-9));
    let x = out.primal.unwrap();
    assert!((x[1] - 4.0).abs() < 1e-9);
}

#[test]
fn lp_equality_and_negative_bounds() {
    // min x + y s.t. x + 2y = 4, x in [-5, 5], y in [-5, 5] -> x=-5, y=4.5.
    let mut b = ModelBuilder::new(ObjSense::Min);
    let x = b.add_var(Variable::continuous(-5.0, 5.0), 1.0);
    let y = b.add_var(Variable::continuous(-5.0, 5.0), 1.0);
    b.add_row(&[(x, 1.0), (y, 2.0)], RowSense::Eq, 4.0);
    let out = solve_lp(&b.finish(), &tol()).unwrap();
    assert_eq!(out.status, SolveStatus::Optimal);
    assert!(out.value.approx_eq(ExtReal::Finite(-0.5), 1e-9));
}

#[test]
fn lp_degenerate_does_not_cycle() {
    // Classic degenerate instance; Bland must terminate.
    let mut b = ModelBuilder::new(ObjSense::Min);
    let v: Vec<usize> = (0..4)
        .map(|_| b.add_var(Variable::nonneg(), 0.0))
        .collect();
    b.add_obj(v[0], -0.75);
    b.add_obj(v[1], 150.0);
    b.add_obj(v[2], -0.02);
    b.add_obj(v[3], 6.0);
    b.add_row(
        &[(v[0], 0.25), (v[1], -60.0), (v[2], -0.04), (v[3], 9.0)],
        RowSense::Le,
        0.0,
    );
    b.add_row(
        &[(v[0], 0.5), (v[1], -90.0), (v[2], -0.02), (v[3], 3.0)],
        RowSense::Le,
        0.0,
    );
    b.add_row(&[(v[2], 1.0)], RowSense::Le, 1.0);
    let out = solve_lp(&b.finish(), &tol()).unwrap();
    assert_eq!(out.status, SolveStatus::Optimal);
    assert!(out.value.approx_eq(ExtReal::Finite(-0.05), 1e-9));
}

#[test]
fn milp_covering_pair() {
    // min x1+x2, binary, x1+x2 >= 1 -> 1.
    let mut b = ModelBuilder::new(ObjSense::Min);
    let x = b.add_var(Variable::binary(), 1.0);
    let y = b.add_var(Variable::binary(), 1.0);
    b.add_row(&[(x, 1.0), (y, 1.0)], RowSense::Ge, 1.0);
    let out = solve_milp(&b.finish(), &tol(), &Limits::none()).unwrap();
    assert_eq!(out.status, SolveStatus::Optimal);
    assert!(out.value.approx_eq(ExtReal::Finite(1.0), 1e-9));
}

#[test]
fn milp_cardinality_budget() {
    // max sum(xi) s.t. sum(xi) <= 2, binary -> 2.
    let mut b = ModelBuilder::new(ObjSense::Max);
    let v: Vec<usize> = (0..3).map(|_| b.add_var(Variable::binary(), 1.0)).collect();
    b.add_row(&[(v[0], 1.0), (v[1], 1.0), (v[2], 1.0)], RowSense::Le, 2.0);
    let out = solve_milp(&b.finish(), &tol(), &Limits::none()).unwrap();
    assert_eq!(out.status, SolveStatus::Optimal);
    assert!(out.value.approx_eq(ExtReal::Finite(2.0), 1e-9));
}

#[test]
fn milp_activated_indicator() {
    // min y s.t. (xi = 1 => y = 0), y >= -5, xi fixed to 1 -> 0.
    let mut b = ModelBuilder::new(ObjSense::Min);
    let y = b.add_var(Variable::continuous(-5.0, f64::INFINITY), 1.0);
    let xi = b.add_var(Variable::binary(), 0.0);
    b.add_indicator_link(xi, true, &[(y, 1.0)], 0.0);
    let mut model = b.finish();
    model.variables[xi].lower = 1.0; // fix xi = 1
    let out = solve_milp(&model, &tol(), &Limits::none()).unwrap();
    assert_eq!(out.status, SolveStatus::Optimal);
    assert!(out.value.approx_eq(ExtReal::Finite(0.0), 1e-9));
}

#[test]
fn milp_indicator_branching_choice() {
    // min y + 3 xi s.t. (xi = 0 => y = 8), y in [0, 10].
    // xi = 0 forces y = 8 (cost 8); xi = 1 allows y = 0 (cost 3).
    let mut b = ModelBuilder::new(ObjSense::Min);
    let y = b.add_var(Variable::continuous(0.0, 10.0), 1.0);
    let xi = b.add_var(Variable::binary(), 3.0);
    b.add_indicator_link(xi, false, &[(y, 1.0)], 8.0);
    let model = b.finish();
    let out = solve_milp(&model, &tol(), &Limits::none()).unwrap();
    assert_eq!(out.status, SolveStatus::Optimal);
    assert!(
        out.value.approx_eq(ExtReal::Finite(3.0), 1e-9),
        "got {}",
        out.value
    );
    let x = out.primal.unwrap();
    assert!((x[xi] - 1.0).abs() < 1e-9);
    // The xi = 0 side must respect the implied equality.
    let mut forced = model.clone();
    forced.variables[xi].upper = 0.0;
    let out0 = solve_milp(&forced, &tol(), &Limits::none()).unwrap();
    assert!(out0.value.approx_eq(ExtReal::Finite(8.0), 1e-9));
    let x0 = out0.primal.unwrap();
    assert!((x0[y] - 8.0).abs() < 1e-6);
}

#[test]
fn milp_integer_general_branching() {
    // max 3x + 2y s.t. 2x + y <= 7.3, x <= 2.6, x,y integer >= 0.
    let mut b = ModelBuilder::new(ObjSense::Max);
    let x = b.add_var(
        Variable {
            lower: 0.0,
            upper: 2.6,
            integrality: Integrality::Integer,
        },
        3.0,
    );
    let y = b.add_var(
        Variable {
            lower: 0.0,
            upper: f64::INFINITY,
            integrality: Integrality::Integer,
        },
        2.0,
    );
    b.add_row(&[(x, 2.0), (y, 1.0)], RowSense::Le, 7.3);
    let out = solve_milp(&b.finish(), &tol(), &Limits::none()).unwrap();
    assert_eq!(out.status, SolveStatus::Optimal);
    // x=0, y=7 -> 14 beats x=2, y=3 -> 12.
    assert!(out.value.approx_eq(ExtReal::Finite(14.0), 1e-9));
}

#[test]
fn milp_infeasible() {
    let mut b = ModelBuilder::new(ObjSense::Min);
    let x = b.add_var(Variable::binary(), 1.0);
    let y = b.add_var(Variable::binary(), 1.0);
    b.add_row(&[(x, 1.0), (y, 1.0)], RowSense::Ge, 3.0);
    let out = solve_milp(&b.finish(), &tol(), &Limits::none()).unwrap();
    assert_eq!(out.status, SolveStatus::Infeasible);
    assert_eq!(out.value, ExtReal::PosInf);
}

#[test]
fn milp_unbounded_continuous_ray() {
    // min -z s.t. z >= 0 free above, one binary present.
    let mut b = ModelBuilder::new(ObjSense::Min);
    let z = b.add_var(Variable::nonneg(), -1.0);
    let x = b.add_var(Variable::binary(), 0.0);
    b.add_row(&[(x, 1.0)], RowSense::Le, 1.0);
    let _ = z;
    let out = solve_milp(&b.finish(), &tol(), &Limits::none()).unwrap();
    assert_eq!(out.status, SolveStatus::Unbounded);
    assert_eq!(out.value, ExtReal::NegInf);
}

#[test]
fn milp_node_limit_returns_bound_not_optimality() {
    let mut b = ModelBuilder::new(ObjSense::Min);
    let vars: Vec<usize> = (0..10).map(|_| b.add_var(Variable::binary(), 1.0)).collect();
    let terms: Vec<(usize, f64)> = vars.iter().map(|&v| (v, 1.0)).collect();
    b.add_row(&terms, RowSense::Ge, 5.5);
    let limits = Limits {
        max_nodes: Some(1),
        deadline: None,
    };
    let out = solve_milp(&b.finish(), &tol(), &limits).unwrap();
    assert_eq!(out.status, SolveStatus::LimitReached);
}

#[test]
fn determinism_bitwise() {
    let mut b = ModelBuilder::new(ObjSense::Min);
    let vars: Vec<usize> = (0..8).map(|_| b.add_var(Variable::binary(), 0.0)).collect();
    for (k, &v) in vars.iter().enumerate() {
        b.add_obj(v, 1.0 + 0.3 * k as f64);
    }
    let terms: Vec<(usize, f64)> = vars
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, 1.0 + (k % 3) as f64))
        .collect();
    b.add_row(&terms, RowSense::Ge, 6.7);
    let model = b.finish();
    let a = solve_milp(&model, &tol(), &Limits::none()).unwrap();
    let c = solve_milp(&model, &tol(), &Limits::none()).unwrap();
    assert_eq!(a.status, c.status);
    assert_eq!(a.value.unwrap_finite().to_bits(), c.value.unwrap_finite().to_bits());
    assert_eq!(a.node_count, c.node_count);
}

#[test]
fn check_rejects_tampered_primal() {
    let mut b = ModelBuilder::new(ObjSense::Min);
    let x = b.add_var(Variable::free(), 1.0);
    b.add_row(&[(x, 1.0)], RowSense::Ge, 3.0);
    b.add_row(&[(x, 1.0)], RowSense::Le, 10.0);
    let model = b.finish();
    let mut out = solve_lp(&model, &tol()).unwrap();
    out.primal.as_mut().unwrap()[0] += 1.0;
    assert!(farkas_or_incumbent_check(&model, &out, &tol()).is_err());
}

#[test]
fn check_verifies_hand_built_farkas() {
    // x >= 1 and x <= 0: y = (1, -1) gives y.b = 1 > sup over x of 0 = 0.
    let mut b = ModelBuilder::new(ObjSense::Min);
    let x = b.add_var(Variable::free(), 0.0);
    b.add_row(&[(x, 1.0)], RowSense::Ge, 1.0);
    b.add_row(&[(x, 1.0)], RowSense::Le, 0.0);
    let model = b.finish();
    let out = SolveOutcome {
        status: SolveStatus::Infeasible,
        value: ExtReal::PosInf,
        primal: None,
        duals: None,
        farkas: Some(vec![1.0, -1.0]),
        ray: None,
        bound: ExtReal::PosInf,
        node_count: 1,
        elapsed: std::time::Duration::ZERO,
    };
    farkas_or_incumbent_check(&model, &out, &tol()).unwrap();
}

#[test]
fn canonical_round_trip() {
    let mut b = ModelBuilder::new(ObjSense::Max);
    let x = b.add_var(Variable::binary(), 1.5);
    let y = b.add_var(Variable::continuous(-2.5, f64::INFINITY), -0.125);
    b.set_offset(0.75);
    b.add_row(&[(x, 2.0), (y, -1.0)], RowSense::Le, 3.5);
    b.add_indicator_link(x, true, &[(y, 1.0)], 0.0);
    let model = b.finish();
    let text = model_to_canonical_text(&model);
    let back = model_from_canonical_text(&text).unwrap();
    assert_eq!(model.num_vars(), back.num_vars());
    assert_eq!(model.objective.offset, back.objective.offset);
    assert_eq!(model.constraints[0].coeffs, back.constraints[0].coeffs);
    assert_eq!(model.indicator_links[0].binary, back.indicator_links[0].binary);
    // Solving both yields identical results.
    let a = solve_milp(&model, &tol(), &Limits::none()).unwrap();
    let c = solve_milp(&back, &tol(), &Limits::none()).unwrap();
    assert_eq!(a.value.unwrap_finite(), c.value.unwrap_finite());
}

#[test]
fn malformed_model_rejected() {
    let mut model = LinearModel::minimize(2);
    model.constraints.push(LinRow {
        coeffs: vec![1.0], // wrong arity
        sense: RowSense::Le,
        rhs: 1.0,
    });
    assert!(matches!(
        solve_lp(&model, &tol()),
        Err(SolverError::Malformed(_))
    ));
}
