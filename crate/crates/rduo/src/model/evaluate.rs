//! Second-stage evaluation and the brute-force scenario-expansion oracle.

use super::{enumerate_uncertainty, GeneralProblem, IndicatorProblem, ModelError, Problem};
use crate::context::Ctx;
use crate::ext::ExtReal;
use crate::solver::{ModelBuilder, ObjSense, RowSense, SolveStatus};

/// Result of evaluating one second-stage problem.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: ExtReal,
    pub minimizer: Option<Vec<f64>>,
    /// False when a solver limit stopped the search; the value is then only
    /// a bound, never an optimum.
    pub exact: bool,
}

/// Second-stage value `Q(x, xi)` including the first-stage cost term, with
/// the usual conventions: `+inf` infeasible, `-inf` unbounded. For the
/// indicator form the rows switched by active scenario entries are imposed
/// as equalities.
pub fn second_stage_value(
    problem: &Problem,
    x: &[f64],
    scenario: &[f64],
    ctx: &Ctx,
) -> Result<Evaluation, ModelError> {
    match problem {
        Problem::General(p) => second_stage_general(p, x, scenario, ctx),
        Problem::Indicator(p) => second_stage_indicator(p, x, scenario, ctx),
    }
}

pub(crate) fn second_stage_general(
    p: &GeneralProblem,
    x: &[f64],
    scenario: &[f64],
    ctx: &Ctx,
) -> Result<Evaluation, ModelError> {
    check_dims(x, p.n1(), scenario, p.np())?;
    let c = p.first_cost.eval(scenario);
    let d = p.recourse_cost.eval(scenario);
    let h = p.rhs.eval(scenario);
    let tx = p.tech.mul_vec(x);

    let mut b = ModelBuilder::new(ObjSense::Min);
    for (j, v) in p.recourse.variables.iter().enumerate() {
        b.add_var(*v, d[j]);
    }
    for row in &p.recourse.constraints {
        b.add_dense_row(row.coeffs.clone(), row.sense, row.rhs);
    }
    for i in 0..p.rows() {
        b.add_dense_row(p.recourse_mat.row(i).to_vec(), RowSense::Ge, h[i] - tx[i]);
    }
    b.set_offset(crate::matrix::dot(&c, x));
    let out = ctx.solve(&b.finish())?;
    Ok(evaluation_from(out))
}

pub(crate) fn second_stage_indicator(
    p: &IndicatorProblem,
    x: &[f64],
    scenario: &[f64],
    ctx: &Ctx,
) -> Result<Evaluation, ModelError> {
    check_dims(x, p.n1(), scenario, p.np())?;
    let c = p.first_cost.eval(scenario);
    let d = p.recourse_cost.eval(scenario);
    let tx = p.tech.mul_vec(x);

    let mut b = ModelBuilder::new(ObjSense::Min);
    for (j, v) in p.recourse.variables.iter().enumerate() {
        b.add_var(*v, d[j]);
    }
    for row in &p.recourse.constraints {
        b.add_dense_row(row.coeffs.clone(), row.sense, row.rhs);
    }
    // g(x, y) >= 0 with switched rows forced to equality.
    let mut forced = vec![false; p.rows()];
    for (j, &xi) in scenario.iter().enumerate() {
        for &i in p.switched_rows(j, xi > 0.5) {
            forced[i] = true;
        }
    }
    for i in 0..p.rows() {
        let sense = if forced[i] { RowSense::Eq } else { RowSense::Ge };
        b.add_dense_row(
            p.recourse_mat.row(i).to_vec(),
            sense,
            p.rhs_const[i] - tx[i],
        );
    }
    b.set_offset(crate::matrix::dot(&c, x));
    let out = ctx.solve(&b.finish())?;
    Ok(evaluation_from(out))
}

fn evaluation_from(out: crate::solver::SolveOutcome) -> Evaluation {
    Evaluation {
        value: out.value,
        minimizer: out.primal,
        exact: out.status != SolveStatus::LimitReached,
    }
}

fn check_dims(x: &[f64], n1: usize, scenario: &[f64], np: usize) -> Result<(), ModelError> {
    if x.len() != n1 {
        return Err(ModelError::Dimension(format!(
            "first-stage point has length {}, expected {n1}",
            x.len()
        )));
    }
    if scenario.len() != np {
        return Err(ModelError::Dimension(format!(
            "scenario has length {}, expected {np}",
            scenario.len()
        )));
    }
    Ok(())
}

/// Ground-truth result of the scenario-expansion oracle.
#[derive(Debug, Clone)]
pub struct ScenarioOracleResult {
    pub value: ExtReal,
    pub x: Option<Vec<f64>>,
    pub per_scenario: Vec<ExtReal>,
    pub scenario_count: usize,
}

/// Exact min-max value by full scenario expansion: one recourse copy per
/// enumerated scenario and an epigraph variable bounding every scenario's
/// cost. Refuses above the enumeration cap; `+inf` when no first-stage
/// decision is feasible for every scenario.
///
/// For instances whose expansion would carry many integer recourse copies,
/// the same fixed point is computed by a restricted expansion that grows the
/// scenario subset until no enumerated scenario beats the incumbent; both
/// paths are exact and purely primal.
pub fn scenario_expansion_solve(
    problem: &Problem,
    ctx: &Ctx,
) -> Result<ScenarioOracleResult, ModelError> {
    let scenarios = enumerate_uncertainty(problem.uncertainty(), ctx.enum_cap)?;
    if scenarios.is_empty() {
        return Err(ModelError::Invalid("empty uncertainty set".into()));
    }
    let integer_recourse = problem
        .recourse()
        .variables
        .iter()
        .filter(|v| v.is_integral_kind())
        .count();
    let monolith_weight = scenarios.len() * (1 + integer_recourse);
    let value_x = if monolith_weight <= 64 || integer_recourse == 0 {
        solve_expansion(problem, &scenarios, ctx)?
    } else {
        solve_expansion_restricted(problem, &scenarios, ctx)?
    };
    let (value, x) = value_x;

    let mut per_scenario = Vec::with_capacity(scenarios.len());
    if let Some(x) = &x {
        for s in &scenarios {
            per_scenario.push(second_stage_value(problem, x, s, ctx)?.value);
        }
    }
    Ok(ScenarioOracleResult {
        value,
        x,
        per_scenario,
        scenario_count: scenarios.len(),
    })
}

/// One monolithic model over all given scenarios; returns (value, x).
fn solve_expansion(
    problem: &Problem,
    scenarios: &[Vec<f64>],
    ctx: &Ctx,
) -> Result<(ExtReal, Option<Vec<f64>>), ModelError> {
    let first = problem.first_stage();
    let n1 = first.dim();
    let mut b = ModelBuilder::new(ObjSense::Min);
    for v in &first.variables {
        b.add_var(*v, 0.0);
    }
    let eta = b.add_var(crate::solver::Variable::free(), 1.0);
    for row in &first.constraints {
        let terms: Vec<(usize, f64)> = row
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(j, c)| (j, *c))
            .collect();
        b.add_row(&terms, row.sense, row.rhs);
    }
    for scenario in scenarios {
        add_scenario_block(&mut b, problem, scenario, eta);
    }
    let out = ctx.solve(&b.finish())?;
    match out.status {
        SolveStatus::Optimal => {
            let primal = out.primal.unwrap();
            Ok((out.value, Some(primal[..n1].to_vec())))
        }
        SolveStatus::Infeasible => Ok((ExtReal::PosInf, None)),
        SolveStatus::Unbounded => Ok((ExtReal::NegInf, None)),
        other => Err(ModelError::Invalid(format!(
            "scenario expansion stopped with status {other:?}"
        ))),
    }
}

/// Exact restricted-expansion loop: solve over a growing subset of the
/// scenarios, each round evaluating every enumerated scenario at the
/// incumbent and adding the worst violated one.
fn solve_expansion_restricted(
    problem: &Problem,
    scenarios: &[Vec<f64>],
    ctx: &Ctx,
) -> Result<(ExtReal, Option<Vec<f64>>), ModelError> {
    let mut active: Vec<usize> = vec![0];
    loop {
        let subset: Vec<Vec<f64>> = active.iter().map(|&i| scenarios[i].clone()).collect();
        let (restricted, x) = solve_expansion(problem, &subset, ctx)?;
        let Some(x) = x else {
            return Ok((restricted, None)); // infeasible or unbounded already
        };
        let restricted_value = restricted.unwrap_finite();

        let mut worst = ExtReal::NegInf;
        let mut worst_idx = None;
        for (i, s) in scenarios.iter().enumerate() {
            if active.contains(&i) {
                continue;
            }
            let v = second_stage_value(problem, &x, s, ctx)?.value;
            if v.total_cmp(&worst).is_gt() {
                worst = v;
                worst_idx = Some(i);
            }
        }
        let gap_tol = 1e-9 * (1.0 + restricted_value.abs());
        match (worst, worst_idx) {
            (ExtReal::PosInf, Some(i)) => active.push(i),
            (ExtReal::Finite(w), Some(i)) if w > restricted_value + gap_tol => active.push(i),
            _ => return Ok((ExtReal::Finite(restricted_value), Some(x))),
        }
        if active.len() > scenarios.len() {
            return Err(ModelError::Invalid(
                "restricted expansion failed to terminate".into(),
            ));
        }
    }
}

fn add_scenario_block(
    b: &mut ModelBuilder,
    problem: &Problem,
    scenario: &[f64],
    eta: usize,
) {
    match problem {
        Problem::General(p) => {
            let c = p.first_cost.eval(scenario);
            let d = p.recourse_cost.eval(scenario);
            let h = p.rhs.eval(scenario);
            let y0 = add_recourse_copy(b, &p.recourse);
            for i in 0..p.rows() {
                let mut terms: Vec<(usize, f64)> = nonzero(p.tech.row(i), 0);
                terms.extend(nonzero(p.recourse_mat.row(i), y0));
                b.add_row(&terms, RowSense::Ge, h[i]);
            }
            add_epigraph_row(b, eta, &c, &d, y0);
        }
        Problem::Indicator(p) => {
            let c = p.first_cost.eval(scenario);
            let d = p.recourse_cost.eval(scenario);
            let y0 = add_recourse_copy(b, &p.recourse);
            let mut forced = vec![false; p.rows()];
            for (j, &xi) in scenario.iter().enumerate() {
                for &i in p.switched_rows(j, xi > 0.5) {
                    forced[i] = true;
                }
            }
            for i in 0..p.rows() {
                let mut terms: Vec<(usize, f64)> = nonzero(p.tech.row(i), 0);
                terms.extend(nonzero(p.recourse_mat.row(i), y0));
                let sense = if forced[i] { RowSense::Eq } else { RowSense::Ge };
                b.add_row(&terms, sense, p.rhs_const[i]);
            }
            add_epigraph_row(b, eta, &c, &d, y0);
        }
    }
}

fn add_recourse_copy(b: &mut ModelBuilder, recourse: &super::MixedIntegerSet) -> usize {
    let y0 = b.num_vars();
    for v in &recourse.variables {
        b.add_var(*v, 0.0);
    }
    for row in &recourse.constraints {
        let terms: Vec<(usize, f64)> = nonzero(&row.coeffs, y0);
        b.add_row(&terms, row.sense, row.rhs);
    }
    y0
}

fn add_epigraph_row(b: &mut ModelBuilder, eta: usize, c: &[f64], d: &[f64], y0: usize) {
    // eta >= c.x + d.y
    let mut terms: Vec<(usize, f64)> = vec![(eta, 1.0)];
    terms.extend(c.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, -v)));
    terms.extend(
        d.iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, v)| (y0 + j, -v)),
    );
    b.add_row(&terms, RowSense::Ge, 0.0);
}

fn nonzero(coeffs: &[f64], offset: usize) -> Vec<(usize, f64)> {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, c)| (offset + j, *c))
        .collect()
}
