//! Structural validation with findings, not errors: dimension checks, an
//! empty-scenario-set check, and a bounded-recourse-objective probe at a few
//! scenario points. Probe failures are findings; probe passes are not
//! certificates.

use super::{enumerate_uncertainty, GeneralProblem, IndicatorProblem, Problem};
use crate::context::Ctx;
use crate::solver::{ModelBuilder, ObjSense, SolveStatus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FindingKind {
    Dimension,
    UnboundedRecourseObjective,
    EmptyUncertainty,
    UnboundedFirstStage,
}

#[derive(Debug, Clone)]
pub struct Finding {
    pub kind: FindingKind,
    pub message: String,
}

fn finding(kind: FindingKind, message: String) -> Finding {
    Finding { kind, message }
}

/// Report structural problems. The caller decides what to do with them.
pub fn validate(problem: &Problem, ctx: &Ctx) -> Vec<Finding> {
    let mut out = Vec::new();
    match problem {
        Problem::General(p) => validate_general(p, &mut out),
        Problem::Indicator(p) => validate_indicator(p, &mut out),
    }
    if !out.iter().any(|f| f.kind == FindingKind::Dimension) {
        probe_uncertainty(problem, ctx, &mut out);
        probe_recourse_objective(problem, ctx, &mut out);
        probe_first_stage_bounds(problem, &mut out);
    }
    out
}

fn validate_general(p: &GeneralProblem, out: &mut Vec<Finding>) {
    let (n1, n2, np, m) = (p.n1(), p.n2(), p.np(), p.rows());
    let mut dim = |ok: bool, msg: String| {
        if !ok {
            out.push(finding(FindingKind::Dimension, msg));
        }
    };
    dim(
        p.tech.cols() == n1,
        format!("coupling matrix has {} columns for {} first-stage variables", p.tech.cols(), n1),
    );
    dim(
        p.recourse_mat.rows() == m && p.recourse_mat.cols() == n2,
        format!(
            "recourse matrix is {}x{}, expected {m}x{n2}",
            p.recourse_mat.rows(),
            p.recourse_mat.cols()
        ),
    );
    dim(
        p.first_cost.output_dim() == n1 && p.first_cost.scenario_dim() == np,
        "first-stage cost map shape mismatch".into(),
    );
    dim(
        p.recourse_cost.output_dim() == n2 && p.recourse_cost.scenario_dim() == np,
        "recourse cost map shape mismatch".into(),
    );
    dim(
        p.rhs.output_dim() == m && p.rhs.scenario_dim() == np,
        "right-hand-side map shape mismatch".into(),
    );
    if let Some(split) = &p.recourse_split {
        let mut seen = vec![0u8; n2];
        for &j in split.continuous.iter().chain(&split.discrete) {
            if j >= n2 {
                out.push(finding(
                    FindingKind::Dimension,
                    format!("recourse split references variable {j} of {n2}"),
                ));
                return;
            }
            seen[j] += 1;
        }
        if seen.iter().any(|&c| c != 1) {
            out.push(finding(
                FindingKind::Dimension,
                "recourse split is not a partition".into(),
            ));
        }
    }
    if !p.uncertainty.all_binary() {
        out.push(finding(
            FindingKind::Dimension,
            "uncertainty set has non-binary variables".into(),
        ));
    }
}

fn validate_indicator(p: &IndicatorProblem, out: &mut Vec<Finding>) {
    let (n1, n2, np, m) = (p.n1(), p.n2(), p.np(), p.rows());
    let mut dim = |ok: bool, msg: String| {
        if !ok {
            out.push(finding(FindingKind::Dimension, msg));
        }
    };
    dim(
        p.tech.cols() == n1,
        format!("coupling matrix has {} columns for {} first-stage variables", p.tech.cols(), n1),
    );
    dim(
        p.recourse_mat.rows() == m && p.recourse_mat.cols() == n2,
        format!(
            "recourse matrix is {}x{}, expected {m}x{n2}",
            p.recourse_mat.rows(),
            p.recourse_mat.cols()
        ),
    );
    dim(p.rhs_const.len() == m, "base right-hand side length mismatch".into());
    dim(
        p.first_cost.output_dim() == n1 && p.first_cost.scenario_dim() == np,
        "first-stage cost map shape mismatch".into(),
    );
    dim(
        p.recourse_cost.output_dim() == n2 && p.recourse_cost.scenario_dim() == np,
        "recourse cost map shape mismatch".into(),
    );
    dim(
        p.switch_on_one.len() == np && p.switch_on_zero.len() == np,
        "switch families must have one entry per scenario coordinate".into(),
    );
    for fam in p.switch_on_one.iter().chain(&p.switch_on_zero) {
        for &i in fam {
            if i >= m {
                out.push(finding(
                    FindingKind::Dimension,
                    format!("switch family references row {i} of {m}"),
                ));
            }
        }
    }
    if !p.uncertainty.all_binary() {
        out.push(finding(
            FindingKind::Dimension,
            "uncertainty set has non-binary variables".into(),
        ));
    }
}

fn probe_uncertainty(problem: &Problem, ctx: &Ctx, out: &mut Vec<Finding>) {
    let set = problem.uncertainty();
    match enumerate_uncertainty(set, ctx.enum_cap) {
        Ok(points) => {
            if points.is_empty() {
                out.push(finding(
                    FindingKind::EmptyUncertainty,
                    "no binary point satisfies the uncertainty constraints".into(),
                ));
            }
        }
        Err(_) => {
            // Above the cap: one MILP feasibility probe.
            let mut b = ModelBuilder::new(ObjSense::Min);
            for v in &set.variables {
                b.add_var(*v, 0.0);
            }
            for row in &set.constraints {
                b.add_dense_row(row.coeffs.clone(), row.sense, row.rhs);
            }
            if let Ok(sol) = ctx.solve(&b.finish()) {
                if sol.status == SolveStatus::Infeasible {
                    out.push(finding(
                        FindingKind::EmptyUncertainty,
                        "uncertainty set is empty".into(),
                    ));
                }
            }
        }
    }
}

/// Bounded-objective probe over the recourse set at scenario 0, the all-ones
/// scenario, and two seeded random binary points.
fn probe_recourse_objective(problem: &Problem, ctx: &Ctx, out: &mut Vec<Finding>) {
    let np = problem.uncertainty().dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut probes = vec![vec![0.0; np], vec![1.0; np]];
    for _ in 0..2 {
        probes.push((0..np).map(|_| f64::from(rng.gen_range(0..=1))).collect());
    }
    let (recourse, cost) = match problem {
        Problem::General(p) => (&p.recourse, &p.recourse_cost),
        Problem::Indicator(p) => (&p.recourse, &p.recourse_cost),
    };
    for scenario in probes {
        let d = cost.eval(&scenario);
        let mut b = ModelBuilder::new(ObjSense::Min);
        for (j, v) in recourse.variables.iter().enumerate() {
            b.add_var(*v, d[j]);
        }
        for row in &recourse.constraints {
            b.add_dense_row(row.coeffs.clone(), row.sense, row.rhs);
        }
        match ctx.solve(&b.finish()) {
            Ok(sol) if sol.status == SolveStatus::Unbounded => {
                out.push(finding(
                    FindingKind::UnboundedRecourseObjective,
                    format!(
                        "recourse objective unbounded below at scenario {scenario:?} (sufficiently-expensive-recourse assumption violated)"
                    ),
                ));
                return;
            }
            _ => {}
        }
    }
}

fn probe_first_stage_bounds(problem: &Problem, out: &mut Vec<Finding>) {
    let x = problem.first_stage();
    let boxed = x
        .variables
        .iter()
        .all(|v| v.lower.is_finite() && v.upper.is_finite());
    if !boxed {
        out.push(finding(
            FindingKind::UnboundedFirstStage,
            "first-stage set lacks finite bounds on some variable (compactness assumed)".into(),
        ));
    }
}
