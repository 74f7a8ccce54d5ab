//! Branch-and-bound over binary/integer variables.
//!
//! Branching rule: most-fractional variable first; node selection: best
//! bound. Indicator links are enforced by branching: at any node where a
//! link's binary is fixed at its activating value, the implied equality is
//! appended to that node's LP. A node whose LP solution is integral but has
//! a link binary sitting at its activating value with the implied equality
//! violated branches on that binary instead of becoming an incumbent.

use super::simplex;
use super::{
    LinRow, LinearModel, ObjSense, RowSense, SolveOutcome, SolveStatus, SolverError,
    ToleranceConfig, Limits,
};
use crate::ext::ExtReal;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}
impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// A node is its cumulative list of bound overrides along the path from the
/// root; everything else is recomputed when the node is expanded.
type Node = Vec<(usize, f64, f64)>;

pub(super) fn solve_milp_internal(
    model: &LinearModel,
    tol: &ToleranceConfig,
    limits: &Limits,
) -> Result<SolveOutcome, SolverError> {
    if model.is_pure_lp() {
        return simplex::solve_lp_internal(model, tol);
    }
    let maximize = model.objective.sense == ObjSense::Max;
    let mut work = model.clone();
    if maximize {
        for c in &mut work.objective.coeffs {
            *c = -*c;
        }
        work.objective.offset = -work.objective.offset;
        work.objective.sense = ObjSense::Min;
    }

    let mut out = branch_and_bound(&work, tol, limits)?;
    if maximize {
        out.value = out.value.neg();
        out.bound = out.bound.neg();
    }
    Ok(out)
}

fn branch_and_bound(
    model: &LinearModel,
    tol: &ToleranceConfig,
    limits: &Limits,
) -> Result<SolveOutcome, SolverError> {

    let base_lower: Vec<f64> = model.variables.iter().map(|v| v.lower).collect();
    let base_upper: Vec<f64> = model.variables.iter().map(|v| v.upper).collect();
    let base_rows = model.constraints.len();
    let mut scratch = model.clone();
    scratch.indicator_links.clear();

    let integer_vars: Vec<usize> = model
        .variables
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_integral_kind())
        .map(|(j, _)| j)
        .collect();

    let mut heap: BinaryHeap<Reverse<(OrdF64, u64)>> = BinaryHeap::new();
    let mut nodes: Vec<Option<Node>> = Vec::new();
    let mut next_id: u64 = 0;
    let mut node_count: u64 = 0;

    let mut incumbent: Option<Vec<f64>> = None;
    let mut incumbent_value = f64::INFINITY;
    let mut best_open_bound = f64::NEG_INFINITY;
    let mut limit_hit = false;
    let mut numerical: Option<String> = None;

    next_id += 1;
    nodes.push(Some(Vec::new()));
    heap.push(Reverse((OrdF64(f64::NEG_INFINITY), 0)));

    while let Some(Reverse((OrdF64(parent_bound), id))) = heap.pop() {
        let node = nodes[id as usize].take().expect("node queued twice");
        best_open_bound = parent_bound;

        let gap_abs = tol.relative_gap * (1.0 + incumbent_value.abs());
        if incumbent.is_some() && parent_bound >= incumbent_value - gap_abs {
            // Best-bound order: everything remaining is no better.
            best_open_bound = incumbent_value;
            break;
        }
        if limits.max_nodes.map_or(false, |m| node_count >= m) || limits.exceeded_time() {
            limit_hit = true;
            break;
        }

        apply_node(&mut scratch, model, &base_lower, &base_upper, base_rows, &node, tol);
        let lp = simplex::solve_lp_internal(&scratch, tol)?;
        node_count += 1;

        match lp.status {
            SolveStatus::Infeasible => continue,
            SolveStatus::Unbounded => {
                if node.is_empty() {
                    return handle_unbounded_root(model, &lp, tol, limits, node_count);
                }
                // Bounds only tighten below the root; an unbounded child with
                // a bounded root signals numerical trouble.
                numerical = Some("unbounded node below a bounded root".into());
                break;
            }
            SolveStatus::NumericalFailure => {
                numerical = Some("node LP failed numerically".into());
                break;
            }
            SolveStatus::LimitReached => unreachable!("LP solves have no limits"),
            SolveStatus::Optimal => {}
        }
        let x = lp.primal.as_ref().expect("optimal LP has primal");
        let lp_value = lp.value.unwrap_finite();

        let gap_abs = tol.relative_gap * (1.0 + incumbent_value.abs());
        if incumbent.is_some() && lp_value >= incumbent_value - gap_abs {
            continue;
        }

        // Most fractional integer variable.
        let mut branch_var: Option<(usize, f64)> = None;
        for &j in &integer_vars {
            let frac = (x[j] - x[j].round()).abs();
            if frac > tol.integrality {
                let score = (x[j] - x[j].floor()).min(x[j].ceil() - x[j]);
                if branch_var.map_or(true, |(_, s)| score > s + 1e-15) {
                    branch_var = Some((j, score));
                }
            }
        }

        // Integral: check indicator links whose binary sits at its activating
        // value without being fixed there yet.
        if branch_var.is_none() {
            for link in &model.indicator_links {
                let act = if link.activate_on { 1.0 } else { 0.0 };
                if (x[link.binary] - act).abs() <= tol.integrality {
                    let fixed = fixed_value(&scratch.variables[link.binary]);
                    if fixed.is_none() {
                        let residual: f64 = link
                            .row
                            .iter()
                            .zip(x)
                            .map(|(a, v)| a * v)
                            .sum::<f64>()
                            - link.rhs;
                        if residual.abs() > tol.feasibility {
                            branch_var = Some((link.binary, 0.0));
                            break;
                        }
                    }
                }
            }
        }

        match branch_var {
            None => {
                // Incumbent candidate: snap integers, accept if improving.
                let mut snapped = x.clone();
                for &j in &integer_vars {
                    snapped[j] = snapped[j].round();
                }
                if lp_value < incumbent_value - 1e-12 {
                    incumbent_value = lp_value;
                    incumbent = Some(snapped);
                }
            }
            Some((j, _)) => {
                let v = x[j];
                let (down_up, up_lo) = if (v - v.round()).abs() <= tol.integrality {
                    // Branching forced by an indicator link on an integral
                    // binary: children fix it to 0 and to 1.
                    (0.0, 1.0)
                } else {
                    (v.floor(), v.ceil())
                };
                for (child_lo, child_up) in [(None, Some(down_up)), (Some(up_lo), None)] {
                    let cur_lo = effective_bound(&node, &base_lower, j, true);
                    let cur_up = effective_bound(&node, &base_upper, j, false);
                    let new_lo = child_lo.map_or(cur_lo, |b| b.max(cur_lo));
                    let new_up = child_up.map_or(cur_up, |b| b.min(cur_up));
                    if new_lo > new_up + 1e-12 {
                        continue; // empty child
                    }
                    let mut overrides = node.clone();
                    overrides.push((j, new_lo, new_up));
                    heap.push(Reverse((OrdF64(lp_value), next_id)));
                    if nodes.len() <= next_id as usize {
                        nodes.resize_with(next_id as usize + 1, || None);
                    }
                    nodes[next_id as usize] = Some(overrides);
                    next_id += 1;
                }
            }
        }
    }

    if heap.is_empty() && !limit_hit && numerical.is_none() {
        best_open_bound = incumbent_value;
    }

    let elapsed = Duration::ZERO; // caller stamps the real elapsed time
    if let Some(msg) = numerical {
        log::warn!("branch-and-bound numerical failure: {msg}");
        return Ok(SolveOutcome {
            status: SolveStatus::NumericalFailure,
            value: ExtReal::Finite(0.0),
            primal: None,
            duals: None,
            farkas: None,
            ray: None,
            bound: ExtReal::NegInf,
            node_count,
            elapsed,
        });
    }

    let (status, value, bound) = if limit_hit {
        (
            SolveStatus::LimitReached,
            if incumbent.is_some() {
                ExtReal::Finite(incumbent_value)
            } else {
                ExtReal::PosInf
            },
            if best_open_bound.is_finite() {
                ExtReal::Finite(best_open_bound)
            } else {
                ExtReal::NegInf
            },
        )
    } else if incumbent.is_some() {
        (
            SolveStatus::Optimal,
            ExtReal::Finite(incumbent_value),
            ExtReal::Finite(incumbent_value),
        )
    } else {
        (SolveStatus::Infeasible, ExtReal::PosInf, ExtReal::PosInf)
    };

    Ok(SolveOutcome {
        status,
        value,
        primal: incumbent,
        duals: None,
        farkas: None,
        ray: None,
        bound,
        node_count,
        elapsed,
    })
}

fn fixed_value(v: &super::Variable) -> Option<f64> {
    (v.upper - v.lower <= 0.0).then_some(v.lower)
}

fn effective_bound(
    overrides: &[(usize, f64, f64)],
    base: &[f64],
    j: usize,
    lower: bool,
) -> f64 {
    overrides
        .iter()
        .rev()
        .find(|(var, _, _)| *var == j)
        .map(|&(_, lo, up)| if lower { lo } else { up })
        .unwrap_or(base[j])
}

/// Materialize a node's LP into the scratch model: path bounds plus the
/// implied equalities of every link whose binary is fixed at its activating
/// value.
fn apply_node(
    scratch: &mut LinearModel,
    model: &LinearModel,
    base_lower: &[f64],
    base_upper: &[f64],
    base_rows: usize,
    node: &Node,
    tol: &ToleranceConfig,
) {
    for j in 0..scratch.num_vars() {
        scratch.variables[j].lower = base_lower[j];
        scratch.variables[j].upper = base_upper[j];
    }
    for &(j, lo, up) in node {
        scratch.variables[j].lower = lo;
        scratch.variables[j].upper = up;
    }
    scratch.constraints.truncate(base_rows);
    for link in &model.indicator_links {
        let v = &scratch.variables[link.binary];
        if let Some(value) = fixed_value(v) {
            let act = if link.activate_on { 1.0 } else { 0.0 };
            if (value - act).abs() <= tol.integrality {
                scratch.constraints.push(LinRow {
                    coeffs: link.row.clone(),
                    sense: RowSense::Eq,
                    rhs: link.rhs,
                });
            }
        }
    }
}

/// Root LP unbounded: the MILP is declared unbounded when the ray is
/// integral in the integer variables (after a small rescale) and an integer
/// point exists; otherwise the bounded-by-variable-bounds assumption was
/// violated and the solve fails explicitly.
fn handle_unbounded_root(
    model: &LinearModel,
    lp: &SolveOutcome,
    tol: &ToleranceConfig,
    limits: &Limits,
    node_count: u64,
) -> Result<SolveOutcome, SolverError> {
    let ray = lp.ray.clone().unwrap_or_default();
    let integral_ray = (1..=64u32).any(|k| {
        model
            .variables
            .iter()
            .zip(&ray)
            .filter(|(v, _)| v.is_integral_kind())
            .all(|(_, d)| {
                let s = d * k as f64;
                (s - s.round()).abs() <= 1e-9
            })
    });
    if !integral_ray {
        return Err(SolverError::Numerical(
            "root LP unbounded along a ray fractional in the integer variables".into(),
        ));
    }
    let mut feas = model.clone();
    feas.objective.coeffs = vec![0.0; model.num_vars()];
    feas.objective.offset = 0.0;
    let probe = solve_milp_internal(&feas, tol, limits)?;
    Ok(match probe.status {
        SolveStatus::Optimal => SolveOutcome {
            status: SolveStatus::Unbounded,
            value: ExtReal::NegInf,
            primal: None,
            duals: None,
            farkas: None,
            ray: Some(ray),
            bound: ExtReal::NegInf,
            node_count: node_count + probe.node_count,
            elapsed: Duration::ZERO,
        },
        _ => SolveOutcome {
            status: SolveStatus::Infeasible,
            value: ExtReal::PosInf,
            primal: None,
            duals: None,
            farkas: None,
            ray: None,
            bound: ExtReal::PosInf,
            node_count: node_count + probe.node_count,
            elapsed: Duration::ZERO,
        },
    })
}
