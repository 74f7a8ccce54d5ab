//! Capacity expansion on a network with uncertain edge failures.
//!
//! First stage installs additional edge capacity; each scenario fails up to
//! `budget` edges (never isolating a terminal completely, per the degree
//! rows); recourse routes a single commodity through forward/backward edge
//! flows. There is no penalty variable, so relatively complete recourse does
//! not hold: a failed set of edges can make routing impossible.

use crate::matrix::Matrix;
use crate::model::{
    AffineMap, IndicatorProblem, MixedIntegerSet, ModelError, MultiplierHint, ProblemMeta,
};
use crate::solver::RowSense;

#[derive(Debug, Clone)]
pub struct NetworkDesignInstance {
    /// Net inflow required per node; must sum to zero. Positive entries are
    /// demand (terminal) nodes, negative entries supply nodes.
    pub node_demands: Vec<f64>,
    /// Edge endpoints (origin, destination) into `node_demands`.
    pub edges: Vec<(usize, usize)>,
    /// Pre-installed capacity per edge.
    pub preinstalled: Vec<f64>,
    /// Per-unit capacity installation cost per edge.
    pub cost_install: Vec<f64>,
    /// Per-unit transport cost per edge (either direction).
    pub cost_flow: Vec<f64>,
    /// Maximum number of simultaneous edge failures.
    pub budget: usize,
    pub label: String,
}

impl NetworkDesignInstance {
    pub fn nodes(&self) -> usize {
        self.node_demands.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Total demand volume: an upper bound on any single edge's useful flow.
    pub fn total_demand(&self) -> f64 {
        self.node_demands.iter().filter(|b| **b > 0.0).sum()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .filter(|(o, d)| *o == node || *d == node)
            .count()
    }

    /// Two nodes joined by one edge carrying demand `5` toward node 0.
    pub fn two_node_link() -> Self {
        NetworkDesignInstance {
            node_demands: vec![5.0, -5.0],
            edges: vec![(1, 0)],
            preinstalled: vec![0.0],
            cost_install: vec![1.0],
            cost_flow: vec![1.0],
            budget: 1,
            label: "network-two-node".into(),
        }
    }

    fn check(&self) -> Result<(), ModelError> {
        let n = self.nodes();
        let e = self.num_edges();
        if self.preinstalled.len() != e || self.cost_install.len() != e || self.cost_flow.len() != e
        {
            return Err(ModelError::Dimension(
                "network instance edge arrays disagree".into(),
            ));
        }
        if self.edges.iter().any(|(o, d)| *o >= n || *d >= n || o == d) {
            return Err(ModelError::Invalid("bad edge endpoints".into()));
        }
        let balance: f64 = self.node_demands.iter().sum();
        if balance.abs() > 1e-9 {
            return Err(ModelError::Invalid(format!(
                "node demands must balance, sum is {balance}"
            )));
        }
        Ok(())
    }
}

/// Recourse layout: forward flows at `e`, backward flows at `num_edges + e`.
///
/// Rows: flow-balance rows (one per node, `>=` suffices under balanced
/// demands), forward/backward capacity rows, then forward/backward flow
/// rows, switched to zero when the edge fails.
pub fn build_network_design(
    inst: &NetworkDesignInstance,
) -> Result<IndicatorProblem, ModelError> {
    inst.check()?;
    let nv = inst.nodes();
    let ne = inst.num_edges();
    let n1 = ne;
    let n2 = 2 * ne;
    let np = ne;
    let m = nv + 2 * ne + 2 * ne;
    let volume = inst.total_demand();

    // Compact first stage: installed capacity beyond the total demand volume
    // is never useful.
    let mut first_stage = MixedIntegerSet::continuous_nonneg(n1);
    for v in &mut first_stage.variables {
        v.upper = volume;
    }
    let recourse = MixedIntegerSet::continuous_nonneg(n2);

    let mut uncertainty = MixedIntegerSet::binary(np);
    let budget_terms: Vec<(usize, f64)> = (0..np).map(|e| (e, 1.0)).collect();
    uncertainty.add_row(&budget_terms, RowSense::Le, inst.budget as f64);
    for i in 0..nv {
        // Degree rows keep at least one edge alive at each terminal. A
        // degree-1 terminal gets no row: its lone edge may still fail, and
        // the resulting infeasibility is for the algorithms to detect.
        if inst.node_demands[i] != 0.0 && inst.degree(i) >= 2 {
            let incident: Vec<(usize, f64)> = inst
                .edges
                .iter()
                .enumerate()
                .filter(|(_, (o, d))| *o == i || *d == i)
                .map(|(e, _)| (e, 1.0))
                .collect();
            uncertainty.add_row(&incident, RowSense::Le, inst.degree(i) as f64 - 1.0);
        }
    }

    let mut tech = Matrix::zeros(m, n1);
    let mut rec = Matrix::zeros(m, n2);
    let mut h0 = vec![0.0; m];
    // Flow balance: net inflow at node i >= b_i.
    for (e, &(o, d)) in inst.edges.iter().enumerate() {
        rec[(d, e)] += 1.0;
        rec[(d, ne + e)] -= 1.0;
        rec[(o, e)] -= 1.0;
        rec[(o, ne + e)] += 1.0;
    }
    for i in 0..nv {
        h0[i] = inst.node_demands[i];
    }
    // Capacity rows: x_e + p_e - flow >= 0.
    for e in 0..ne {
        let rf = nv + e;
        let rb = nv + ne + e;
        tech[(rf, e)] = 1.0;
        rec[(rf, e)] = -1.0;
        h0[rf] = -inst.preinstalled[e];
        tech[(rb, e)] = 1.0;
        rec[(rb, ne + e)] = -1.0;
        h0[rb] = -inst.preinstalled[e];
    }
    // Flow rows: y >= 0, forced to zero on failure.
    let mut switch_on_one = vec![Vec::new(); np];
    let switch_on_zero = vec![Vec::new(); np];
    let mut suggested_big_m = vec![0.0; m];
    for e in 0..ne {
        let rf = nv + 2 * ne + e;
        let rb = nv + 3 * ne + e;
        rec[(rf, e)] = 1.0;
        rec[(rb, ne + e)] = 1.0;
        switch_on_one[e].push(rf);
        switch_on_one[e].push(rb);
        let cap = volume + inst.preinstalled[e];
        suggested_big_m[rf] = cap;
        suggested_big_m[rb] = cap;
    }

    let mut flow_costs = vec![0.0; n2];
    for e in 0..ne {
        flow_costs[e] = inst.cost_flow[e];
        flow_costs[ne + e] = inst.cost_flow[e];
    }
    let mut box_hi = vec![0.0; n2];
    for e in 0..ne {
        let cap = volume + inst.preinstalled[e];
        box_hi[e] = cap;
        box_hi[ne + e] = cap;
    }

    Ok(IndicatorProblem {
        first_stage,
        recourse,
        uncertainty,
        first_cost: AffineMap::constant_only(inst.cost_install.clone(), np),
        recourse_cost: AffineMap::constant_only(flow_costs, np),
        tech,
        recourse_mat: rec,
        rhs_const: h0,
        switch_on_one,
        switch_on_zero,
        suggested_big_m,
        meta: ProblemMeta {
            relatively_complete_recourse: false,
            all_binary_scenarios_feasible: false,
            multiplier_hint: Some(MultiplierHint::Box),
            recourse_value_box: Some((vec![0.0; n2], box_hi)),
            family: Some("network".into()),
            label: Some(inst.label.clone()),
        },
    })
}

/// Edge-list import. Format: a header `nodes M edges N`, then `N_nodes`
/// lines `id demand`, then `N_edges` lines `id src dst capacity cx cy`.
pub fn parse_edge_list(text: &str, budget: usize, label: &str) -> Result<NetworkDesignInstance, ModelError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| ModelError::Invalid("empty edge list".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "nodes" || toks[2] != "edges" {
        return Err(ModelError::Invalid(
            "edge-list header must be 'nodes M edges N'".into(),
        ));
    }
    let nv: usize = toks[1]
        .parse()
        .map_err(|_| ModelError::Invalid("bad node count".into()))?;
    let ne: usize = toks[3]
        .parse()
        .map_err(|_| ModelError::Invalid("bad edge count".into()))?;

    let mut node_demands = vec![0.0; nv];
    for k in 0..nv {
        let line = lines
            .next()
            .ok_or_else(|| ModelError::Invalid(format!("missing node line {k}")))?;
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 2 {
            return Err(ModelError::Invalid(format!("node line '{line}' malformed")));
        }
        let id: usize = t[0]
            .parse()
            .map_err(|_| ModelError::Invalid(format!("bad node id in '{line}'")))?;
        if id >= nv {
            return Err(ModelError::Invalid(format!("node id {id} out of range")));
        }
        node_demands[id] = t[1]
            .parse()
            .map_err(|_| ModelError::Invalid(format!("bad demand in '{line}'")))?;
    }
    let mut edges = vec![(0usize, 0usize); ne];
    let mut preinstalled = vec![0.0; ne];
    let mut cost_install = vec![0.0; ne];
    let mut cost_flow = vec![0.0; ne];
    for k in 0..ne {
        let line = lines
            .next()
            .ok_or_else(|| ModelError::Invalid(format!("missing edge line {k}")))?;
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 6 {
            return Err(ModelError::Invalid(format!("edge line '{line}' malformed")));
        }
        let id: usize = t[0]
            .parse()
            .map_err(|_| ModelError::Invalid(format!("bad edge id in '{line}'")))?;
        if id >= ne {
            return Err(ModelError::Invalid(format!("edge id {id} out of range")));
        }
        let parse = |s: &str| -> Result<f64, ModelError> {
            s.parse()
                .map_err(|_| ModelError::Invalid(format!("bad number in '{line}'")))
        };
        edges[id] = (
            t[1].parse()
                .map_err(|_| ModelError::Invalid(format!("bad src in '{line}'")))?,
            t[2].parse()
                .map_err(|_| ModelError::Invalid(format!("bad dst in '{line}'")))?,
        );
        preinstalled[id] = parse(t[3])?;
        cost_install[id] = parse(t[4])?;
        cost_flow[id] = parse(t[5])?;
    }
    let inst = NetworkDesignInstance {
        node_demands,
        edges,
        preinstalled,
        cost_install,
        cost_flow,
        budget,
        label: label.to_string(),
    };
    inst.check()?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::Ctx;
    use crate::ext::ExtReal;
    use crate::model::{enumerate_uncertainty, second_stage_value, Problem};

    #[test]
    fn two_node_uncertainty_is_pair() {
        let p = build_network_design(&NetworkDesignInstance::two_node_link()).unwrap();
        let pts = enumerate_uncertainty(&p.uncertainty, 20).unwrap();
        assert_eq!(pts, vec![vec![0.0], vec![1.0]]);
    }

    #[test]
    fn forced_infeasibility_when_capacity_missing() {
        let mut inst = NetworkDesignInstance::two_node_link();
        inst.preinstalled = vec![0.0];
        let p = Problem::Indicator(build_network_design(&inst).unwrap());
        let ctx = Ctx::default();
        // Zero installed capacity: flow of 5 cannot be carried.
        let q = second_stage_value(&p, &[0.0], &[0.0], &ctx).unwrap();
        assert_eq!(q.value, ExtReal::PosInf);
        // Enough capacity: cost = install 0 (given x) + flow 5.
        let q = second_stage_value(&p, &[5.0], &[0.0], &ctx).unwrap();
        assert!(q.value.approx_eq(ExtReal::Finite(10.0), 1e-6));
    }

    #[test]
    fn triangle_degree_rows_filter() {
        // Triangle with one terminal (node 0) of degree 2, budget 2: the
        // degree row forbids failing both of node 0's incident edges.
        let inst = NetworkDesignInstance {
            node_demands: vec![4.0, -4.0, 0.0],
            edges: vec![(1, 0), (2, 0), (1, 2)],
            preinstalled: vec![0.0; 3],
            cost_install: vec![1.0; 3],
            cost_flow: vec![1.0; 3],
            budget: 2,
            label: "triangle".into(),
        };
        let p = build_network_design(&inst).unwrap();
        let pts = enumerate_uncertainty(&p.uncertainty, 20).unwrap();
        assert!(pts.iter().all(|s| s[0] + s[1] < 2.0));
        // Direct filter over the 8 binary points: budget removes (1,1,1);
        // degree rows remove (1,1,0); node 1's degree row removes (1,0,1)
        // and node 0's nothing else: check the exact set size.
        assert!(pts.contains(&vec![0.0, 1.0, 1.0]));
        assert_eq!(pts.len(), 5);
    }

    #[test]
    fn edge_list_round_trip() {
        let text = "nodes 2 edges 1\n0 5\n1 -5\n0 1 0 0 1 1\n";
        let inst = parse_edge_list(text, 1, "import").unwrap();
        assert_eq!(inst.nodes(), 2);
        assert_eq!(inst.edges[0], (1, 0));
        assert!(parse_edge_list("nodes 2 edges 1\n0 5\n", 1, "x").is_err());
    }

    #[test]
    fn unbalanced_demands_rejected() {
        let mut inst = NetworkDesignInstance::two_node_link();
        inst.node_demands = vec![5.0, -4.0];
        assert!(build_network_design(&inst).is_err());
    }
}
