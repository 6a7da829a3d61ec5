//! Two-stage Steiner tree. Scenario `s` announces a terminal set `S_s`
//! that must be connected to the root; first-stage edges cost their base
//! price, second-stage edges pay it times `inflation_s`.
//!
//! The relaxation routes one unit of flow from every terminal to the
//! root, split into a first-stage part `r1(t, a)` on directed arcs `a`
//! (shared by every scenario containing `t`) and a per-scenario part
//! `r2(s, t, a)`:
//!
//! ```text
//! out(t) - in(t) >= 1                  combined flow leaves the terminal
//! out(v) - in(v)  = 0                  combined, at v not in {t, root}
//! in(v) <= out(v)                      first-stage part only: once flow
//!                                      boards first-stage edges it stays
//!                                      on them all the way to the root
//! r1(t, a) <= x1(e),  r2(s, t, a) <= x2(s, e)
//! cost_s = sum_e c_e x1(e) + inflation_s * sum_e c_e x2(s, e)
//! ```
//!
//! Rounding keeps edges with `x1 >= 1/4`, prunes the root's component to
//! a spanning tree of itself, and connects each leftover terminal by a
//! shortest path that travels free on already-owned edges. Per scenario
//! this stays within a constant factor (at most 30) of the fractional
//! scenario cost.

use crate::graph::{self, Graph, UnionFind};
use crate::lp::{self, LinExpr, LinearProgram, LpSolution, LpStatus, Row, TruncatedEncoding};
use crate::objective::ScenarioDistribution;
use crate::{Error, Result, TwoStageEdgeSolution};

/// First-stage inclusion threshold used by the rounding.
const KEEP_THRESHOLD: f64 = 0.25;

#[derive(Debug, Clone)]
pub struct SteinerInstance {
    graph: Graph,
    root: usize,
    /// Terminal sets per scenario, deduplicated and sorted; may contain
    /// the root, which every routine skips.
    scenarios: Vec<Vec<usize>>,
    inflation: Vec<f64>,
    dist: ScenarioDistribution,
}

impl SteinerInstance {
    pub fn new(
        graph: Graph,
        root: usize,
        scenarios: Vec<Vec<usize>>,
        inflation: Vec<f64>,
        dist: ScenarioDistribution,
    ) -> Result<Self> {
        if root >= graph.n() {
            return Err(Error::InvalidInstance(format!("root {root} out of range")));
        }
        if scenarios.len() != dist.len() || inflation.len() != dist.len() {
            return Err(Error::LengthMismatch(format!(
                "{} terminal sets, {} inflation factors, {} scenarios",
                scenarios.len(),
                inflation.len(),
                dist.len()
            )));
        }
        for (s, &f) in inflation.iter().enumerate() {
            if !f.is_finite() || f < 0.0 {
                return Err(Error::InvalidValue(format!(
                    "inflation {f} of scenario {s} is invalid"
                )));
            }
        }
        let reach = graph.reachable(root, |_| true);
        let mut cleaned = Vec::with_capacity(scenarios.len());
        for (s, mut set) in scenarios.into_iter().enumerate() {
            set.sort_unstable();
            set.dedup();
            for &t in &set {
                if t >= graph.n() {
                    return Err(Error::InvalidInstance(format!(
                        "terminal {t} of scenario {s} out of range"
                    )));
                }
                if !reach[t] {
                    return Err(Error::InfeasibleScenario {
                        scenario: s,
                        reason: format!("terminal {t} cannot reach the root"),
                    });
                }
            }
            cleaned.push(set);
        }
        Ok(Self { graph, root, scenarios: cleaned, inflation, dist })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn scenarios(&self) -> &[Vec<usize>] {
        &self.scenarios
    }

    pub fn inflation(&self) -> &[f64] {
        &self.inflation
    }

    pub fn dist(&self) -> &ScenarioDistribution {
        &self.dist
    }

    pub fn num_scenarios(&self) -> usize {
        self.dist.len()
    }

    /// Terminals of scenario `s` with the root filtered out.
    pub fn active_terminals(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.scenarios[s].iter().copied().filter(move |&t| t != self.root)
    }
}

#[derive(Debug, Clone)]
pub struct SteinerLp {
    pub lp: LinearProgram,
    pub x1: Vec<usize>,
    pub x2: Vec<Vec<usize>>,
    pub exprs: Vec<LinExpr>,
    pub encoding: TruncatedEncoding,
}

/// Builds the directed-flow relaxation. Arc `2e` runs `u -> v` of edge
/// `e`, arc `2e + 1` the reverse.
pub fn steiner_lp(inst: &SteinerInstance) -> Result<SteinerLp> {
    let m = inst.num_scenarios();
    let e_count = inst.graph.num_edges();
    let costs = inst.graph.edge_costs();
    let n = inst.graph.n();

    let mut lp = LinearProgram::new();
    let x1: Vec<usize> = (0..e_count).map(|_| lp.add_var(0.0, 0.0, 1.0)).collect();
    let x2: Vec<Vec<usize>> =
        (0..m).map(|_| (0..e_count).map(|_| lp.add_var(0.0, 0.0, 1.0)).collect()).collect();

    // Arcs out of and into each vertex; arc ids are 2e and 2e + 1.
    let mut out_arcs = vec![Vec::new(); n];
    let mut in_arcs = vec![Vec::new(); n];
    for (e, edge) in inst.graph.edges().iter().enumerate() {
        out_arcs[edge.u].push(2 * e);
        in_arcs[edge.v].push(2 * e);
        out_arcs[edge.v].push(2 * e + 1);
        in_arcs[edge.u].push(2 * e + 1);
    }

    let mut distinct: Vec<usize> = inst
        .scenarios
        .iter()
        .flatten()
        .copied()
        .filter(|&t| t != inst.root)
        .collect();
    distinct.sort_unstable();
    distinct.dedup();

    // Shared first-stage flow per distinct terminal: one variable per arc,
    // capacity-tied to x1, with the stay-on-board monotonicity rows.
    let mut r1: std::collections::HashMap<usize, Vec<usize>> = std::collections::HashMap::new();
    for &t in &distinct {
        let vars: Vec<usize> = (0..2 * e_count).map(|_| lp.add_var(0.0, 0.0, 1.0)).collect();
        for (a, &var) in vars.iter().enumerate() {
            lp.add_row(Row::ge(vec![(x1[a / 2], 1.0), (var, -1.0)], 0.0));
        }
        for v in 0..n {
            if v == t || v == inst.root {
                continue;
            }
            let mut coeffs: Vec<(usize, f64)> =
                out_arcs[v].iter().map(|&a| (vars[a], 1.0)).collect();
            coeffs.extend(in_arcs[v].iter().map(|&a| (vars[a], -1.0)));
            lp.add_row(Row::ge(coeffs, 0.0));
        }
        r1.insert(t, vars);
    }

    // Per-scenario flow on top: conservation and unit excess apply to the
    // combined flow r1 + r2.
    for (s, x2s) in x2.iter().enumerate() {
        for t in inst.active_terminals(s) {
            let r2: Vec<usize> = (0..2 * e_count).map(|_| lp.add_var(0.0, 0.0, 1.0)).collect();
            for (a, &var) in r2.iter().enumerate() {
                lp.add_row(Row::ge(vec![(x2s[a / 2], 1.0), (var, -1.0)], 0.0));
            }
            let shared = &r1[&t];
            let combined = |a: usize| [(shared[a], 1.0), (r2[a], 1.0)];
            for v in 0..n {
                if v == inst.root {
                    continue;
                }
                let mut coeffs: Vec<(usize, f64)> = Vec::new();
                for &a in &out_arcs[v] {
                    coeffs.extend(combined(a));
                }
                for &a in &in_arcs[v] {
                    coeffs.extend(combined(a).map(|(var, c)| (var, -c)));
                }
                if v == t {
                    lp.add_row(Row::ge(coeffs, 1.0));
                } else {
                    let negated: Vec<(usize, f64)> =
                        coeffs.iter().map(|&(var, c)| (var, -c)).collect();
                    lp.add_row(Row::ge(coeffs, 0.0));
                    lp.add_row(Row::ge(negated, 0.0));
                }
            }
        }
    }

    let mut exprs = Vec::with_capacity(m);
    for (x2s, &infl) in x2.iter().zip(&inst.inflation) {
        let mut expr = LinExpr::new();
        for e in 0..e_count {
            expr.add_term(x1[e], costs[e]);
            expr.add_term(x2s[e], infl * costs[e]);
        }
        exprs.push(expr);
    }
    let encoding = lp::encode_truncated_objective(&mut lp, &exprs, &inst.dist)?;
    Ok(SteinerLp { lp, x1, x2, exprs, encoding })
}

/// Solves the relaxation directly; the flow formulation needs no lazy
/// rows.
pub fn solve_steiner_lp(inst: &SteinerInstance) -> Result<(SteinerLp, LpSolution)> {
    let vars = steiner_lp(inst)?;
    let sol = lp::solve(&vars.lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::InvalidInstance(
            "flow relaxation should always be optimal for reachable terminals".into(),
        ));
    }
    Ok((vars, sol))
}

/// Threshold rounding with shortest-path completion.
pub fn round_steiner(
    inst: &SteinerInstance,
    vars: &SteinerLp,
    frac: &LpSolution,
) -> Result<TwoStageEdgeSolution> {
    let e_count = inst.graph.num_edges();
    let costs = inst.graph.edge_costs();

    // Keep well-supported first-stage edges, then prune the root's
    // component to a minimum spanning tree of itself.
    let kept: Vec<usize> = (0..e_count)
        .filter(|&e| frac.values[vars.x1[e]] >= KEEP_THRESHOLD - 1e-9)
        .collect();
    let mut comp = UnionFind::new(inst.graph.n());
    for &e in &kept {
        let edge = &inst.graph.edges()[e];
        comp.union(edge.u, edge.v);
    }
    let root_comp = comp.find(inst.root);
    let in_root_comp: Vec<usize> = kept
        .iter()
        .copied()
        .filter(|&e| {
            let edge = &inst.graph.edges()[e];
            comp.find(edge.u) == root_comp
        })
        .collect();
    let mut tree_uf = UnionFind::new(inst.graph.n());
    let first_stage = graph::kruskal_extend(&mut tree_uf, &inst.graph, &in_root_comp, |e| {
        costs[e]
    });

    let mut second_stage = Vec::with_capacity(inst.num_scenarios());
    for s in 0..inst.num_scenarios() {
        let mut owned = vec![false; e_count];
        for &e in &first_stage {
            owned[e] = true;
        }
        let mut picked: Vec<usize> = Vec::new();
        let mut connected = UnionFind::new(inst.graph.n());
        for &e in &first_stage {
            let edge = &inst.graph.edges()[e];
            connected.union(edge.u, edge.v);
        }
        for t in inst.active_terminals(s) {
            if connected.same(t, inst.root) {
                continue;
            }
            // Owned edges are free, so the path reuses them wherever
            // possible and only pays for the gap.
            let weights: Vec<f64> =
                (0..e_count).map(|e| if owned[e] { 0.0 } else { costs[e] }).collect();
            let (dist, prev) = graph::dijkstra_multi(&inst.graph, &weights, &[inst.root]);
            if dist[t].is_infinite() {
                return Err(Error::InfeasibleScenario {
                    scenario: s,
                    reason: format!("terminal {t} cannot reach the root"),
                });
            }
            for e in graph::extract_path(&prev, t) {
                if !owned[e] {
                    owned[e] = true;
                    picked.push(e);
                }
                let edge = &inst.graph.edges()[e];
                connected.union(edge.u, edge.v);
            }
        }
        second_stage.push(picked);
    }
    Ok(TwoStageEdgeSolution::new(first_stage, second_stage))
}

#[derive(Debug, Clone)]
pub struct SteinerRun {
    pub solution: TwoStageEdgeSolution,
    pub costs: Vec<f64>,
    pub lp_objective: f64,
    pub fractional_costs: Vec<f64>,
}

pub fn solve_steiner(inst: &SteinerInstance) -> Result<SteinerRun> {
    let (vars, sol) = solve_steiner_lp(inst)?;
    let solution = round_steiner(inst, &vars, &sol)?;
    let costs = evaluate_steiner(inst, &solution)?;
    let fractional_costs = vars.exprs.iter().map(|ex| ex.value(&sol.values)).collect();
    Ok(SteinerRun { solution, costs, lp_objective: sol.objective_value, fractional_costs })
}

/// Per-scenario cost, after checking every terminal is connected to the
/// root by that scenario's bought edges.
pub fn evaluate_steiner(inst: &SteinerInstance, sol: &TwoStageEdgeSolution) -> Result<Vec<f64>> {
    if sol.second_stage.len() != inst.num_scenarios() {
        return Err(Error::LengthMismatch(format!(
            "{} second-stage sets vs {} scenarios",
            sol.second_stage.len(),
            inst.num_scenarios()
        )));
    }
    let e_count = inst.graph.num_edges();
    let costs = inst.graph.edge_costs();
    if let Some(&e) = sol.first_stage.iter().find(|&&e| e >= e_count) {
        return Err(Error::InvalidInstance(format!("edge id {e} out of range")));
    }
    let first_cost: f64 = sol.first_stage.iter().map(|&e| costs[e]).sum();
    let mut out = Vec::with_capacity(inst.num_scenarios());
    for (s, stage2) in sol.second_stage.iter().enumerate() {
        if let Some(&e) = stage2.iter().find(|&&e| e >= e_count) {
            return Err(Error::InvalidInstance(format!("edge id {e} out of range")));
        }
        let mut uf = UnionFind::new(inst.graph.n());
        for &e in sol.first_stage.iter().chain(stage2) {
            let edge = &inst.graph.edges()[e];
            uf.union(edge.u, edge.v);
        }
        for t in inst.active_terminals(s) {
            if !uf.same(t, inst.root) {
                return Err(Error::InfeasibleScenario {
                    scenario: s,
                    reason: format!("terminal {t} is not connected to the root"),
                });
            }
        }
        let rent: f64 = stage2.iter().map(|&e| costs[e]).sum();
        out.push(first_cost + inst.inflation[s] * rent);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::truncated_cost;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dist(probs: &[f64]) -> ScenarioDistribution {
        ScenarioDistribution::new(probs.to_vec()).unwrap()
    }

    #[test]
    fn buying_beats_inflated_renting_on_one_edge() {
        let g = Graph::new(2, vec![(0, 1, 1.0)]).unwrap();
        let inst =
            SteinerInstance::new(g, 0, vec![vec![1]], vec![2.0], dist(&[1.0])).unwrap();
        let run = solve_steiner(&inst).unwrap();
        assert!((run.lp_objective - 1.0).abs() <= 1e-6);
        assert_eq!(run.solution.first_stage, vec![0]);
        assert_eq!(run.costs, vec![1.0]);
    }

    #[test]
    fn relaxation_never_exceeds_first_stage_tree() {
        // With inflation one the relaxation is at most the cost of the
        // cheapest integral first-stage tree on the terminals.
        let g = Graph::new(
            4,
            vec![(0, 1, 2.0), (1, 2, 2.0), (0, 3, 1.0), (3, 2, 1.5), (1, 3, 0.5)],
        )
        .unwrap();
        let inst = SteinerInstance::new(
            g,
            0,
            vec![vec![1, 2], vec![2]],
            vec![1.0, 1.0],
            dist(&[0.6, 0.8]),
        )
        .unwrap();
        let run = solve_steiner(&inst).unwrap();
        // Tree {0-3, 3-2, 1-3} connects everything for 3.0.
        let trunc = truncated_cost(&run.costs, inst.dist()).unwrap().value;
        assert!(run.lp_objective <= 3.0 + 1e-6);
        assert!(run.lp_objective <= trunc + 1e-6);
    }

    #[test]
    fn terminals_at_the_root_cost_nothing() {
        let g = Graph::new(2, vec![(0, 1, 5.0)]).unwrap();
        let inst =
            SteinerInstance::new(g, 0, vec![vec![0]], vec![2.0], dist(&[1.0])).unwrap();
        let run = solve_steiner(&inst).unwrap();
        assert!(run.solution.first_stage.is_empty());
        assert_eq!(run.costs, vec![0.0]);
        assert!(run.lp_objective.abs() <= 1e-9);
    }

    #[test]
    fn unreachable_terminal_is_rejected_up_front() {
        let g = Graph::new(3, vec![(0, 1, 1.0)]).unwrap();
        let err = SteinerInstance::new(g, 0, vec![vec![2]], vec![1.0], dist(&[1.0]))
            .unwrap_err();
        assert!(matches!(err, Error::InfeasibleScenario { scenario: 0, .. }));
    }

    #[test]
    fn evaluate_rejects_disconnected_terminal() {
        let g = Graph::new(3, vec![(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let inst =
            SteinerInstance::new(g, 0, vec![vec![2]], vec![2.0], dist(&[1.0])).unwrap();
        let bad = TwoStageEdgeSolution::new(vec![0], vec![vec![]]);
        assert!(matches!(
            evaluate_steiner(&inst, &bad).unwrap_err(),
            Error::InfeasibleScenario { scenario: 0, .. }
        ));
        let good = TwoStageEdgeSolution::new(vec![0], vec![vec![1]]);
        assert_eq!(evaluate_steiner(&inst, &good).unwrap(), vec![3.0]);
    }

    #[test]
    fn shared_terminal_reuses_first_stage_flow() {
        // Both scenarios want vertex 2; a certain cheap backbone should
        // be bought once up front.
        let g = Graph::new(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 4.0)]).unwrap();
        let inst = SteinerInstance::new(
            g,
            0,
            vec![vec![2], vec![1, 2]],
            vec![3.0, 3.0],
            dist(&[1.0, 0.9]),
        )
        .unwrap();
        let run = solve_steiner(&inst).unwrap();
        assert_eq!(run.solution.first_stage, vec![0, 1]);
        assert_eq!(run.costs, vec![2.0, 2.0]);
    }

    #[test]
    fn random_instances_round_feasibly_within_constant_factor() {
        let mut rng = StdRng::seed_from_u64(77);
        for _ in 0..10 {
            let n = rng.gen_range(3..=5);
            let mut edges = Vec::new();
            for v in 1..n {
                edges.push((rng.gen_range(0..v), v, rng.gen_range(0.5..4.0)));
            }
            let target = (n + 1).min(n * (n - 1) / 2);
            while edges.len() < target {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v && !edges.iter().any(|&(a, b, _)| (a, b) == (u.min(v), u.max(v))) {
                    edges.push((u.min(v), u.max(v), rng.gen_range(0.5..4.0)));
                }
            }
            let g = Graph::new(n, edges).unwrap();
            let m = rng.gen_range(1..=2);
            let scenarios: Vec<Vec<usize>> = (0..m)
                .map(|_| (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..n)).collect())
                .collect();
            let inflation: Vec<f64> = (0..m).map(|_| rng.gen_range(0.5..3.0)).collect();
            let mut probs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..=1.0)).collect();
            probs[0] = 1.0;
            let inst = SteinerInstance::new(g, 0, scenarios, inflation, dist(&probs)).unwrap();
            let run = solve_steiner(&inst).unwrap();
            for s in 0..inst.num_scenarios() {
                if run.fractional_costs[s] > 1e-9 {
                    assert!(
                        run.costs[s] <= 30.0 * run.fractional_costs[s] + 1e-6,
                        "scenario {s}: rounded {} vs fractional {}",
                        run.costs[s],
                        run.fractional_costs[s]
                    );
                }
            }
        }
    }
}
