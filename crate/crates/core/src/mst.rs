//! Two-stage spanning tree. Every scenario must end up with a spanning
//! tree of the whole graph: edges bought now cost `cost1`, edges added
//! once scenario `s` realizes cost `cost2[s]`.
//!
//! The relaxation carries a first-stage extent `x1(e)` and per-scenario
//! extents `x2(s, e)`, with one covering row per graph cut and scenario:
//!
//! ```text
//! sum_{e in delta(S)} x1(e) + x2(s, e) >= 1     for all cuts S, scenarios s
//! cost_s = sum_e cost1_e x1(e) + cost2_{s,e} x2(s, e)
//! ```
//!
//! Cut rows are seeded with the vertex stars and otherwise generated
//! lazily by a global min-cut oracle per scenario. Rounding samples each
//! edge independently with its fractional value for `4 (ln n + ln m)`
//! rounds, unions the draws, and closes any remaining gaps with the
//! cheapest second-stage edges, staying within `O(log n + log m)` of the
//! fractional cost per scenario with high probability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{self, Graph, UnionFind};
use crate::lp::{self, LinExpr, LinearProgram, LpSolution, LpStatus, Row, SeparationOracle,
    TruncatedEncoding};
use crate::objective::ScenarioDistribution;
use crate::{Error, Result, TwoStageEdgeSolution};

const MAX_SEPARATION_ROUNDS: usize = 500;

/// A violated cut must fall short of one by this much before the oracle
/// reports it.
const CUT_VIOLATION_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct MstInstance {
    graph: Graph,
    cost2: Vec<Vec<f64>>,
    dist: ScenarioDistribution,
}

fn check_integer_cost(label: &str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 1.0 || (value - value.round()).abs() > 1e-9 {
        return Err(Error::InvalidValue(format!(
            "{label} cost {value} must be a positive integer"
        )));
    }
    Ok(())
}

impl MstInstance {
    /// The graph's edge costs are the first-stage prices; `cost2[s]` is
    /// edge-aligned. All prices must be positive integers.
    pub fn new(graph: Graph, cost2: Vec<Vec<f64>>, dist: ScenarioDistribution) -> Result<Self> {
        if cost2.len() != dist.len() {
            return Err(Error::LengthMismatch(format!(
                "{} second-stage cost rows vs {} scenarios",
                cost2.len(),
                dist.len()
            )));
        }
        for (e, edge) in graph.edges().iter().enumerate() {
            check_integer_cost(&format!("first-stage edge {e}"), edge.cost)?;
        }
        for (s, row) in cost2.iter().enumerate() {
            if row.len() != graph.num_edges() {
                return Err(Error::LengthMismatch(format!(
                    "scenario {s} has {} second-stage costs vs {} edges",
                    row.len(),
                    graph.num_edges()
                )));
            }
            for (e, &c) in row.iter().enumerate() {
                check_integer_cost(&format!("scenario {s} edge {e}"), c)?;
            }
        }
        let reach = graph.reachable(0, |_| true);
        if reach.iter().any(|&r| !r) {
            return Err(Error::InvalidInstance("graph is not connected".into()));
        }
        Ok(Self { graph, cost2, dist })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn cost1(&self) -> Vec<f64> {
        self.graph.edge_costs()
    }

    pub fn cost2(&self) -> &[Vec<f64>] {
        &self.cost2
    }

    pub fn dist(&self) -> &ScenarioDistribution {
        &self.dist
    }

    pub fn num_scenarios(&self) -> usize {
        self.dist.len()
    }
}

#[derive(Debug, Clone)]
pub struct MstLp {
    pub lp: LinearProgram,
    pub x1: Vec<usize>,
    /// `x2[s][e]` is scenario `s`'s extent on edge `e`.
    pub x2: Vec<Vec<usize>>,
    pub exprs: Vec<LinExpr>,
    pub encoding: TruncatedEncoding,
}

/// Builds the relaxation seeded with the vertex-star cut rows.
pub fn mst_lp(inst: &MstInstance) -> Result<MstLp> {
    let m = inst.num_scenarios();
    let e_count = inst.graph.num_edges();
    let cost1 = inst.cost1();

    let mut lp = LinearProgram::new();
    let x1: Vec<usize> = (0..e_count).map(|_| lp.add_var(0.0, 0.0, 1.0)).collect();
    let x2: Vec<Vec<usize>> =
        (0..m).map(|_| (0..e_count).map(|_| lp.add_var(0.0, 0.0, 1.0)).collect()).collect();

    let mut exprs = Vec::with_capacity(m);
    for (x2s, cost2s) in x2.iter().zip(&inst.cost2) {
        let mut expr = LinExpr::new();
        for e in 0..e_count {
            expr.add_term(x1[e], cost1[e]);
            expr.add_term(x2s[e], cost2s[e]);
        }
        exprs.push(expr);
    }
    let encoding = lp::encode_truncated_objective(&mut lp, &exprs, &inst.dist)?;

    let adj = inst.graph.adjacency();
    for x2s in &x2 {
        for star in &adj {
            let mut coeffs = Vec::with_capacity(2 * star.len());
            for &(e, _) in star {
                coeffs.push((x1[e], 1.0));
                coeffs.push((x2s[e], 1.0));
            }
            lp.add_row(Row::ge(coeffs, 1.0));
        }
    }
    Ok(MstLp { lp, x1, x2, exprs, encoding })
}

/// Finds a cut of total extent below one for its scenario by scanning
/// global minimum cuts of the weighted graph.
pub struct SpanningCutOracle<'a> {
    inst: &'a MstInstance,
    vars: &'a MstLp,
    scenario: usize,
}

impl SeparationOracle for SpanningCutOracle<'_> {
    fn separate(&self, point: &[f64]) -> Option<Row> {
        let s = self.scenario;
        let weights: Vec<f64> = (0..self.inst.graph.num_edges())
            .map(|e| (point[self.vars.x1[e]] + point[self.vars.x2[s][e]]).max(0.0))
            .collect();
        // Every cut separates vertex 0 from some other vertex, so the
        // cheapest of these max-flows is the global minimum cut.
        let mut best: Option<(f64, Vec<usize>)> = None;
        for t in 1..self.inst.graph.n() {
            let (value, cut) =
                graph::max_flow_min_cut(&self.inst.graph, &weights, 0, &[t]).ok()?;
            if best.as_ref().map_or(true, |(bv, _)| value < *bv) {
                best = Some((value, cut));
            }
        }
        let (value, cut) = best?;
        if value >= 1.0 - CUT_VIOLATION_TOL {
            return None;
        }
        let mut coeffs = Vec::with_capacity(2 * cut.len());
        for &e in &cut {
            coeffs.push((self.vars.x1[e], 1.0));
            coeffs.push((self.vars.x2[s][e], 1.0));
        }
        Some(Row::ge(coeffs, 1.0))
    }
}

pub fn spanning_cut_oracles<'a>(
    inst: &'a MstInstance,
    vars: &'a MstLp,
) -> Vec<SpanningCutOracle<'a>> {
    (0..inst.num_scenarios()).map(|scenario| SpanningCutOracle { inst, vars, scenario }).collect()
}

/// Solves the relaxation with lazy cut generation.
pub fn solve_mst_lp(inst: &MstInstance) -> Result<(MstLp, LpSolution)> {
    let vars = mst_lp(inst)?;
    let oracles = spanning_cut_oracles(inst, &vars);
    let refs: Vec<&dyn SeparationOracle> =
        oracles.iter().map(|o| o as &dyn SeparationOracle).collect();
    let sol = lp::solve_with_separation(&vars.lp, &refs, MAX_SEPARATION_ROUNDS)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::InvalidInstance(
            "spanning-tree relaxation should always be optimal".into(),
        ));
    }
    Ok((vars, sol))
}

/// Number of independent sampling rounds used by [`round_mst`].
pub fn sampling_rounds(n: usize, scenarios: usize) -> usize {
    (4.0 * ((n as f64).ln() + (scenarios as f64).ln())).ceil().max(1.0) as usize
}

/// Randomized rounding: for each of the sampling rounds every edge joins
/// the first stage with probability `x1(e)` and scenario `s`'s second
/// stage with probability `x2(s, e)`, all draws independent across
/// rounds via per-round generator streams. Whatever is still not
/// spanning afterwards is completed greedily with the cheapest
/// second-stage edges.
pub fn round_mst(
    inst: &MstInstance,
    vars: &MstLp,
    frac: &LpSolution,
    seed: u64,
) -> Result<TwoStageEdgeSolution> {
    let e_count = inst.graph.num_edges();
    let m = inst.num_scenarios();
    let rounds = sampling_rounds(inst.graph.n(), m);
    let base = ChaCha8Rng::seed_from_u64(seed);

    let mut in_first = vec![false; e_count];
    let mut in_second = vec![vec![false; e_count]; m];
    for round in 0..rounds {
        let mut rng = base.clone();
        rng.set_stream(round as u64);
        for e in 0..e_count {
            if rng.gen::<f64>() < frac.values[vars.x1[e]] {
                in_first[e] = true;
            }
            for (s, marks) in in_second.iter_mut().enumerate() {
                if rng.gen::<f64>() < frac.values[vars.x2[s][e]] {
                    marks[e] = true;
                }
            }
        }
    }

    let first_stage: Vec<usize> = (0..e_count).filter(|&e| in_first[e]).collect();
    let mut second_stage = Vec::with_capacity(m);
    for (s, marks) in in_second.iter().enumerate() {
        let mut uf = UnionFind::new(inst.graph.n());
        for &e in &first_stage {
            let edge = &inst.graph.edges()[e];
            uf.union(edge.u, edge.v);
        }
        let mut picked: Vec<usize> =
            (0..e_count).filter(|&e| marks[e] && !in_first[e]).collect();
        for &e in &picked {
            let edge = &inst.graph.edges()[e];
            uf.union(edge.u, edge.v);
        }
        if uf.components() > 1 {
            let rest: Vec<usize> =
                (0..e_count).filter(|&e| !in_first[e] && !marks[e]).collect();
            let filled = graph::kruskal_extend(&mut uf, &inst.graph, &rest, |e| inst.cost2[s][e]);
            picked.extend(filled);
        }
        if uf.components() > 1 {
            return Err(Error::InfeasibleScenario {
                scenario: s,
                reason: "no spanning completion exists".into(),
            });
        }
        second_stage.push(picked);
    }
    Ok(TwoStageEdgeSolution::new(first_stage, second_stage))
}

#[derive(Debug, Clone)]
pub struct MstRun {
    pub solution: TwoStageEdgeSolution,
    pub costs: Vec<f64>,
    pub lp_objective: f64,
    /// Fractional per-scenario cost at the LP optimum.
    pub fractional_costs: Vec<f64>,
}

pub fn solve_mst(inst: &MstInstance, seed: u64) -> Result<MstRun> {
    let (vars, sol) = solve_mst_lp(inst)?;
    let solution = round_mst(inst, &vars, &sol, seed)?;
    let costs = evaluate_mst(inst, &solution)?;
    let fractional_costs = vars.exprs.iter().map(|ex| ex.value(&sol.values)).collect();
    Ok(MstRun { solution, costs, lp_objective: sol.objective_value, fractional_costs })
}

/// Per-scenario cost, after checking each scenario's union spans the
/// graph.
pub fn evaluate_mst(inst: &MstInstance, sol: &TwoStageEdgeSolution) -> Result<Vec<f64>> {
    if sol.second_stage.len() != inst.num_scenarios() {
        return Err(Error::LengthMismatch(format!(
            "{} second-stage sets vs {} scenarios",
            sol.second_stage.len(),
            inst.num_scenarios()
        )));
    }
    let e_count = inst.graph.num_edges();
    let cost1 = inst.cost1();
    if let Some(&e) = sol.first_stage.iter().find(|&&e| e >= e_count) {
        return Err(Error::InvalidInstance(format!("edge id {e} out of range")));
    }
    let first_cost: f64 = sol.first_stage.iter().map(|&e| cost1[e]).sum();
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
        if uf.components() > 1 {
            return Err(Error::InfeasibleScenario {
                scenario: s,
                reason: "bought edges do not span the graph".into(),
            });
        }
        let rent: f64 = stage2.iter().map(|&e| inst.cost2[s][e]).sum();
        out.push(first_cost + rent);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_scenario_path() -> MstInstance {
        // Path 0-1-2; first edge cheap now, second cheap later.
        let g = Graph::new(3, vec![(0, 1, 1.0), (1, 2, 5.0)]).unwrap();
        MstInstance::new(
            g,
            vec![vec![4.0, 2.0], vec![3.0, 1.0]],
            ScenarioDistribution::new(vec![0.5, 1.0]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_fractional_or_zero_costs() {
        let g = Graph::new(2, vec![(0, 1, 1.5)]).unwrap();
        let d = ScenarioDistribution::new(vec![1.0]).unwrap();
        assert!(MstInstance::new(g, vec![vec![1.0]], d.clone()).is_err());
        let g = Graph::new(2, vec![(0, 1, 0.0)]).unwrap();
        assert!(MstInstance::new(g, vec![vec![1.0]], d.clone()).is_err());
        let g = Graph::new(2, vec![(0, 1, 1.0)]).unwrap();
        assert!(MstInstance::new(g, vec![vec![2.5]], d).is_err());
    }

    #[test]
    fn rejects_disconnected_graph() {
        let g = Graph::new(3, vec![(0, 1, 1.0)]).unwrap();
        let d = ScenarioDistribution::new(vec![1.0]).unwrap();
        assert!(matches!(
            MstInstance::new(g, vec![vec![1.0]], d).unwrap_err(),
            Error::InvalidInstance(_)
        ));
    }

    #[test]
    fn triangle_relaxation_value_is_three_halves() {
        // With unit costs everywhere the cut LP spreads one half per
        // edge; the integral optimum needs two whole edges.
        let g = Graph::new(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let inst = MstInstance::new(
            g,
            vec![vec![1.0, 1.0, 1.0]],
            ScenarioDistribution::new(vec![1.0]).unwrap(),
        )
        .unwrap();
        let (_, sol) = solve_mst_lp(&inst).unwrap();
        assert!((sol.objective_value - 1.5).abs() <= 1e-6);
    }

    #[test]
    fn bridges_pick_their_cheaper_stage() {
        let inst = two_scenario_path();
        let run = solve_mst(&inst, 7).unwrap();
        // Edge 0 is cheaper up front; edge 1 is cheaper in both scenarios
        // later, so the relaxation is integral and rounding keeps it.
        assert_eq!(run.solution.first_stage, vec![0]);
        assert_eq!(run.solution.second_stage, vec![vec![1], vec![1]]);
        assert_eq!(run.costs, vec![3.0, 2.0]);
        assert!((run.lp_objective - 2.5).abs() <= 1e-6);
    }

    #[test]
    fn integral_fractions_round_to_themselves() {
        let inst = two_scenario_path();
        let vars = mst_lp(&inst).unwrap();
        let mut values = vec![0.0; vars.lp.num_vars()];
        values[vars.x1[1]] = 1.0;
        values[vars.x2[0][0]] = 1.0;
        values[vars.x2[1][0]] = 1.0;
        let frac = LpSolution { status: LpStatus::Optimal, values, objective_value: 0.0 };
        for seed in [0, 1, 99] {
            let sol = round_mst(&inst, &vars, &frac, seed).unwrap();
            assert_eq!(sol.first_stage, vec![1]);
            assert_eq!(sol.second_stage, vec![vec![0], vec![0]]);
        }
    }

    #[test]
    fn rounding_is_deterministic_per_seed() {
        let g = Graph::new(
            4,
            vec![(0, 1, 2.0), (1, 2, 3.0), (2, 3, 2.0), (0, 3, 4.0), (1, 3, 1.0)],
        )
        .unwrap();
        let inst = MstInstance::new(
            g,
            vec![vec![3.0, 2.0, 5.0, 1.0, 2.0], vec![1.0, 6.0, 1.0, 2.0, 4.0]],
            ScenarioDistribution::new(vec![0.8, 0.6]).unwrap(),
        )
        .unwrap();
        let a = solve_mst(&inst, 5).unwrap();
        let b = solve_mst(&inst, 5).unwrap();
        assert_eq!(a.solution, b.solution);
        for s in 0..2 {
            assert!(a.costs[s] > 0.0);
            assert!(a.fractional_costs[s] > 0.0);
        }
    }

    #[test]
    fn every_seed_yields_spanning_unions() {
        let g = Graph::new(
            4,
            vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 2, 2.0), (1, 3, 2.0)],
        )
        .unwrap();
        let inst = MstInstance::new(
            g,
            vec![vec![2.0, 2.0, 2.0, 1.0, 1.0], vec![1.0, 1.0, 3.0, 3.0, 3.0]],
            ScenarioDistribution::new(vec![0.9, 0.4]).unwrap(),
        )
        .unwrap();
        let (vars, sol) = solve_mst_lp(&inst).unwrap();
        for seed in 0..20 {
            let rounded = round_mst(&inst, &vars, &sol, seed).unwrap();
            let costs = evaluate_mst(&inst, &rounded).unwrap();
            assert_eq!(costs.len(), 2);
        }
    }

    #[test]
    fn evaluate_rejects_non_spanning_solutions() {
        let inst = two_scenario_path();
        let bad = TwoStageEdgeSolution::new(vec![0], vec![vec![1], vec![]]);
        let err = evaluate_mst(&inst, &bad).unwrap_err();
        assert!(matches!(err, Error::InfeasibleScenario { scenario: 1, .. }));
    }
}
