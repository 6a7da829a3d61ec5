//! Two-stage minimum cut. The planner must separate the root from
//! terminal `t_s` whenever scenario `s` realizes: edges bought in the
//! first stage cost their base price, edges removed after the scenario
//! arrives cost `inflation_s` times as much.
//!
//! The relaxation has a first-stage extent `x1(e)` per edge and a single
//! coverage variable `x2(s)` per scenario saying how much of scenario
//! `s`'s cut the first stage already provides; the second stage pays for
//! the remainder at the price of a full fresh cut:
//!
//! ```text
//! cost_s = sum_e c_e x1(e) + inflation_s * cutcost_s * (1 - x2(s))
//! sum_{e in P} x1(e) >= x2(s)   for every root-t_s path P   (lazy)
//! ```
//!
//! where `cutcost_s` is the min root-t_s cut under base costs. Path rows
//! are generated by shortest-path separation. Rounding buys a minimum cut
//! separating the root from every terminal with `x2(s) >= 1/2` and lets
//! each remaining scenario buy its own minimum cut in the leftover graph,
//! which loses at most a factor four on the truncated objective.

use crate::graph::{self, Graph};
use crate::lp::{self, LinExpr, LinearProgram, LpStatus, Row, SeparationOracle, TruncatedEncoding};
use crate::objective::ScenarioDistribution;
use crate::{Error, Result, TwoStageEdgeSolution};

/// Cap on separation rounds; path cuts on desk-size graphs settle in far
/// fewer.
const MAX_SEPARATION_ROUNDS: usize = 500;

#[derive(Debug, Clone)]
pub struct MinCutInstance {
    graph: Graph,
    root: usize,
    terminals: Vec<usize>,
    inflation: Vec<f64>,
    dist: ScenarioDistribution,
}

impl MinCutInstance {
    pub fn new(
        graph: Graph,
        root: usize,
        terminals: Vec<usize>,
        inflation: Vec<f64>,
        dist: ScenarioDistribution,
    ) -> Result<Self> {
        if root >= graph.n() {
            return Err(Error::InvalidInstance(format!("root {root} out of range")));
        }
        if terminals.len() != dist.len() || inflation.len() != dist.len() {
            return Err(Error::LengthMismatch(format!(
                "{} terminals, {} inflation factors, {} scenarios",
                terminals.len(),
                inflation.len(),
                dist.len()
            )));
        }
        for (s, &t) in terminals.iter().enumerate() {
            if t >= graph.n() {
                return Err(Error::InvalidInstance(format!(
                    "terminal {t} of scenario {s} out of range"
                )));
            }
            if t == root {
                return Err(Error::InvalidInstance(format!(
                    "terminal of scenario {s} equals the root"
                )));
            }
        }
        for (s, &f) in inflation.iter().enumerate() {
            if !f.is_finite() || f < 0.0 {
                return Err(Error::InvalidValue(format!(
                    "inflation {f} of scenario {s} is invalid"
                )));
            }
        }
        Ok(Self { graph, root, terminals, inflation, dist })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
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
}

/// LP relaxation with handles into its variables.
#[derive(Debug, Clone)]
pub struct MinCutLp {
    pub lp: LinearProgram,
    /// First-stage extent per edge.
    pub x1: Vec<usize>,
    /// Coverage variable per scenario.
    pub x2: Vec<usize>,
    /// Per-scenario cost expressions fed into the truncated objective.
    pub exprs: Vec<LinExpr>,
    /// Min root-terminal cut cost per scenario under base prices.
    pub cut_costs: Vec<f64>,
    pub encoding: TruncatedEncoding,
}

/// Builds the relaxation without any path rows.
pub fn mincut_lp(inst: &MinCutInstance) -> Result<MinCutLp> {
    let costs = inst.graph.edge_costs();
    let cut_costs: Vec<f64> = inst
        .terminals
        .iter()
        .map(|&t| {
            graph::max_flow_min_cut(&inst.graph, &costs, inst.root, &[t]).map(|(v, _)| v)
        })
        .collect::<Result<_>>()?;

    let mut lp = LinearProgram::new();
    let x1: Vec<usize> = (0..inst.graph.num_edges()).map(|_| lp.add_var(0.0, 0.0, 1.0)).collect();
    let x2: Vec<usize> = (0..inst.num_scenarios()).map(|_| lp.add_var(0.0, 0.0, 1.0)).collect();

    let mut exprs = Vec::with_capacity(inst.num_scenarios());
    for s in 0..inst.num_scenarios() {
        let mut expr = LinExpr::with_constant(inst.inflation[s] * cut_costs[s]);
        for (e, &var) in x1.iter().enumerate() {
            expr.add_term(var, costs[e]);
        }
        expr.add_term(x2[s], -inst.inflation[s] * cut_costs[s]);
        exprs.push(expr);
    }
    let encoding = lp::encode_truncated_objective(&mut lp, &exprs, &inst.dist)?;
    Ok(MinCutLp { lp, x1, x2, exprs, cut_costs, encoding })
}

/// Emits a violated path row `sum_{e in P} x1(e) >= x2(s)` by shortest
/// path under the current `x1` values.
pub struct PathOracle<'a> {
    inst: &'a MinCutInstance,
    vars: &'a MinCutLp,
    scenario: usize,
}

impl SeparationOracle for PathOracle<'_> {
    fn separate(&self, point: &[f64]) -> Option<Row> {
        let weights: Vec<f64> =
            self.vars.x1.iter().map(|&v| point[v].max(0.0)).collect();
        let (dist, prev) = graph::dijkstra_multi(&self.inst.graph, &weights, &[self.inst.root]);
        let t = self.inst.terminals[self.scenario];
        let coverage = point[self.vars.x2[self.scenario]];
        if dist[t] >= coverage - lp::FEAS_TOL {
            return None;
        }
        let mut coeffs: Vec<(usize, f64)> = graph::extract_path(&prev, t)
            .into_iter()
            .map(|e| (self.vars.x1[e], 1.0))
            .collect();
        coeffs.push((self.vars.x2[self.scenario], -1.0));
        Some(Row::ge(coeffs, 0.0))
    }
}

/// One oracle per scenario, so each separation round adds at most one row
/// per scenario.
pub fn path_oracles<'a>(inst: &'a MinCutInstance, vars: &'a MinCutLp) -> Vec<PathOracle<'a>> {
    (0..inst.num_scenarios()).map(|scenario| PathOracle { inst, vars, scenario }).collect()
}

/// Everything produced by one end-to-end run.
#[derive(Debug, Clone)]
pub struct MinCutRun {
    pub solution: TwoStageEdgeSolution,
    /// Per-scenario cost of the rounded solution.
    pub costs: Vec<f64>,
    /// Optimal value of the relaxation, a lower bound on the truncated
    /// cost of any integral solution up to the rounding analysis factor.
    pub lp_objective: f64,
    /// Fractional coverage per scenario at the LP optimum.
    pub lp_coverage: Vec<f64>,
}

/// Solves the relaxation by lazy path generation, then rounds.
pub fn solve_mincut(inst: &MinCutInstance) -> Result<MinCutRun> {
    let vars = mincut_lp(inst)?;
    let oracles = path_oracles(inst, &vars);
    let refs: Vec<&dyn SeparationOracle> =
        oracles.iter().map(|o| o as &dyn SeparationOracle).collect();
    let sol = lp::solve_with_separation(&vars.lp, &refs, MAX_SEPARATION_ROUNDS)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::InvalidInstance(
            "min-cut relaxation should always be optimal".into(),
        ));
    }
    let coverage: Vec<f64> = vars.x2.iter().map(|&v| sol.values[v]).collect();

    // First stage: one minimum cut (under base costs) shielding every
    // scenario whose coverage reaches one half.
    let costs = inst.graph.edge_costs();
    let covered: Vec<usize> = (0..inst.num_scenarios())
        .filter(|&s| coverage[s] >= 0.5 - 1e-9)
        .collect();
    let mut cut_targets: Vec<usize> = covered.iter().map(|&s| inst.terminals[s]).collect();
    cut_targets.sort_unstable();
    cut_targets.dedup();
    let first_stage = if cut_targets.is_empty() {
        Vec::new()
    } else {
        graph::max_flow_min_cut(&inst.graph, &costs, inst.root, &cut_targets)?.1
    };

    // Second stage per scenario: a fresh minimum cut in the graph with
    // first-stage edges already gone.
    let mut masked = costs.clone();
    for &e in &first_stage {
        masked[e] = 0.0;
    }
    let mut second_stage = Vec::with_capacity(inst.num_scenarios());
    for s in 0..inst.num_scenarios() {
        let (_, cut) =
            graph::max_flow_min_cut(&inst.graph, &masked, inst.root, &[inst.terminals[s]])?;
        second_stage.push(cut.into_iter().filter(|e| !first_stage.contains(e)).collect());
    }

    let solution = TwoStageEdgeSolution::new(first_stage, second_stage);
    let costs = evaluate_mincut(inst, &solution)?;
    Ok(MinCutRun { solution, costs, lp_objective: sol.objective_value, lp_coverage: coverage })
}

/// Per-scenario cost of a solution, after checking that each scenario's
/// bought edges really disconnect its terminal from the root.
pub fn evaluate_mincut(inst: &MinCutInstance, sol: &TwoStageEdgeSolution) -> Result<Vec<f64>> {
    if sol.second_stage.len() != inst.num_scenarios() {
        return Err(Error::LengthMismatch(format!(
            "{} second-stage sets vs {} scenarios",
            sol.second_stage.len(),
            inst.num_scenarios()
        )));
    }
    let costs = inst.graph.edge_costs();
    let check_ids = |ids: &[usize]| -> Result<()> {
        match ids.iter().find(|&&e| e >= costs.len()) {
            Some(&e) => Err(Error::InvalidInstance(format!("edge id {e} out of range"))),
            None => Ok(()),
        }
    };
    check_ids(&sol.first_stage)?;
    let first_cost: f64 = sol.first_stage.iter().map(|&e| costs[e]).sum();
    let mut out = Vec::with_capacity(inst.num_scenarios());
    for (s, stage2) in sol.second_stage.iter().enumerate() {
        check_ids(stage2)?;
        let removed: std::collections::HashSet<usize> =
            sol.first_stage.iter().chain(stage2).copied().collect();
        let reach = inst.graph.reachable(inst.root, |e| !removed.contains(&e));
        if reach[inst.terminals[s]] {
            return Err(Error::InfeasibleScenario {
                scenario: s,
                reason: format!(
                    "terminal {} still reachable from the root",
                    inst.terminals[s]
                ),
            });
        }
        let rent: f64 = stage2.iter().map(|&e| costs[e]).sum();
        out.push(first_cost + inst.inflation[s] * rent);
    }
    Ok(out)
}
