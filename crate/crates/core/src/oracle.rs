//! Brute-force exact solvers for tiny instances. These enumerate every
//! first-stage choice, complete each scenario exactly and optimally,
//! and score candidates with the exact objective, so they certify the
//! approximation factors of the polynomial pipelines.
//!
//! Enumeration walks first-stage sets in ascending bitmask order and a
//! strict improvement test keeps the earliest optimum, so results are
//! deterministic. Every returned value is recomputed through the same
//! evaluators the rest of the crate uses.

use crate::graph::{kruskal_extend, max_flow_min_cut, UnionFind};
use crate::hybrid::{self, CoveringBase, HybridInstance};
use crate::kcenter::{self, KCenterInstance, KCenterSolution};
use crate::mincut::{self, MinCutInstance};
use crate::mst::{self, MstInstance};
use crate::objective::{self, ScenarioDistribution};
use crate::steiner::{self, SteinerInstance};
use crate::ufl::{self, UflInstance, UflSolution};
use crate::{Error, Result, TwoStageEdgeSolution};

/// Most purchasable elements (edges, facilities, points) a brute-force
/// enumeration will accept.
pub const ELEMENT_CAP: usize = 12;
/// Most scenarios a brute-force enumeration will accept.
pub const SCENARIO_CAP: usize = 12;

/// Which objective a brute-force optimum refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    EMax,
    Trunc,
    Hybrid,
}

#[derive(Debug, Clone)]
pub struct OracleResult<S> {
    pub opt_value: f64,
    pub opt_solution: S,
    pub objective: Objective,
}

fn check_caps(elements: usize, scenarios: usize) -> Result<()> {
    if elements > ELEMENT_CAP {
        return Err(Error::EnumerationCap { size: elements, cap: ELEMENT_CAP });
    }
    if scenarios > SCENARIO_CAP {
        return Err(Error::EnumerationCap { size: scenarios, cap: SCENARIO_CAP });
    }
    Ok(())
}

fn score(objective: Objective, costs: &[f64], dist: &ScenarioDistribution) -> Result<f64> {
    match objective {
        Objective::EMax => objective::expected_max_exact(costs, dist),
        Objective::Trunc => Ok(objective::truncated_cost(costs, dist)?.value),
        Objective::Hybrid => Err(Error::InvalidValue(
            "the hybrid objective needs a hybrid instance".into(),
        )),
    }
}

fn mask_to_set(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|&e| mask >> e & 1 == 1).collect()
}

/// Cheapest way to cut terminal `s` from the root once the first stage
/// is owned: a minimum cut with owned edges free. Returns the inflated
/// rent and the rented edges.
pub fn exact_second_stage_mincut(
    inst: &MinCutInstance,
    first_stage: &[usize],
    s: usize,
) -> Result<(f64, Vec<usize>)> {
    let costs = inst.graph().edge_costs();
    let masked: Vec<f64> = costs
        .iter()
        .enumerate()
        .map(|(e, &c)| if first_stage.contains(&e) { 0.0 } else { c })
        .collect();
    let (value, cut) =
        max_flow_min_cut(inst.graph(), &masked, inst.root(), &[inst.terminals()[s]])?;
    let rented: Vec<usize> =
        cut.into_iter().filter(|e| !first_stage.contains(e)).collect();
    Ok((inst.inflation()[s] * value, rented))
}

/// Cheapest spanning completion of an owned forest under the scenario's
/// second-stage edge costs.
pub fn exact_second_stage_mst(
    inst: &MstInstance,
    first_stage: &[usize],
    s: usize,
) -> Result<(f64, Vec<usize>)> {
    let graph = inst.graph();
    let mut uf = UnionFind::new(graph.n());
    for &e in first_stage {
        let edge = &graph.edges()[e];
        uf.union(edge.u, edge.v);
    }
    let rest: Vec<usize> =
        (0..graph.num_edges()).filter(|e| !first_stage.contains(e)).collect();
    let cost2 = &inst.cost2()[s];
    let taken = kruskal_extend(&mut uf, graph, &rest, |e| cost2[e]);
    let cost = taken.iter().map(|&e| cost2[e]).sum();
    Ok((cost, taken))
}

/// Cheapest edge set whose union with the first stage connects every
/// terminal of scenario `s` to the root, by exhaustive subset search.
pub fn exact_second_stage_steiner(
    inst: &SteinerInstance,
    first_stage: &[usize],
    s: usize,
) -> Result<(f64, Vec<usize>)> {
    let graph = inst.graph();
    let ne = graph.num_edges();
    check_caps(ne, inst.num_scenarios())?;
    let costs = graph.edge_costs();
    let terminals: Vec<usize> = inst.active_terminals(s).collect();
    let owned_mask: usize = first_stage.iter().map(|&e| 1usize << e).sum();

    let connects = |extra: usize| -> bool {
        let mut uf = UnionFind::new(graph.n());
        for (e, edge) in graph.edges().iter().enumerate() {
            if (owned_mask | extra) >> e & 1 == 1 {
                uf.union(edge.u, edge.v);
            }
        }
        terminals.iter().all(|&t| uf.find(t) == uf.find(inst.root()))
    };

    let complement = !owned_mask & ((1usize << ne) - 1);
    let mut best: Option<(f64, usize)> = None;
    // Walk every subset of the unowned edges, including the empty one.
    let mut sub = complement;
    loop {
        let price: f64 = (0..ne)
            .filter(|&e| sub >> e & 1 == 1)
            .map(|e| costs[e])
            .sum();
        if best.map_or(true, |(b, _)| price < b) && connects(sub) {
            best = Some((price, sub));
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & complement;
    }
    let (price, mask) = best.expect("the full edge set always connects");
    Ok((inst.inflation()[s] * price, mask_to_set(mask, ne)))
}

/// Cheapest second-stage openings for scenario `s` given the first-stage
/// set, by exhaustive subset search over openable facilities. Returns
/// opening plus connection cost and the opened set; `None` when demand
/// cannot be served.
pub fn exact_second_stage_ufl(
    inst: &UflInstance,
    first_stage: &[usize],
    s: usize,
) -> Option<(f64, Vec<usize>)> {
    let nf = inst.n_facilities();
    let openable: Vec<usize> =
        (0..nf).filter(|&i| inst.open2()[s][i].is_finite()).collect();
    let demand: Vec<usize> =
        (0..inst.n_clients()).filter(|&j| inst.demand()[s][j]).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for mask in 0usize..1 << openable.len() {
        let opened: Vec<usize> = openable
            .iter()
            .enumerate()
            .filter(|&(b, _)| mask >> b & 1 == 1)
            .map(|(_, &i)| i)
            .collect();
        let mut cost: f64 = opened.iter().map(|&i| inst.open2()[s][i]).sum();
        let available: Vec<usize> = first_stage.iter().chain(&opened).copied().collect();
        if !demand.is_empty() && available.is_empty() {
            continue;
        }
        for &j in &demand {
            cost += available
                .iter()
                .map(|&i| inst.connection(i, j))
                .fold(f64::INFINITY, f64::min);
        }
        if best.as_ref().map_or(true, |&(b, _)| cost < b) {
            best = Some((cost, opened));
        }
    }
    best
}

pub fn brute_force_mincut(
    inst: &MinCutInstance,
    objective: Objective,
) -> Result<OracleResult<TwoStageEdgeSolution>> {
    let ne = inst.graph().num_edges();
    check_caps(ne, inst.num_scenarios())?;
    let costs = inst.graph().edge_costs();
    let mut best: Option<(f64, TwoStageEdgeSolution)> = None;
    for mask in 0usize..1 << ne {
        let first = mask_to_set(mask, ne);
        let first_cost: f64 = first.iter().map(|&e| costs[e]).sum();
        let mut second = Vec::with_capacity(inst.num_scenarios());
        let mut per_scenario = Vec::with_capacity(inst.num_scenarios());
        // Scenarios sharing a terminal share their completion.
        let mut memo: std::collections::BTreeMap<usize, (f64, Vec<usize>)> =
            std::collections::BTreeMap::new();
        for s in 0..inst.num_scenarios() {
            let terminal = inst.terminals()[s];
            let (rent_base, set) = match memo.get(&terminal) {
                Some(hit) => hit.clone(),
                None => {
                    let (rent, set) = exact_second_stage_mincut(inst, &first, s)?;
                    let base = if inst.inflation()[s] > 0.0 {
                        rent / inst.inflation()[s]
                    } else {
                        set.iter().map(|&e| costs[e]).sum()
                    };
                    memo.insert(terminal, (base, set.clone()));
                    (base, set)
                }
            };
            per_scenario.push(first_cost + inst.inflation()[s] * rent_base);
            second.push(set);
        }
        let value = score(objective, &per_scenario, inst.dist())?;
        if best.as_ref().map_or(true, |&(b, _)| value < b) {
            best = Some((value, TwoStageEdgeSolution::new(first, second)));
        }
    }
    let (_, opt_solution) = best.expect("at least the empty first stage is enumerated");
    let recomputed = mincut::evaluate_mincut(inst, &opt_solution)?;
    let opt_value = score(objective, &recomputed, inst.dist())?;
    Ok(OracleResult { opt_value, opt_solution, objective })
}

pub fn brute_force_mst(
    inst: &MstInstance,
    objective: Objective,
) -> Result<OracleResult<TwoStageEdgeSolution>> {
    let ne = inst.graph().num_edges();
    check_caps(ne, inst.num_scenarios())?;
    let cost1 = inst.cost1();
    let mut best: Option<(f64, TwoStageEdgeSolution)> = None;
    for mask in 0usize..1 << ne {
        let first = mask_to_set(mask, ne);
        let first_cost: f64 = first.iter().map(|&e| cost1[e]).sum();
        let mut second = Vec::with_capacity(inst.num_scenarios());
        let mut per_scenario = Vec::with_capacity(inst.num_scenarios());
        for s in 0..inst.num_scenarios() {
            let (rent, set) = exact_second_stage_mst(inst, &first, s)?;
            per_scenario.push(first_cost + rent);
            second.push(set);
        }
        let value = score(objective, &per_scenario, inst.dist())?;
        if best.as_ref().map_or(true, |&(b, _)| value < b) {
            best = Some((value, TwoStageEdgeSolution::new(first, second)));
        }
    }
    let (_, opt_solution) = best.expect("at least the empty first stage is enumerated");
    let recomputed = mst::evaluate_mst(inst, &opt_solution)?;
    let opt_value = score(objective, &recomputed, inst.dist())?;
    Ok(OracleResult { opt_value, opt_solution, objective })
}

pub fn brute_force_steiner(
    inst: &SteinerInstance,
    objective: Objective,
) -> Result<OracleResult<TwoStageEdgeSolution>> {
    let ne = inst.graph().num_edges();
    check_caps(ne, inst.num_scenarios())?;
    let costs = inst.graph().edge_costs();
    let mut best: Option<(f64, TwoStageEdgeSolution)> = None;
    for mask in 0usize..1 << ne {
        let first = mask_to_set(mask, ne);
        let first_cost: f64 = first.iter().map(|&e| costs[e]).sum();
        let mut second = Vec::with_capacity(inst.num_scenarios());
        let mut per_scenario = Vec::with_capacity(inst.num_scenarios());
        // Scenarios with the same terminals share their completion up
        // to inflation.
        let mut memo: std::collections::BTreeMap<Vec<usize>, (f64, Vec<usize>)> =
            std::collections::BTreeMap::new();
        for s in 0..inst.num_scenarios() {
            let key: Vec<usize> = inst.active_terminals(s).collect();
            let (base, set) = match memo.get(&key) {
                Some(hit) => hit.clone(),
                None => {
                    let (_, set) = exact_second_stage_steiner(inst, &first, s)?;
                    let base: f64 = set.iter().map(|&e| costs[e]).sum();
                    memo.insert(key, (base, set.clone()));
                    (base, set)
                }
            };
            per_scenario.push(first_cost + inst.inflation()[s] * base);
            second.push(set);
        }
        let value = score(objective, &per_scenario, inst.dist())?;
        if best.as_ref().map_or(true, |&(b, _)| value < b) {
            best = Some((value, TwoStageEdgeSolution::new(first, second)));
        }
    }
    let (_, opt_solution) = best.expect("at least the empty first stage is enumerated");
    let recomputed = steiner::evaluate_steiner(inst, &opt_solution)?;
    let opt_value = score(objective, &recomputed, inst.dist())?;
    Ok(OracleResult { opt_value, opt_solution, objective })
}

pub fn brute_force_ufl(
    inst: &UflInstance,
    objective: Objective,
) -> Result<OracleResult<UflSolution>> {
    let nf = inst.n_facilities();
    check_caps(nf, inst.num_scenarios())?;
    let m = inst.num_scenarios();
    let buildable: Vec<usize> = (0..nf).filter(|&i| inst.open1()[i].is_finite()).collect();
    let mut best: Option<(f64, UflSolution)> = None;
    for mask in 0usize..1 << buildable.len() {
        let first: Vec<usize> = buildable
            .iter()
            .enumerate()
            .filter(|&(b, _)| mask >> b & 1 == 1)
            .map(|(_, &i)| i)
            .collect();
        let first_cost: f64 = first.iter().map(|&i| inst.open1()[i]).sum();
        let mut second = Vec::with_capacity(m);
        let mut per_scenario = Vec::with_capacity(m);
        let mut feasible = true;
        for s in 0..m {
            match exact_second_stage_ufl(inst, &first, s) {
                Some((cost, opened)) => {
                    per_scenario.push(first_cost + cost);
                    second.push(opened);
                }
                None => {
                    feasible = false;
                    break;
                }
            }
        }
        if !feasible {
            continue;
        }
        // A solution must open something somewhere.
        if first.is_empty() && second.iter().all(|o| o.is_empty()) {
            continue;
        }
        let value = score(objective, &per_scenario, inst.dist())?;
        if best.as_ref().map_or(true, |&(b, _)| value < b) {
            best = Some((value, UflSolution::new(first, second)));
        }
    }
    // Demand-free instances with no buildable facility reach here with
    // no candidate: fall back to the cheapest single second-stage
    // opening.
    if best.is_none() {
        for s in 0..m {
            for i in 0..nf {
                if !inst.open2()[s][i].is_finite() {
                    continue;
                }
                let mut second = vec![Vec::new(); m];
                second[s].push(i);
                let candidate = UflSolution::new(Vec::new(), second);
                let costs = ufl::evaluate_ufl(inst, &candidate)?;
                let value = score(objective, &costs, inst.dist())?;
                if best.as_ref().map_or(true, |&(b, _)| value < b) {
                    best = Some((value, candidate));
                }
            }
        }
    }
    let (_, opt_solution) =
        best.ok_or_else(|| Error::InvalidInstance("no facility can be opened at all".into()))?;
    let recomputed = ufl::evaluate_ufl(inst, &opt_solution)?;
    let opt_value = score(objective, &recomputed, inst.dist())?;
    Ok(OracleResult { opt_value, opt_solution, objective })
}

pub fn brute_force_kcenter(
    inst: &KCenterInstance,
    objective: Objective,
) -> Result<OracleResult<KCenterSolution>> {
    let n = inst.num_points();
    check_caps(n, n)?;
    let mut best: Option<(f64, KCenterSolution)> = None;
    for mask in 1usize..1 << n {
        if (mask.count_ones() as usize) > inst.k() {
            continue;
        }
        let solution = KCenterSolution::new(mask_to_set(mask, n));
        let costs = kcenter::evaluate_kcenter(inst, &solution)?;
        let value = score(objective, &costs, inst.dist())?;
        if best.as_ref().map_or(true, |&(b, _)| value < b) {
            best = Some((value, solution));
        }
    }
    let (opt_value, opt_solution) = best.expect("k >= 1 admits every singleton");
    Ok(OracleResult { opt_value, opt_solution, objective })
}

fn exact_second_stage_base(
    base: &CoveringBase,
    first: &[usize],
    s: usize,
) -> Result<Vec<usize>> {
    match base {
        CoveringBase::MinCut(inst) => Ok(exact_second_stage_mincut(inst, first, s)?.1),
        CoveringBase::Steiner(inst) => Ok(exact_second_stage_steiner(inst, first, s)?.1),
    }
}

/// Exact minimizer of the hybrid objective. For a fixed first stage the
/// blended objective is monotone in every scenario cost, so each
/// scenario keeps its cheapest exact completion.
pub fn brute_force_hybrid(inst: &HybridInstance) -> Result<OracleResult<TwoStageEdgeSolution>> {
    let ne = inst.base().edge_costs().len();
    check_caps(ne, inst.num_scenarios())?;
    let mut best: Option<(f64, TwoStageEdgeSolution)> = None;
    for mask in 0usize..1 << ne {
        let first = mask_to_set(mask, ne);
        let second = (0..inst.num_scenarios())
            .map(|s| exact_second_stage_base(inst.base(), &first, s))
            .collect::<Result<Vec<_>>>()?;
        let candidate = TwoStageEdgeSolution::new(first, second);
        let value = hybrid::cost_hybrid(inst, &candidate)?;
        if best.as_ref().map_or(true, |&(b, _)| value < b) {
            best = Some((value, candidate));
        }
    }
    let (opt_value, opt_solution) = best.expect("at least the empty first stage is enumerated");
    Ok(OracleResult { opt_value, opt_solution, objective: Objective::Hybrid })
}
