//! Run reports for `solve` and `evaluate`.
//!
//! Every value in a report is reproducible from the instance, the flags,
//! and the seed; only `seconds` varies between runs. The expected
//! maximum is computed exactly up to the enumeration cap and by seeded
//! Monte Carlo above it, and the exact oracle optimum is attached
//! whenever the instance is small enough to enumerate.

use std::time::Instant;

use anyhow::{bail, Result};
use minemax_core::hybrid::{cost_hybrid, hybrid_to_minemax, reduced_emax, solve_hybrid};
use minemax_core::kcenter::{evaluate_kcenter, solve_kcenter};
use minemax_core::mincut::{evaluate_mincut, solve_mincut};
use minemax_core::mst::{evaluate_mst, solve_mst};
use minemax_core::objective::{
    expected_max_exact, expected_max_monte_carlo, pad_to_unit_mass, truncated_cost,
    EXACT_SCENARIO_CAP,
};
use minemax_core::oracle::{
    brute_force_hybrid, brute_force_kcenter, brute_force_mincut, brute_force_mst,
    brute_force_steiner, brute_force_ufl, Objective, OracleResult,
};
use minemax_core::steiner::{evaluate_steiner, solve_steiner};
use minemax_core::ufl::{evaluate_ufl, solve_ufl};
use minemax_core::{
    Error, KCenterSolution, ScenarioDistribution, TwoStageEdgeSolution, UflSolution,
};
use serde::Serialize;
use serde_json::Value;

use crate::schema::{AnyInstance, CenterSolutionBody, EdgeSolutionBody, FacilitySolutionBody};

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub seed: u64,
    pub mc_trials: usize,
    pub epsilon: f64,
    pub gamma_slack: f64,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub instance: String,
    pub problem: String,
    pub solver: String,
    pub seed: u64,
    /// Expected-maximum cost of the reported solution.
    pub emax: f64,
    pub emax_method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emax_std_error: Option<f64>,
    /// Truncated cost of the reported solution, with its threshold and
    /// the scenario prefix whose mass reaches one (padded scenarios
    /// appear as index `m`).
    pub trunc: f64,
    pub threshold_b: f64,
    pub prefix_m: Vec<usize>,
    pub per_scenario_costs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp_objective: Option<f64>,
    /// Qualifying clustering threshold, k-center runs only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cluster_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_opt: Option<f64>,
    /// Reported objective over the oracle optimum; the hybrid objective
    /// for hybrid runs and the expected maximum otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub solution: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hybrid_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduced_emax: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub seconds: f64,
}

/// Pipeline output before the shared objective accounting.
struct Outcome {
    solver: &'static str,
    costs: Vec<f64>,
    lp_objective: Option<f64>,
    cluster_threshold: Option<f64>,
    solution: Value,
    hybrid_cost: Option<f64>,
    reduced_emax: Option<f64>,
    gamma: Option<f64>,
}

fn edge_solution(sol: &TwoStageEdgeSolution) -> Result<Value> {
    Ok(serde_json::to_value(EdgeSolutionBody {
        first_stage: sol.first_stage.clone(),
        second_stage: sol.second_stage.clone(),
    })?)
}

fn facility_solution(sol: &UflSolution) -> Result<Value> {
    Ok(serde_json::to_value(FacilitySolutionBody {
        first_stage_open: sol.first_stage_open.clone(),
        second_stage_open: sol.second_stage_open.clone(),
    })?)
}

fn center_solution(sol: &KCenterSolution) -> Result<Value> {
    Ok(serde_json::to_value(CenterSolutionBody { centers: sol.centers.clone() })?)
}

/// Oracle optimum, or `None` when the instance is over the enumeration
/// cap; other oracle failures are real errors.
fn oracle_value<S>(result: minemax_core::Result<OracleResult<S>>) -> Result<Option<f64>> {
    match result {
        Ok(r) => Ok(Some(r.opt_value)),
        Err(Error::EnumerationCap { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn oracle_emax(inst: &AnyInstance) -> Result<Option<f64>> {
    match inst {
        AnyInstance::MinCut(mc) => oracle_value(brute_force_mincut(mc, Objective::EMax)),
        AnyInstance::Mst(inst) => oracle_value(brute_force_mst(inst, Objective::EMax)),
        AnyInstance::Steiner(st) => oracle_value(brute_force_steiner(st, Objective::EMax)),
        AnyInstance::Ufl(ufl) => oracle_value(brute_force_ufl(ufl, Objective::EMax)),
        AnyInstance::KCenter(kc) => oracle_value(brute_force_kcenter(kc, Objective::EMax)),
        AnyInstance::Hybrid(h) => oracle_value(brute_force_hybrid(h)),
    }
}

fn scenario_distribution(inst: &AnyInstance) -> ScenarioDistribution {
    match inst {
        AnyInstance::MinCut(mc) => mc.dist().clone(),
        AnyInstance::Mst(inst) => inst.dist().clone(),
        AnyInstance::Steiner(st) => st.dist().clone(),
        AnyInstance::Ufl(ufl) => ufl.dist().clone(),
        AnyInstance::KCenter(kc) => kc.dist().clone(),
        AnyInstance::Hybrid(h) => {
            ScenarioDistribution::new(h.distribution().to_vec())
                .expect("hybrid distribution is validated at parse time")
        }
    }
}

fn assemble(
    name: &str,
    inst: &AnyInstance,
    outcome: Outcome,
    opts: &SolveOptions,
    started: Instant,
) -> Result<RunReport> {
    let dist = scenario_distribution(inst);
    let (emax, emax_method, emax_std_error) = if dist.len() <= EXACT_SCENARIO_CAP {
        (expected_max_exact(&outcome.costs, &dist)?, "exact", None)
    } else {
        let mc = expected_max_monte_carlo(&outcome.costs, &dist, opts.mc_trials, opts.seed)?;
        (mc.estimate, "monte-carlo", Some(mc.std_error))
    };
    let (padded_costs, padded_dist) = pad_to_unit_mass(&outcome.costs, &dist);
    let trunc = truncated_cost(&padded_costs, &padded_dist)?;
    let oracle_opt = oracle_emax(inst)?;
    let objective = outcome.hybrid_cost.unwrap_or(emax);
    let ratio = oracle_opt.filter(|&opt| opt > 0.0).map(|opt| objective / opt);
    Ok(RunReport {
        instance: name.to_string(),
        problem: inst.problem().to_string(),
        solver: outcome.solver.to_string(),
        seed: opts.seed,
        emax,
        emax_method,
        emax_std_error,
        trunc: trunc.value,
        threshold_b: trunc.threshold_b,
        prefix_m: trunc.prefix_m,
        per_scenario_costs: outcome.costs,
        lp_objective: outcome.lp_objective,
        cluster_threshold: outcome.cluster_threshold,
        oracle_opt,
        ratio,
        solution: outcome.solution,
        hybrid_cost: outcome.hybrid_cost,
        reduced_emax: outcome.reduced_emax,
        gamma: outcome.gamma,
        seconds: started.elapsed().as_secs_f64(),
    })
}

pub fn solve_report(name: &str, inst: &AnyInstance, opts: &SolveOptions) -> Result<RunReport> {
    let started = Instant::now();
    let outcome = match inst {
        AnyInstance::MinCut(mc) => {
            let run = solve_mincut(mc)?;
            Outcome {
                solver: "mincut-lp-rounding",
                costs: run.costs,
                lp_objective: Some(run.lp_objective),
                cluster_threshold: None,
                solution: edge_solution(&run.solution)?,
                hybrid_cost: None,
                reduced_emax: None,
                gamma: None,
            }
        }
        AnyInstance::Mst(inst) => {
            let run = solve_mst(inst, opts.seed)?;
            Outcome {
                solver: "mst-lp-rounding",
                costs: run.costs,
                lp_objective: Some(run.lp_objective),
                cluster_threshold: None,
                solution: edge_solution(&run.solution)?,
                hybrid_cost: None,
                reduced_emax: None,
                gamma: None,
            }
        }
        AnyInstance::Steiner(st) => {
            let run = solve_steiner(st)?;
            Outcome {
                solver: "steiner-lp-rounding",
                costs: run.costs,
                lp_objective: Some(run.lp_objective),
                cluster_threshold: None,
                solution: edge_solution(&run.solution)?,
                hybrid_cost: None,
                reduced_emax: None,
                gamma: None,
            }
        }
        AnyInstance::Ufl(ufl) => {
            let run = solve_ufl(ufl)?;
            Outcome {
                solver: "ufl-filter-rounding",
                costs: run.costs,
                lp_objective: Some(run.lp_objective),
                cluster_threshold: None,
                solution: facility_solution(&run.solution)?,
                hybrid_cost: None,
                reduced_emax: None,
                gamma: None,
            }
        }
        AnyInstance::KCenter(kc) => {
            let run = solve_kcenter(kc, opts.epsilon)?;
            Outcome {
                solver: "kcenter-threshold",
                costs: run.costs,
                lp_objective: Some(run.search.value),
                cluster_threshold: Some(run.search.threshold),
                solution: center_solution(&run.solution)?,
                hybrid_cost: None,
                reduced_emax: None,
                gamma: None,
            }
        }
        AnyInstance::Hybrid(h) => {
            let run = solve_hybrid(h, opts.gamma_slack)?;
            let reduced = hybrid_to_minemax(h, run.gamma)?;
            let reduced_value = reduced_emax(&reduced, &run.reduced_solution)?;
            Outcome {
                solver: "hybrid-reduction",
                costs: h.base().evaluate(&run.solution)?,
                lp_objective: None,
                cluster_threshold: None,
                solution: edge_solution(&run.solution)?,
                hybrid_cost: Some(run.cost),
                reduced_emax: Some(reduced_value),
                gamma: Some(run.gamma),
            }
        }
    };
    assemble(name, inst, outcome, opts, started)
}

pub fn evaluate_report(
    name: &str,
    inst: &AnyInstance,
    solution_text: &str,
    opts: &SolveOptions,
) -> Result<RunReport> {
    let started = Instant::now();
    let outcome = match inst {
        AnyInstance::MinCut(mc) => {
            let sol = parse_edge_solution(solution_text)?;
            evaluated(evaluate_mincut(mc, &sol)?, edge_solution(&sol)?)
        }
        AnyInstance::Mst(inst) => {
            let sol = parse_edge_solution(solution_text)?;
            evaluated(evaluate_mst(inst, &sol)?, edge_solution(&sol)?)
        }
        AnyInstance::Steiner(st) => {
            let sol = parse_edge_solution(solution_text)?;
            evaluated(evaluate_steiner(st, &sol)?, edge_solution(&sol)?)
        }
        AnyInstance::Ufl(ufl) => {
            let body: FacilitySolutionBody = parse_solution(solution_text)?;
            let sol = UflSolution::new(body.first_stage_open, body.second_stage_open);
            evaluated(evaluate_ufl(ufl, &sol)?, facility_solution(&sol)?)
        }
        AnyInstance::KCenter(kc) => {
            let body: CenterSolutionBody = parse_solution(solution_text)?;
            let sol = KCenterSolution::new(body.centers);
            evaluated(evaluate_kcenter(kc, &sol)?, center_solution(&sol)?)
        }
        AnyInstance::Hybrid(h) => {
            let sol = parse_edge_solution(solution_text)?;
            let mut outcome =
                evaluated(h.base().evaluate(&sol)?, edge_solution(&sol)?);
            outcome.hybrid_cost = Some(cost_hybrid(h, &sol)?);
            outcome
        }
    };
    assemble(name, inst, outcome, opts, started)
}

fn evaluated(costs: Vec<f64>, solution: Value) -> Outcome {
    Outcome {
        solver: "evaluate",
        costs,
        lp_objective: None,
        cluster_threshold: None,
        solution,
        hybrid_cost: None,
        reduced_emax: None,
        gamma: None,
    }
}

fn parse_solution<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    match serde_json::from_str(text) {
        Ok(body) => Ok(body),
        Err(e) => bail!("solution file does not match the instance's problem: {e}"),
    }
}

fn parse_edge_solution(text: &str) -> Result<TwoStageEdgeSolution> {
    let body: EdgeSolutionBody = parse_solution(text)?;
    Ok(TwoStageEdgeSolution::new(body.first_stage, body.second_stage))
}
