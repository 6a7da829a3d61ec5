//! Reduction from the hybrid robust/stochastic objective to an
//! expected-maximum instance. The hybrid objective blends the worst case
//! and the expectation over a distribution `D` with a caution parameter
//! `rho`:
//!
//! ```text
//! cost_Hyb = rho * max_s cost(X1, X2(s)) + (1 - rho) * sum_s D(s) cost(X1, X2(s))
//! ```
//!
//! Each scenario becomes two copies of itself: a robust copy that always
//! realizes (probability 1, second-stage costs scaled by `rho`) and a
//! stochastic copy realizing with probability `D(s) / gamma`
//! (second-stage costs scaled by `gamma * (1 - rho)`). For a large
//! enough `gamma` any expected-maximum solution translates back at a
//! loss of only `(1 - m/gamma)^-1`, and the translation just keeps the
//! cheaper copy of each scenario's second stage.

use crate::mincut::{self, MinCutInstance};
use crate::objective::ScenarioDistribution;
use crate::steiner::{self, SteinerInstance};
use crate::{Error, Result, TwoStageEdgeSolution};

/// A covering problem usable as the base of the reduction. Spanning-tree
/// instances are excluded: their costs must stay positive integers,
/// which the `rho` / `gamma` scaling destroys.
#[derive(Debug, Clone)]
pub enum CoveringBase {
    MinCut(MinCutInstance),
    Steiner(SteinerInstance),
}

impl CoveringBase {
    pub fn num_scenarios(&self) -> usize {
        match self {
            CoveringBase::MinCut(inst) => inst.num_scenarios(),
            CoveringBase::Steiner(inst) => inst.num_scenarios(),
        }
    }

    pub fn inflation(&self) -> &[f64] {
        match self {
            CoveringBase::MinCut(inst) => inst.inflation(),
            CoveringBase::Steiner(inst) => inst.inflation(),
        }
    }

    pub fn dist(&self) -> &ScenarioDistribution {
        match self {
            CoveringBase::MinCut(inst) => inst.dist(),
            CoveringBase::Steiner(inst) => inst.dist(),
        }
    }

    pub fn edge_costs(&self) -> Vec<f64> {
        match self {
            CoveringBase::MinCut(inst) => inst.graph().edge_costs(),
            CoveringBase::Steiner(inst) => inst.graph().edge_costs(),
        }
    }

    /// Per-scenario cost of a solution under this instance's own
    /// inflations.
    pub fn evaluate(&self, sol: &TwoStageEdgeSolution) -> Result<Vec<f64>> {
        match self {
            CoveringBase::MinCut(inst) => mincut::evaluate_mincut(inst, sol),
            CoveringBase::Steiner(inst) => steiner::evaluate_steiner(inst, sol),
        }
    }

    pub fn solve(&self) -> Result<TwoStageEdgeSolution> {
        match self {
            CoveringBase::MinCut(inst) => Ok(mincut::solve_mincut(inst)?.solution),
            CoveringBase::Steiner(inst) => Ok(steiner::solve_steiner(inst)?.solution),
        }
    }

    /// Same graph and covering requirements with every scenario repeated
    /// twice, under new inflations and probabilities (length `2m`).
    fn duplicated(&self, inflation: Vec<f64>, dist: ScenarioDistribution) -> Result<Self> {
        match self {
            CoveringBase::MinCut(inst) => {
                let mut terminals = inst.terminals().to_vec();
                terminals.extend_from_slice(inst.terminals());
                Ok(CoveringBase::MinCut(MinCutInstance::new(
                    inst.graph().clone(),
                    inst.root(),
                    terminals,
                    inflation,
                    dist,
                )?))
            }
            CoveringBase::Steiner(inst) => {
                let mut scenarios = inst.scenarios().to_vec();
                scenarios.extend_from_slice(inst.scenarios());
                Ok(CoveringBase::Steiner(SteinerInstance::new(
                    inst.graph().clone(),
                    inst.root(),
                    scenarios,
                    inflation,
                    dist,
                )?))
            }
        }
    }
}

/// A covering instance whose scenario probabilities form the
/// distribution `D` of the hybrid objective, plus the caution `rho`.
#[derive(Debug, Clone)]
pub struct HybridInstance {
    base: CoveringBase,
    rho: f64,
}

impl HybridInstance {
    pub fn new(base: CoveringBase, rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) || rho.is_nan() {
            return Err(Error::InvalidValue(format!("caution {rho} outside [0, 1]")));
        }
        let mass = base.dist().mass();
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidValue(format!(
                "scenario probabilities sum to {mass}, expected a distribution"
            )));
        }
        Ok(Self { base, rho })
    }

    pub fn base(&self) -> &CoveringBase {
        &self.base
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn distribution(&self) -> &[f64] {
        self.base.dist().probs()
    }

    pub fn num_scenarios(&self) -> usize {
        self.base.num_scenarios()
    }
}

/// The reduced expected-maximum instance: scenarios `0..m` are the
/// robust copies, `m..2m` the stochastic copies.
#[derive(Debug, Clone)]
pub struct ReducedInstance {
    pub base: CoveringBase,
    pub gamma: f64,
}

/// Picks a scaling factor making every nonzero stochastic-copy cost
/// strictly exceed every robust-copy cost, while `m / gamma` stays at
/// most `slack`. The cost range is bounded conservatively: no second
/// stage can cost more than the worst scenario's total inflated element
/// cost or less than the cheapest nonzero one.
pub fn choose_gamma(inst: &HybridInstance, slack: f64) -> Result<f64> {
    if !slack.is_finite() || slack <= 0.0 || slack >= 1.0 {
        return Err(Error::InvalidValue(format!("slack {slack} outside (0, 1)")));
    }
    if inst.rho == 1.0 {
        // No stochastic copies to dominate.
        return Ok(1.0);
    }
    let m = inst.num_scenarios() as f64;
    let floor = m / slack;
    let costs = inst.base.edge_costs();
    let mut worst_total = 0.0f64;
    let mut min_nonzero = f64::INFINITY;
    for &sigma in inst.base.inflation() {
        let mut total = 0.0;
        for &c in &costs {
            let element = sigma * c;
            total += element;
            if element > 0.0 {
                min_nonzero = min_nonzero.min(element);
            }
        }
        worst_total = worst_total.max(total);
    }
    if !min_nonzero.is_finite() {
        // Every second stage is free; dominance is vacuous.
        return Ok(floor);
    }
    Ok(floor.max(inst.rho / (1.0 - inst.rho) * (worst_total / min_nonzero) + 1.0))
}

pub fn hybrid_to_minemax(inst: &HybridInstance, gamma: f64) -> Result<ReducedInstance> {
    if !gamma.is_finite() || gamma < 1.0 {
        return Err(Error::InvalidValue(format!("gamma {gamma} must be at least 1")));
    }
    let sigma = inst.base.inflation();
    let mut inflation: Vec<f64> = sigma.iter().map(|&s| inst.rho * s).collect();
    inflation.extend(sigma.iter().map(|&s| gamma * (1.0 - inst.rho) * s));
    let mut probs = vec![1.0; inst.num_scenarios()];
    probs.extend(inst.distribution().iter().map(|&d| d / gamma));
    let dist = ScenarioDistribution::new(probs)?;
    Ok(ReducedInstance { base: inst.base.duplicated(inflation, dist)?, gamma })
}

/// Expected-maximum cost of a solution on the reduced instance.
pub fn reduced_emax(reduced: &ReducedInstance, sol: &TwoStageEdgeSolution) -> Result<f64> {
    let costs = reduced.base.evaluate(sol)?;
    crate::objective::expected_max_exact(&costs, reduced.base.dist())
}

/// Folds a reduced solution back onto the original scenarios: each keeps
/// whichever copy's second stage is cheaper under its own inflation,
/// the robust copy on ties.
pub fn interpret_back(
    inst: &HybridInstance,
    reduced_sol: &TwoStageEdgeSolution,
) -> Result<TwoStageEdgeSolution> {
    let m = inst.num_scenarios();
    if reduced_sol.second_stage.len() != 2 * m {
        return Err(Error::LengthMismatch(format!(
            "{} second-stage sets vs {} scenario copies",
            reduced_sol.second_stage.len(),
            2 * m
        )));
    }
    let costs = inst.base.edge_costs();
    let sigma = inst.base.inflation();
    let second = (0..m)
        .map(|s| {
            let price = |set: &[usize]| -> f64 {
                sigma[s] * set.iter().map(|&e| costs[e]).sum::<f64>()
            };
            let robust = &reduced_sol.second_stage[s];
            let stochastic = &reduced_sol.second_stage[m + s];
            if price(stochastic) < price(robust) { stochastic.clone() } else { robust.clone() }
        })
        .collect();
    Ok(TwoStageEdgeSolution::new(reduced_sol.first_stage.clone(), second))
}

/// Lifts a hybrid solution onto the reduced instance by giving both
/// copies of each scenario the same second stage.
pub fn lift_solution(inst: &HybridInstance, sol: &TwoStageEdgeSolution) -> Result<TwoStageEdgeSolution> {
    let m = inst.num_scenarios();
    if sol.second_stage.len() != m {
        return Err(Error::LengthMismatch(format!(
            "{} second-stage sets vs {m} scenarios",
            sol.second_stage.len()
        )));
    }
    let mut second = sol.second_stage.clone();
    second.extend_from_slice(&sol.second_stage);
    Ok(TwoStageEdgeSolution::new(sol.first_stage.clone(), second))
}

pub fn cost_hybrid(inst: &HybridInstance, sol: &TwoStageEdgeSolution) -> Result<f64> {
    let costs = inst.base.evaluate(sol)?;
    let worst = costs.iter().copied().fold(0.0, f64::max);
    let expected: f64 =
        costs.iter().zip(inst.distribution()).map(|(&c, &d)| c * d).sum();
    Ok(inst.rho * worst + (1.0 - inst.rho) * expected)
}

#[derive(Debug, Clone)]
pub struct HybridRun {
    pub gamma: f64,
    pub reduced_solution: TwoStageEdgeSolution,
    pub solution: TwoStageEdgeSolution,
    pub cost: f64,
}

pub fn solve_hybrid(inst: &HybridInstance, slack: f64) -> Result<HybridRun> {
    let gamma = choose_gamma(inst, slack)?;
    let reduced = hybrid_to_minemax(inst, gamma)?;
    let reduced_solution = reduced.base.solve()?;
    let solution = interpret_back(inst, &reduced_solution)?;
    let cost = cost_hybrid(inst, &solution)?;
    Ok(HybridRun { gamma, reduced_solution, solution, cost })
}
