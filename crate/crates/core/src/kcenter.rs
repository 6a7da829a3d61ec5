//! k-center under the expected-maximum objective. Every point is both a
//! potential center and a scenario of its own: when scenario `s`
//! realizes, the cost is the distance from point `s` to its nearest
//! chosen center.
//!
//! The pipeline works through a distance threshold `B`:
//!
//! ```text
//! filtered(B, d) = d if d >= B, else 0
//! P_B: minimize sum_s p_s sum_i filtered(B, c_is) z(s, i)
//!      sum_i z(s, i) >= 1,  z(s, i) <= x(i),  sum_i x(i) <= k
//! ```
//!
//! A geometric search finds the smallest threshold whose relaxation value
//! qualifies; the qualifying assignment scores the points, nearby points
//! (within twice the threshold) fold their probability into one survivor,
//! and a weighted k-median on the survivors picks the centers.

use crate::kmedian;
use crate::lp::{self, LinearProgram, LpSolution, LpStatus, Row};
use crate::objective::ScenarioDistribution;
use crate::ufl::Metric;
use crate::{Error, Result, ONE_MINUS_INV_E};

#[derive(Debug, Clone)]
pub struct KCenterInstance {
    metric: Metric,
    k: usize,
    dist: ScenarioDistribution,
}

impl KCenterInstance {
    /// Point `s` doubles as scenario `s`, so the distribution must have
    /// one probability per point.
    pub fn new(metric: Metric, k: usize, dist: ScenarioDistribution) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidValue("k must be at least 1".into()));
        }
        if dist.len() != metric.len() {
            return Err(Error::LengthMismatch(format!(
                "{} scenario probabilities vs {} points",
                dist.len(),
                metric.len()
            )));
        }
        Ok(Self { metric, k, dist })
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dist(&self) -> &ScenarioDistribution {
        &self.dist
    }

    pub fn num_points(&self) -> usize {
        self.metric.len()
    }

    fn max_distance(&self) -> f64 {
        let n = self.metric.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max(self.metric.dist(i, j));
            }
        }
        best
    }
}

/// Chosen centers; point ids, kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KCenterSolution {
    pub centers: Vec<usize>,
}

impl KCenterSolution {
    pub fn new(mut centers: Vec<usize>) -> Self {
        centers.sort_unstable();
        centers.dedup();
        Self { centers }
    }
}

/// Distances below the threshold count as zero; the threshold itself
/// still counts.
pub fn filtered_distance(threshold: f64, d: f64) -> f64 {
    if d >= threshold {
        d
    } else {
        0.0
    }
}

#[derive(Debug, Clone)]
pub struct ThresholdLp {
    pub lp: LinearProgram,
    pub x: Vec<usize>,
    /// `z[s][i]` fractionally assigns point `s` to center `i`.
    pub z: Vec<Vec<usize>>,
}

/// Builds `P_threshold` for the instance.
pub fn threshold_lp(inst: &KCenterInstance, threshold: f64) -> ThresholdLp {
    let n = inst.num_points();
    let probs = inst.dist.probs();
    let mut lp = LinearProgram::new();
    let x: Vec<usize> = (0..n).map(|_| lp.add_var(0.0, 0.0, 1.0)).collect();
    let mut z = Vec::with_capacity(n);
    for (s, &prob) in probs.iter().enumerate() {
        let row: Vec<usize> = (0..n)
            .map(|i| {
                lp.add_var(prob * filtered_distance(threshold, inst.metric.dist(i, s)), 0.0, 1.0)
            })
            .collect();
        lp.add_row(Row::ge(row.iter().map(|&v| (v, 1.0)).collect(), 1.0));
        for i in 0..n {
            lp.add_row(Row::ge(vec![(x[i], 1.0), (row[i], -1.0)], 0.0));
        }
        z.push(row);
    }
    lp.add_row(Row::ge(x.iter().map(|&v| (v, -1.0)).collect(), -(inst.k as f64)));
    ThresholdLp { lp, x, z }
}

fn solve_threshold(inst: &KCenterInstance, threshold: f64) -> Result<(ThresholdLp, LpSolution)> {
    let vars = threshold_lp(inst, threshold);
    let sol = lp::solve(&vars.lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::InvalidInstance(
            "threshold relaxation should always be optimal".into(),
        ));
    }
    Ok((vars, sol))
}

/// Outcome of the threshold search.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdSearch {
    /// The qualifying threshold (the grid value divided by 1 - 1/e).
    pub threshold: f64,
    /// Relaxation value at that threshold.
    pub value: f64,
    /// Grid value that qualified (0 when the zero test already passed).
    pub grid_point: f64,
    /// Number of relaxations solved along the way.
    pub lp_solves: usize,
}

/// Searches a geometric grid for the smallest qualifying threshold: grid
/// value `g` qualifies when the relaxation at `g / (1 - 1/e)` has value
/// at most `3g / (1 - 1/e)`. Zero is tested before the grid. The grid
/// starts at the smallest nonzero distance scaled by the smallest
/// positive scenario probability (the objective cannot sit below that)
/// and stops past twice the largest distance, where the relaxation value
/// is identically zero, so overflow signals a broken metric.
pub fn search_threshold(inst: &KCenterInstance, epsilon: f64) -> Result<ThresholdSearch> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidValue(format!("epsilon {epsilon} must be positive")));
    }
    let scale_tol = 1e-9 * (1.0 + inst.max_distance());
    let mut lp_solves = 1;
    let (_, zero_sol) = solve_threshold(inst, 0.0)?;
    if zero_sol.objective_value <= scale_tol {
        return Ok(ThresholdSearch {
            threshold: 0.0,
            value: zero_sol.objective_value,
            grid_point: 0.0,
            lp_solves,
        });
    }

    let n = inst.num_points();
    let mut min_nonzero = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = inst.metric.dist(i, j);
            if d > 0.0 {
                min_nonzero = min_nonzero.min(d);
            }
        }
    }
    let min_positive_prob = inst
        .dist
        .probs()
        .iter()
        .copied()
        .filter(|&p| p > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !min_nonzero.is_finite() || !min_positive_prob.is_finite() {
        // A positive relaxation value needs a positive probability on a
        // positive distance.
        return Err(Error::SearchOverflow);
    }

    let mut grid = min_nonzero * min_positive_prob.min(1.0);
    let cap = 2.0 * inst.max_distance();
    while grid <= cap {
        let threshold = grid / ONE_MINUS_INV_E;
        let (_, sol) = solve_threshold(inst, threshold)?;
        lp_solves += 1;
        if sol.objective_value <= 3.0 * grid / ONE_MINUS_INV_E + scale_tol {
            return Ok(ThresholdSearch {
                threshold,
                value: sol.objective_value,
                grid_point: grid,
                lp_solves,
            });
        }
        grid *= 1.0 + epsilon;
    }
    Err(Error::SearchOverflow)
}

#[derive(Debug, Clone)]
pub struct KCenterRun {
    pub solution: KCenterSolution,
    /// Distance from each point to its nearest center.
    pub costs: Vec<f64>,
    pub search: ThresholdSearch,
    /// Points that survived the fold, in marking order.
    pub survivors: Vec<usize>,
    /// Probability mass folded onto each survivor; sums to the original
    /// total mass.
    pub survivor_weights: Vec<f64>,
    /// Weighted k-median objective achieved on the survivors.
    pub kmedian_cost: f64,
}

pub fn solve_kcenter(inst: &KCenterInstance, epsilon: f64) -> Result<KCenterRun> {
    let search = search_threshold(inst, epsilon)?;
    let (vars, sol) = solve_threshold(inst, search.threshold)?;
    let n = inst.num_points();
    let probs = inst.dist.probs();

    // Score each point by its filtered fractional assignment cost.
    let mut order: Vec<(f64, usize)> = (0..n)
        .map(|s| {
            let score: f64 = (0..n)
                .map(|i| {
                    filtered_distance(search.threshold, inst.metric.dist(i, s))
                        * sol.values[vars.z[s][i]]
                })
                .sum();
            (score, s)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    // Fold each point's probability onto the first marked point within
    // twice the threshold; leftovers become survivors themselves.
    let mut survivors: Vec<usize> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for &(_, s) in &order {
        let host = survivors
            .iter()
            .position(|&t| inst.metric.dist(s, t) <= 2.0 * search.threshold);
        match host {
            Some(idx) => weights[idx] += probs[s],
            None => {
                survivors.push(s);
                weights.push(probs[s]);
            }
        }
    }

    let (centers, kmedian_cost) =
        kmedian::kmedian_local_search(&inst.metric, &survivors, &weights, &survivors, inst.k);
    let solution = KCenterSolution::new(centers);
    let costs = evaluate_kcenter(inst, &solution)?;
    Ok(KCenterRun { solution, costs, search, survivors, survivor_weights: weights, kmedian_cost })
}

/// Distance from each point to its nearest center.
pub fn evaluate_kcenter(inst: &KCenterInstance, sol: &KCenterSolution) -> Result<Vec<f64>> {
    if sol.centers.is_empty() {
        return Err(Error::InvalidInstance("no centers chosen".into()));
    }
    if sol.centers.len() > inst.k {
        return Err(Error::InvalidInstance(format!(
            "{} centers exceed the budget k = {}",
            sol.centers.len(),
            inst.k
        )));
    }
    if let Some(&bad) = sol.centers.iter().find(|&&c| c >= inst.num_points()) {
        return Err(Error::InvalidInstance(format!("center id {bad} out of range")));
    }
    Ok((0..inst.num_points())
        .map(|s| {
            sol.centers
                .iter()
                .map(|&c| inst.metric.dist(c, s))
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn inst(points: &[(f64, f64)], k: usize, probs: &[f64]) -> KCenterInstance {
        KCenterInstance::new(
            Metric::from_points(points),
            k,
            ScenarioDistribution::new(probs.to_vec()).unwrap(),
        )
        .unwrap()
    }

    /// Smallest expected maximum over center sets of size at most k.
    fn brute_force_opt(inst: &KCenterInstance) -> f64 {
        let n = inst.num_points();
        let mut best = f64::INFINITY;
        for mask in 1usize..(1 << n) {
            if (mask.count_ones() as usize) > inst.k() {
                continue;
            }
            let centers: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let sol = KCenterSolution::new(centers);
            let costs = evaluate_kcenter(inst, &sol).unwrap();
            let value = objective::expected_max_exact(&costs, inst.dist()).unwrap();
            best = best.min(value);
        }
        best
    }

    #[test]
    fn constructor_validates() {
        let metric = Metric::from_points(&[(0.0, 0.0), (1.0, 0.0)]);
        let two = ScenarioDistribution::new(vec![0.5, 0.5]).unwrap();
        assert!(KCenterInstance::new(metric.clone(), 0, two.clone()).is_err());
        let one = ScenarioDistribution::new(vec![0.5]).unwrap();
        assert!(KCenterInstance::new(metric.clone(), 1, one).is_err());
        assert!(KCenterInstance::new(metric, 1, two).is_ok());
    }

    #[test]
    fn coincident_points_finish_at_threshold_zero() {
        let inst = inst(&[(2.0, 2.0), (2.0, 2.0), (2.0, 2.0)], 1, &[1.0, 0.5, 0.9]);
        let run = solve_kcenter(&inst, 0.25).unwrap();
        assert_eq!(run.search.threshold, 0.0);
        assert_eq!(run.search.value, 0.0);
        assert_eq!(run.costs, vec![0.0, 0.0, 0.0]);
        // All mass folds onto the single survivor.
        assert_eq!(run.survivors.len(), 1);
        assert!((run.survivor_weights[0] - 2.4).abs() < 1e-12);
    }

    #[test]
    fn budget_covering_every_point_costs_nothing() {
        let inst = inst(&[(0.0, 0.0), (3.0, 0.0), (0.0, 4.0)], 3, &[1.0, 1.0, 1.0]);
        let run = solve_kcenter(&inst, 0.25).unwrap();
        assert_eq!(run.search.threshold, 0.0);
        assert_eq!(run.costs, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn two_distant_clusters_get_one_center_each() {
        let points = [(0.0, 0.0), (0.0, 0.0), (50.0, 0.0), (50.0, 0.0)];
        let inst = inst(&points, 2, &[0.8, 0.7, 0.6, 0.5]);
        let run = solve_kcenter(&inst, 0.25).unwrap();
        assert_eq!(run.costs, vec![0.0, 0.0, 0.0, 0.0]);
        let left = run.solution.centers.iter().filter(|&&c| c < 2).count();
        assert_eq!(left, 1);
        assert_eq!(run.solution.centers.len(), 2);
    }

    #[test]
    fn colinear_certain_points_meet_the_search_guarantees() {
        let points: Vec<(f64, f64)> = (0..4).map(|i| (i as f64, 0.0)).collect();
        let inst = inst(&points, 1, &[1.0, 1.0, 1.0, 1.0]);
        let epsilon = 0.1;
        let search = search_threshold(&inst, epsilon).unwrap();
        // With one center among four certain unit-spaced points the best
        // expected maximum is distance 2 (center at either middle point).
        let opt = brute_force_opt(&inst);
        assert!((opt - 2.0).abs() < 1e-12);
        assert!(search.value <= 3.0 * opt / ONE_MINUS_INV_E + 1e-9);
        assert!(search.threshold <= (1.0 + epsilon) * opt / ONE_MINUS_INV_E + 1e-9);
    }

    #[test]
    fn zero_probabilities_do_not_drive_the_search() {
        // The far point never realizes, so threshold zero qualifies.
        let inst = inst(&[(0.0, 0.0), (1.0, 0.0), (100.0, 0.0)], 1, &[1.0, 1.0, 0.0]);
        let search = search_threshold(&inst, 0.25).unwrap();
        assert!(search.value <= 1e-6);
    }

    #[test]
    fn rejects_bad_epsilon_and_oversized_solutions() {
        let inst = inst(&[(0.0, 0.0), (1.0, 0.0)], 1, &[1.0, 1.0]);
        assert!(matches!(search_threshold(&inst, 0.0), Err(Error::InvalidValue(_))));
        let sol = KCenterSolution::new(vec![0, 1]);
        assert!(evaluate_kcenter(&inst, &sol).is_err());
        assert!(evaluate_kcenter(&inst, &KCenterSolution::new(vec![])).is_err());
        assert!(evaluate_kcenter(&inst, &KCenterSolution::new(vec![7])).is_err());
        assert_eq!(
            evaluate_kcenter(&inst, &KCenterSolution::new(vec![1])).unwrap(),
            vec![1.0, 0.0]
        );
    }

    #[test]
    fn random_corpus_meets_structural_and_ratio_guarantees() {
        let mut rng = StdRng::seed_from_u64(4242);
        let epsilon = 0.25;
        for case in 0..10 {
            let n = rng.gen_range(3..=6);
            let k = rng.gen_range(1..=3.min(n));
            let points: Vec<(f64, f64)> =
                (0..n).map(|_| (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0))).collect();
            let probs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..=1.0)).collect();
            let inst = inst(&points, k, &probs);
            let run = solve_kcenter(&inst, epsilon).unwrap();

            // Folded mass is conserved and survivors stay separated.
            let total: f64 = run.survivor_weights.iter().sum();
            assert!((total - inst.dist().mass()).abs() < 1e-12, "case {case}");
            for (a, &s1) in run.survivors.iter().enumerate() {
                for &s2 in &run.survivors[a + 1..] {
                    assert!(
                        inst.metric().dist(s1, s2) > 2.0 * run.search.threshold,
                        "case {case}: survivors {s1} and {s2} too close"
                    );
                }
            }

            let opt = brute_force_opt(&inst);
            let achieved =
                objective::expected_max_exact(&run.costs, inst.dist()).unwrap();
            assert!(
                run.search.value <= 3.0 * opt / ONE_MINUS_INV_E + 1e-7,
                "case {case}: relaxation value {} vs opt {opt}",
                run.search.value
            );
            assert!(
                run.search.threshold <= (1.0 + epsilon) * opt / ONE_MINUS_INV_E + 1e-7,
                "case {case}: threshold {} vs opt {opt}",
                run.search.threshold
            );
            assert!(
                achieved <= run.kmedian_cost + 4.0 * run.search.threshold + 1e-7,
                "case {case}: achieved {achieved} vs median {} + 4*{}",
                run.kmedian_cost,
                run.search.threshold
            );
            assert!(achieved <= 57.0 * opt + 1e-7, "case {case}: achieved {achieved} vs opt {opt}");
        }
    }
}
