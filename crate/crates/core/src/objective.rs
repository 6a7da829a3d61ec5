//! Scenario model and the two planning objectives.
//!
//! Scenarios realize independently: scenario `s` appears with probability
//! `p_s`, so the realized set `A` has probability
//! `prod_{s in A} p_s * prod_{s not in A} (1 - p_s)`. Given per-scenario
//! costs `c_s >= 0`, the expected-maximum objective is
//!
//! ```text
//! EMax(c, p) = E_A [ max_{s in A} c_s ]          (max over {} is 0)
//! ```
//!
//! and the truncated objective, the tractable proxy optimized by every
//! solver in this crate, is
//!
//! ```text
//! Trunc(c, p) = min_{B >= 0}  B + sum_s p_s * (c_s - B)^+
//! ```
//!
//! When the total mass `sum_s p_s` is at least one (pad with zero-cost,
//! probability-one dummies otherwise) the two interleave as
//!
//! ```text
//! (1 - 1/e) * Trunc(c, p) <= EMax(c, p) <= Trunc(c, p)
//! ```
//!
//! so minimizing `Trunc` loses at most a factor `1/(1 - 1/e) ~ 1.582`.
//! The minimizing `B` has a closed form: sort costs descending and take
//! the cost at which the cumulative probability first reaches one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// `1 - 1/e`, the sandwich factor between the truncated objective and the
/// expected maximum.
pub const ONE_MINUS_INV_E: f64 = 1.0 - 1.0 / std::f64::consts::E;

/// Cap on the scenario count for exact expectation by enumeration-equivalent
/// formulas; callers with more scenarios must sample.
pub const EXACT_SCENARIO_CAP: usize = 22;

/// Slack used when checking that probability mass reaches one; guards
/// against accumulation error in sums like `0.1 * 10`.
pub(crate) const MASS_TOL: f64 = 1e-9;

/// Independent per-scenario realization probabilities.
///
/// Probabilities live in `[0, 1]`; the total mass may be below one (the
/// truncation operations reject that, with padding as the remedy) and is
/// deliberately allowed to exceed one.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDistribution {
    probs: Vec<f64>,
}

impl ScenarioDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        for (s, &p) in probs.iter().enumerate() {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidValue(format!(
                    "probability of scenario {s} is {p}, not in [0, 1]"
                )));
            }
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Total probability mass, summed in scenario order.
    pub fn mass(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Closed-form minimizer of the truncated objective.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationResult {
    /// The truncation threshold `B`, the largest minimizer.
    pub threshold_b: f64,
    /// Scenario indices whose cost reaches `B` when scanned in descending
    /// cost order, up to cumulative mass one; sorted ascending. Its mass
    /// always lies in `[1, 2)`.
    pub prefix_m: Vec<usize>,
    /// The objective value `B + sum_s p_s * (c_s - B)^+`.
    pub value: f64,
}

/// Point estimate of the expected maximum with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

fn check_costs(costs: &[f64], dist: &ScenarioDistribution) -> Result<()> {
    if costs.len() != dist.len() {
        return Err(Error::LengthMismatch(format!(
            "{} costs vs {} scenario probabilities",
            costs.len(),
            dist.len()
        )));
    }
    for (s, &c) in costs.iter().enumerate() {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::InvalidValue(format!(
                "cost of scenario {s} is {c}, not a finite nonnegative number"
            )));
        }
    }
    Ok(())
}

/// Scenario indices sorted by descending cost, ties by ascending index.
fn descending_order(costs: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..costs.len()).collect();
    order.sort_by(|&i, &j| costs[j].total_cmp(&costs[i]).then(i.cmp(&j)));
    order
}

/// Exact expected maximum `E_A[max_{s in A} c_s]` over independently
/// realized scenarios.
///
/// Grouping the `2^m` realizations by their maximizing scenario collapses
/// the expectation to a single sweep in descending cost order: scenario
/// `(k)` is the maximum exactly when it realizes and no costlier scenario
/// does, so
///
/// ```text
/// EMax = sum_k c_(k) * p_(k) * prod_{j < k} (1 - p_(j))
/// ```
///
/// The scenario cap is kept because the expectation contract is an
/// exact-enumeration one; use [`expected_max_monte_carlo`] beyond it.
pub fn expected_max_exact(costs: &[f64], dist: &ScenarioDistribution) -> Result<f64> {
    check_costs(costs, dist)?;
    if dist.len() > EXACT_SCENARIO_CAP {
        return Err(Error::EnumerationCap { size: dist.len(), cap: EXACT_SCENARIO_CAP });
    }
    let mut none_costlier = 1.0;
    let mut total = 0.0;
    for &s in &descending_order(costs) {
        total += costs[s] * dist.probs()[s] * none_costlier;
        none_costlier *= 1.0 - dist.probs()[s];
    }
    Ok(total)
}

/// Monte-Carlo estimate of the expected maximum.
///
/// Trial `t` draws from an independent counter-based stream `t` of a
/// ChaCha8 generator seeded with `seed`, so estimates are reproducible
/// and adding trials never perturbs earlier ones.
pub fn expected_max_monte_carlo(
    costs: &[f64],
    dist: &ScenarioDistribution,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    check_costs(costs, dist)?;
    if trials == 0 {
        return Err(Error::InvalidValue("trial count must be positive".into()));
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for trial in 0..trials {
        let mut rng = base.clone();
        rng.set_stream(trial as u64);
        let mut max = 0.0f64;
        for (s, &p) in dist.probs().iter().enumerate() {
            if rng.gen::<f64>() < p {
                max = max.max(costs[s]);
            }
        }
        sum += max;
        sum_sq += max * max;
    }
    let n = trials as f64;
    let estimate = sum / n;
    let variance = if trials > 1 {
        ((sum_sq - n * estimate * estimate) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(MonteCarloEstimate { estimate, std_error: (variance / n).sqrt() })
}

/// Closed-form evaluation of the truncated objective.
///
/// Sort costs descending and let `b` be the first position where the
/// cumulative probability reaches one; then `B = c_(b)` is the largest
/// minimizer of `B + sum_s p_s (c_s - B)^+` and the prefix `M = {(1..b)}`
/// carries mass in `[1, 2)`. Requires total mass at least one: with less,
/// the objective decreases forever as `B` grows and the truncation bound
/// on the expected maximum fails.
///
/// The value is summed in scenario input order, matching a direct
/// evaluation of the objective at `B` term for term.
pub fn truncated_cost(costs: &[f64], dist: &ScenarioDistribution) -> Result<TruncationResult> {
    check_costs(costs, dist)?;
    let mass = dist.mass();
    if mass < 1.0 - MASS_TOL {
        return Err(Error::MassBelowOne { mass });
    }
    let order = descending_order(costs);
    let mut cumulative = 0.0;
    let mut b = order.len();
    for (rank, &s) in order.iter().enumerate() {
        cumulative += dist.probs()[s];
        if cumulative >= 1.0 - MASS_TOL {
            b = rank + 1;
            break;
        }
    }
    let threshold_b = costs[order[b - 1]];
    let mut prefix_m: Vec<usize> = order[..b].to_vec();
    prefix_m.sort_unstable();
    let mut value = threshold_b;
    for (s, &c) in costs.iter().enumerate() {
        value += dist.probs()[s] * (c - threshold_b).max(0.0);
    }
    Ok(TruncationResult { threshold_b, prefix_m, value })
}

/// Two-sided bound on the expected maximum obtained from the truncation:
/// returns `((1 - 1/e) * Trunc, Trunc)`.
pub fn etrick_bounds(costs: &[f64], dist: &ScenarioDistribution) -> Result<(f64, f64)> {
    let upper = truncated_cost(costs, dist)?.value;
    Ok((ONE_MINUS_INV_E * upper, upper))
}

/// Appends a zero-cost, probability-one dummy scenario if the mass is
/// below one, making the pair acceptable to [`truncated_cost`].
pub fn pad_to_unit_mass(
    costs: &[f64],
    dist: &ScenarioDistribution,
) -> (Vec<f64>, ScenarioDistribution) {
    let mut costs = costs.to_vec();
    let mut probs = dist.probs().to_vec();
    if dist.mass() < 1.0 - MASS_TOL {
        costs.push(0.0);
        probs.push(1.0);
    }
    (costs, ScenarioDistribution { probs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dist(probs: &[f64]) -> ScenarioDistribution {
        ScenarioDistribution::new(probs.to_vec()).unwrap()
    }

    /// Reference expectation by explicit enumeration of all 2^m realized
    /// sets; exponential, test-only.
    fn emax_by_enumeration(costs: &[f64], probs: &[f64]) -> f64 {
        let m = costs.len();
        let mut total = 0.0;
        for mask in 0u32..(1 << m) {
            let mut pr = 1.0;
            let mut max = 0.0f64;
            for s in 0..m {
                if mask >> s & 1 == 1 {
                    pr *= probs[s];
                    max = max.max(costs[s]);
                } else {
                    pr *= 1.0 - probs[s];
                }
            }
            total += pr * max;
        }
        total
    }

    /// Truncated objective evaluated at one grid candidate, with the same
    /// input-order summation as the closed form.
    fn trunc_at(costs: &[f64], probs: &[f64], b: f64) -> f64 {
        let mut value = b;
        for (s, &c) in costs.iter().enumerate() {
            value += probs[s] * (c - b).max(0.0);
        }
        value
    }

    #[test]
    fn expected_max_certain_single_scenario() {
        assert_eq!(expected_max_exact(&[5.0], &dist(&[1.0])).unwrap(), 5.0);
    }

    #[test]
    fn expected_max_two_scenarios() {
        // max is 4 w.p. 0.5, else the certain scenario's 2.
        let v = expected_max_exact(&[2.0, 4.0], &dist(&[1.0, 0.5])).unwrap();
        assert_eq!(v, 3.0);
    }

    #[test]
    fn expected_max_of_zero_costs_is_zero() {
        let v = expected_max_exact(&[0.0, 0.0], &dist(&[0.3, 0.9])).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn expected_max_empty_is_zero() {
        assert_eq!(expected_max_exact(&[], &dist(&[])).unwrap(), 0.0);
    }

    #[test]
    fn expected_max_matches_enumeration_on_random_instances() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let m = rng.gen_range(1..=10);
            let costs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..20.0)).collect();
            let probs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let exact = expected_max_exact(&costs, &dist(&probs)).unwrap();
            let brute = emax_by_enumeration(&costs, &probs);
            assert!((exact - brute).abs() <= 1e-12 * (1.0 + brute.abs()));
        }
    }

    #[test]
    fn expected_max_ignores_scenario_order() {
        let costs = [3.0, 3.0, 1.0, 7.0];
        let probs = [0.2, 0.9, 1.0, 0.4];
        let base = expected_max_exact(&costs, &dist(&probs)).unwrap();
        // A permutation with the tied costs swapped must not move the value.
        let perm = [1usize, 0, 3, 2];
        let pc: Vec<f64> = perm.iter().map(|&i| costs[i]).collect();
        let pp: Vec<f64> = perm.iter().map(|&i| probs[i]).collect();
        let permuted = expected_max_exact(&pc, &dist(&pp)).unwrap();
        assert!((base - permuted).abs() <= 1e-12);
    }

    #[test]
    fn expected_max_rejects_too_many_scenarios() {
        let costs = vec![1.0; EXACT_SCENARIO_CAP + 1];
        let probs = vec![0.5; EXACT_SCENARIO_CAP + 1];
        let err = expected_max_exact(&costs, &dist(&probs)).unwrap_err();
        assert!(matches!(err, Error::EnumerationCap { .. }));
    }

    #[test]
    fn monte_carlo_certain_scenario_has_zero_error() {
        let est = expected_max_monte_carlo(&[5.0], &dist(&[1.0]), 10, 3).unwrap();
        assert_eq!(est.estimate, 5.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn monte_carlo_tracks_exact_value() {
        let costs = [2.0, 4.0];
        let d = dist(&[1.0, 0.5]);
        let est = expected_max_monte_carlo(&costs, &d, 200_000, 7).unwrap();
        assert!(est.std_error > 0.0);
        assert!((est.estimate - 3.0).abs() <= 4.0 * est.std_error);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let costs = [1.0, 6.0, 2.5];
        let d = dist(&[0.8, 0.25, 0.6]);
        let a = expected_max_monte_carlo(&costs, &d, 5000, 42).unwrap();
        let b = expected_max_monte_carlo(&costs, &d, 5000, 42).unwrap();
        assert_eq!(a, b);
        let c = expected_max_monte_carlo(&costs, &d, 5000, 43).unwrap();
        assert_ne!(a.estimate, c.estimate);
    }

    #[test]
    fn monte_carlo_rejects_zero_trials() {
        let err = expected_max_monte_carlo(&[1.0], &dist(&[1.0]), 0, 0).unwrap_err();
        assert!(matches!(err, Error::InvalidValue(_)));
    }

    #[test]
    fn truncation_single_certain_scenario() {
        let r = truncated_cost(&[7.0], &dist(&[1.0])).unwrap();
        assert_eq!(r.threshold_b, 7.0);
        assert_eq!(r.prefix_m, vec![0]);
        assert_eq!(r.value, 7.0);
    }

    #[test]
    fn truncation_mixes_partial_scenario() {
        // B stops at the certain cost 2; the rare cost 4 pays 0.5 * (4 - 2).
        let r = truncated_cost(&[4.0, 2.0], &dist(&[0.5, 1.0])).unwrap();
        assert_eq!(r.threshold_b, 2.0);
        assert_eq!(r.prefix_m, vec![0, 1]);
        assert_eq!(r.value, 3.0);
    }

    #[test]
    fn truncation_prefix_stops_at_unit_mass() {
        let costs = [10.0, 8.0, 6.0, 5.0, 4.0, 3.0, 1.0];
        let probs = [0.4, 0.4, 0.3, 0.6, 0.7, 1.0, 0.2];
        let r = truncated_cost(&costs, &dist(&probs)).unwrap();
        assert_eq!(r.threshold_b, 6.0);
        assert_eq!(r.prefix_m, vec![0, 1, 2]);
        let expected = 6.0 + 0.4 * 4.0 + 0.4 * 2.0;
        assert!((r.value - expected).abs() < 1e-12);
    }

    #[test]
    fn truncation_value_matches_grid_minimum_bit_for_bit() {
        // Integer costs and 64ths as probabilities keep every partial sum
        // exactly representable, so the closed form must equal the grid
        // scan with zero tolerance, plateau ties included.
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..500 {
            let m = rng.gen_range(1..=9);
            let costs: Vec<f64> = (0..m).map(|_| rng.gen_range(0..=30) as f64).collect();
            let mut probs: Vec<f64> =
                (0..m).map(|_| rng.gen_range(1..=64) as f64 / 64.0).collect();
            probs[rng.gen_range(0..m)] = 1.0;
            let r = truncated_cost(&costs, &dist(&probs)).unwrap();
            // Grid = {0} plus every cost; the optimum lies on the grid.
            let grid_min = std::iter::once(0.0)
                .chain(costs.iter().copied())
                .map(|b| trunc_at(&costs, &probs, b))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(r.value, grid_min);
        }
    }

    #[test]
    fn truncation_value_is_grid_minimum_up_to_rounding() {
        let mut rng = StdRng::seed_from_u64(24);
        for _ in 0..300 {
            let m = rng.gen_range(1..=9);
            let costs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..30.0)).collect();
            let mut probs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..=1.0)).collect();
            probs[rng.gen_range(0..m)] = 1.0;
            let r = truncated_cost(&costs, &dist(&probs)).unwrap();
            let grid_min = std::iter::once(0.0)
                .chain(costs.iter().copied())
                .map(|b| trunc_at(&costs, &probs, b))
                .fold(f64::INFINITY, f64::min);
            assert!((r.value - grid_min).abs() <= 1e-12 * (1.0 + grid_min));
        }
    }

    #[test]
    fn truncation_threshold_is_largest_minimizer() {
        let mut rng = StdRng::seed_from_u64(29);
        for _ in 0..300 {
            let m = rng.gen_range(1..=8);
            let costs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..10.0)).collect();
            let mut probs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..=1.0)).collect();
            probs[0] = 1.0;
            let r = truncated_cost(&costs, &dist(&probs)).unwrap();
            assert!(costs.contains(&r.threshold_b));
            for &c in &costs {
                if c > r.threshold_b {
                    assert!(trunc_at(&costs, &probs, c) > r.value);
                }
            }
        }
    }

    #[test]
    fn truncation_prefix_mass_stays_in_window() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..300 {
            let m = rng.gen_range(1..=10);
            let costs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..10.0)).collect();
            let mut probs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..=1.0)).collect();
            probs[m - 1] = 1.0;
            let r = truncated_cost(&costs, &dist(&probs)).unwrap();
            let mass: f64 = r.prefix_m.iter().map(|&s| probs[s]).sum();
            assert!((1.0 - 1e-9..2.0).contains(&mass));
        }
    }

    #[test]
    fn truncation_ties_break_toward_lower_index() {
        let r = truncated_cost(&[5.0, 5.0, 5.0], &dist(&[0.6, 0.2, 0.6])).unwrap();
        // Descending order with ties by index scans 0, 1, 2 and stops at 2.
        assert_eq!(r.prefix_m, vec![0, 1, 2]);
        assert_eq!(r.threshold_b, 5.0);
    }

    #[test]
    fn truncation_rejects_low_mass() {
        let err = truncated_cost(&[1.0, 2.0], &dist(&[0.3, 0.4])).unwrap_err();
        assert!(matches!(err, Error::MassBelowOne { .. }));
    }

    #[test]
    fn truncation_accepts_accumulated_unit_mass() {
        // 0.1 summed ten times lands just below 1.0 in binary.
        let costs = vec![2.0; 10];
        let probs = vec![0.1; 10];
        let r = truncated_cost(&costs, &dist(&probs)).unwrap();
        assert_eq!(r.threshold_b, 2.0);
        assert_eq!(r.prefix_m.len(), 10);
    }

    #[test]
    fn padding_restores_unit_mass() {
        let (costs, padded) = pad_to_unit_mass(&[1.0, 2.0], &dist(&[0.3, 0.4]));
        assert_eq!(costs, vec![1.0, 2.0, 0.0]);
        assert_eq!(padded.probs(), &[0.3, 0.4, 1.0]);
        let r = truncated_cost(&costs, &padded).unwrap();
        assert_eq!(r.threshold_b, 0.0);
        assert!((r.value - (0.3 + 0.8)).abs() < 1e-12);
        // Already-sufficient mass passes through untouched.
        let (c2, d2) = pad_to_unit_mass(&[1.0], &dist(&[1.0]));
        assert_eq!(c2, vec![1.0]);
        assert_eq!(d2.probs(), &[1.0]);
    }

    #[test]
    fn padding_leaves_expected_max_unchanged() {
        let mut rng = StdRng::seed_from_u64(37);
        for _ in 0..100 {
            let m = rng.gen_range(1..=8);
            let costs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..10.0)).collect();
            let probs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..0.4)).collect();
            let d = dist(&probs);
            let before = expected_max_exact(&costs, &d).unwrap();
            let (pc, pd) = pad_to_unit_mass(&costs, &d);
            let after = expected_max_exact(&pc, &pd).unwrap();
            assert!((before - after).abs() <= 1e-12 * (1.0 + before));
        }
    }

    #[test]
    fn sandwich_holds_on_random_instances() {
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..300 {
            let m = rng.gen_range(1..=10);
            let costs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..15.0)).collect();
            let mut probs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..=1.0)).collect();
            probs[rng.gen_range(0..m)] = 1.0;
            let d = dist(&probs);
            let emax = expected_max_exact(&costs, &d).unwrap();
            let (lo, hi) = etrick_bounds(&costs, &d).unwrap();
            let tol = 1e-9 * (1.0 + hi);
            assert!(lo <= emax + tol, "lower bound {lo} above expected max {emax}");
            assert!(emax <= hi + tol, "expected max {emax} above truncation {hi}");
            assert!((lo - ONE_MINUS_INV_E * hi).abs() <= 1e-12 * (1.0 + hi));
        }
    }

    #[test]
    fn negative_or_mismatched_inputs_are_rejected() {
        assert!(matches!(
            expected_max_exact(&[-1.0], &dist(&[1.0])).unwrap_err(),
            Error::InvalidValue(_)
        ));
        assert!(matches!(
            truncated_cost(&[1.0, 2.0], &dist(&[1.0])).unwrap_err(),
            Error::LengthMismatch(_)
        ));
        assert!(ScenarioDistribution::new(vec![1.2]).is_err());
        assert!(ScenarioDistribution::new(vec![-0.1]).is_err());
        assert!(ScenarioDistribution::new(vec![f64::NAN]).is_err());
    }
}
