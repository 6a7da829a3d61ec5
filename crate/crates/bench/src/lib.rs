//! Seeded instance builders shared by the criterion benchmarks.

use minemax_core::{
    Graph, KCenterInstance, LinearProgram, Metric, MinCutInstance, Row, ScenarioDistribution,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Scenario costs and probabilities sized for the closed-form evaluators.
pub fn scenario_profile(m: usize, seed: u64) -> (Vec<f64>, ScenarioDistribution) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let costs = (0..m).map(|_| rng.gen_range(0.0..=100.0)).collect();
    let mut probs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..=1.0)).collect();
    probs[0] = 1.0;
    (costs, ScenarioDistribution::new(probs).expect("probabilities drawn in range"))
}

/// Connected random graph wrapped in a cut instance with one terminal
/// per scenario.
pub fn mincut_instance(n: usize, extra_edges: usize, m: usize, seed: u64) -> MinCutInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize, f64)> =
        (1..n).map(|v| (rng.gen_range(0..v), v, rng.gen_range(0.5..=8.0))).collect();
    let present: std::collections::BTreeSet<(usize, usize)> =
        edges.iter().map(|&(a, b, _)| (a.min(b), a.max(b))).collect();
    let mut spare: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|p| !present.contains(p))
        .collect();
    for _ in 0..extra_edges.min(spare.len()) {
        let (a, b) = spare.swap_remove(rng.gen_range(0..spare.len()));
        edges.push((a, b, rng.gen_range(0.5..=8.0)));
    }
    let graph = Graph::new(n, edges).expect("random edges stay in range");
    let terminals = (0..m).map(|_| rng.gen_range(1..n)).collect();
    let inflation = (0..m).map(|_| rng.gen_range(0.5..=3.0)).collect();
    let mut probs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..=1.0)).collect();
    probs[0] = 1.0;
    let dist = ScenarioDistribution::new(probs).expect("probabilities drawn in range");
    MinCutInstance::new(graph, 0, terminals, inflation, dist).expect("terminals avoid the root")
}

/// Uniform planar point cloud where every point demands service.
pub fn kcenter_instance(n: usize, k: usize, seed: u64) -> KCenterInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> =
        (0..n).map(|_| (rng.gen_range(0.0..=10.0), rng.gen_range(0.0..=10.0))).collect();
    let mut probs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..=1.0)).collect();
    probs[0] = 1.0;
    let dist = ScenarioDistribution::new(probs).expect("probabilities drawn in range");
    KCenterInstance::new(Metric::from_points(&points), k, dist).expect("k at most n")
}

/// Dense feasible covering LP: minimize a positive combination subject
/// to random `>=` rows touching every variable.
pub fn dense_lp(vars: usize, rows: usize, seed: u64) -> LinearProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lp = LinearProgram::new();
    for _ in 0..vars {
        lp.add_var(rng.gen_range(1.0..=5.0), 0.0, f64::INFINITY);
    }
    for _ in 0..rows {
        let coeffs = (0..vars).map(|v| (v, rng.gen_range(0.1..=2.0))).collect();
        lp.add_row(Row::ge(coeffs, rng.gen_range(1.0..=10.0)));
    }
    lp
}
