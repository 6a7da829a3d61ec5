//! Seeded instance generators behind `minemax gen`.
//!
//! Identical parameters and seed give byte-identical files. Randomly
//! drawn probabilities always include one certain scenario so the
//! truncated objective is defined without padding; explicitly supplied
//! probabilities are taken verbatim.

use anyhow::{bail, Result};
use minemax_core::{
    CoveringBase, Graph, HybridInstance, KCenterInstance, Metric, MinCutInstance, MstInstance,
    ScenarioDistribution, SteinerInstance, UflInstance,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::schema::AnyInstance;

#[derive(Debug, Clone)]
pub struct StarParams {
    pub leaves: usize,
    pub costs: Option<Vec<f64>>,
    pub sigma: f64,
    pub probs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphProblem {
    MinCut,
    Mst,
    Steiner,
}

#[derive(Debug, Clone, Copy)]
pub struct GraphParams {
    pub problem: GraphProblem,
    pub n: usize,
    pub edges: Option<usize>,
    pub scenarios: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricProblem {
    KCenter,
    Ufl,
}

#[derive(Debug, Clone, Copy)]
pub struct MetricParams {
    pub problem: MetricProblem,
    pub n: usize,
    pub k: usize,
    pub facilities: usize,
    pub clients: usize,
    pub scenarios: usize,
    /// Draw points around this many cluster centers instead of uniformly.
    pub clusters: Option<usize>,
}

/// Three decimals keep the serialized corpus short without losing
/// determinism.
fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

fn random_probs(rng: &mut ChaCha8Rng, m: usize) -> ScenarioDistribution {
    let mut probs: Vec<f64> = (0..m).map(|_| round3(rng.gen_range(0.05..=1.0))).collect();
    probs[0] = 1.0;
    ScenarioDistribution::new(probs).expect("rounded probabilities stay in range")
}

/// Random connected edge list: a spanning tree plus distinct extra pairs
/// up to `target` edges.
fn connected_pairs(rng: &mut ChaCha8Rng, n: usize, target: usize) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    let tree: std::collections::BTreeSet<(usize, usize)> = pairs.iter().copied().collect();
    let mut spare: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|p| !tree.contains(p))
        .collect();
    while pairs.len() < target && !spare.is_empty() {
        let pick = rng.gen_range(0..spare.len());
        pairs.push(spare.swap_remove(pick));
    }
    pairs
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, target: usize) -> Result<Graph> {
    let edges = connected_pairs(rng, n, target)
        .into_iter()
        .map(|(a, b)| (a, b, round3(rng.gen_range(0.5..=8.0))))
        .collect();
    Ok(Graph::new(n, edges)?)
}

pub fn gen_star(params: &StarParams, seed: u64) -> Result<AnyInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = params.costs.as_ref().map_or(params.leaves, Vec::len);
    if m == 0 {
        bail!("a star needs at least one leaf");
    }
    let costs = params
        .costs
        .clone()
        .unwrap_or_else(|| (0..m).map(|_| rng.gen_range(1..=10) as f64).collect());
    let dist = match &params.probs {
        Some(probs) => {
            if probs.len() != m {
                bail!("{} probabilities for {m} leaves", probs.len());
            }
            ScenarioDistribution::new(probs.clone())?
        }
        None => random_probs(&mut rng, m),
    };
    let edges = costs.iter().enumerate().map(|(i, &c)| (0, i + 1, c)).collect();
    let graph = Graph::new(m + 1, edges)?;
    Ok(AnyInstance::MinCut(MinCutInstance::new(
        graph,
        0,
        (1..=m).collect(),
        vec![params.sigma; m],
        dist,
    )?))
}

pub fn gen_graph(params: &GraphParams, seed: u64) -> Result<AnyInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.n;
    if n < 2 {
        bail!("a graph instance needs at least two vertices");
    }
    let max_edges = n * (n - 1) / 2;
    let target = params.edges.unwrap_or((2 * n - 3).min(max_edges));
    if !(n - 1..=max_edges).contains(&target) {
        bail!("edge count {target} outside the connected range {}..={max_edges}", n - 1);
    }
    let m = params.scenarios.max(1);
    let graph = random_graph(&mut rng, n, target)?;
    let ne = graph.num_edges();
    let dist = random_probs(&mut rng, m);
    match params.problem {
        GraphProblem::MinCut => {
            let terminals = (0..m).map(|_| rng.gen_range(1..n)).collect();
            let inflation = (0..m).map(|_| round3(rng.gen_range(0.5..=3.0))).collect();
            Ok(AnyInstance::MinCut(MinCutInstance::new(graph, 0, terminals, inflation, dist)?))
        }
        GraphProblem::Mst => {
            // The alternate rounding scales by cost classes, so both stages
            // need positive integer costs; redraw the graph accordingly.
            let edges = graph
                .edges()
                .iter()
                .map(|e| (e.u, e.v, rng.gen_range(1..=9) as f64))
                .collect();
            let graph = Graph::new(n, edges)?;
            let cost2 = (0..m)
                .map(|_| (0..ne).map(|_| rng.gen_range(1..=9) as f64).collect())
                .collect();
            Ok(AnyInstance::Mst(MstInstance::new(graph, cost2, dist)?))
        }
        GraphProblem::Steiner => {
            let scenarios = (0..m)
                .map(|_| {
                    let mut terms: Vec<usize> =
                        (1..n).filter(|_| rng.gen_bool(0.5)).collect();
                    if terms.is_empty() {
                        terms.push(rng.gen_range(1..n));
                    }
                    terms
                })
                .collect();
            let inflation = (0..m).map(|_| round3(rng.gen_range(0.5..=3.0))).collect();
            Ok(AnyInstance::Steiner(SteinerInstance::new(graph, 0, scenarios, inflation, dist)?))
        }
    }
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, clusters: Option<usize>) -> Vec<(f64, f64)> {
    match clusters {
        None => (0..n)
            .map(|_| (round3(rng.gen_range(0.0..=10.0)), round3(rng.gen_range(0.0..=10.0))))
            .collect(),
        Some(c) => {
            let centers: Vec<(f64, f64)> = (0..c.max(1))
                .map(|_| (rng.gen_range(0.0..=10.0), rng.gen_range(0.0..=10.0)))
                .collect();
            (0..n)
                .map(|i| {
                    let (cx, cy) = centers[i % centers.len()];
                    (
                        round3(cx + rng.gen_range(-0.8..=0.8)),
                        round3(cy + rng.gen_range(-0.8..=0.8)),
                    )
                })
                .collect()
        }
    }
}

pub fn gen_metric(params: &MetricParams, seed: u64) -> Result<AnyInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match params.problem {
        MetricProblem::KCenter => {
            if params.n == 0 {
                bail!("a k-center instance needs at least one point");
            }
            let points = random_points(&mut rng, params.n, params.clusters);
            let dist = random_probs(&mut rng, params.n);
            Ok(AnyInstance::KCenter(KCenterInstance::new(
                Metric::from_points(&points),
                params.k,
                dist,
            )?))
        }
        MetricProblem::Ufl => {
            let (nf, nc) = (params.facilities, params.clients);
            if nf == 0 || nc == 0 {
                bail!("facility location needs at least one facility and one client");
            }
            let m = params.scenarios.max(1);
            let points = random_points(&mut rng, nf + nc, params.clusters);
            let mut demand: Vec<Vec<bool>> =
                (0..m).map(|_| (0..nc).map(|_| rng.gen_bool(0.5)).collect()).collect();
            // An all-quiet corpus entry would have optimum zero; keep one
            // demand pinned so ratios stay meaningful.
            demand[0][0] = true;
            let open1 = (0..nf).map(|_| round3(rng.gen_range(0.5..=5.0))).collect();
            let open2 = (0..m)
                .map(|_| (0..nf).map(|_| round3(rng.gen_range(0.5..=5.0))).collect())
                .collect();
            let dist = random_probs(&mut rng, m);
            Ok(AnyInstance::Ufl(UflInstance::new(
                Metric::from_points(&points),
                nf,
                demand,
                open1,
                open2,
                dist,
            )?))
        }
    }
}

/// Wraps an existing covering instance into the hybrid objective; the
/// base's probabilities become the stochastic distribution and must sum
/// to one.
pub fn wrap_hybrid(base: AnyInstance, rho: f64) -> Result<AnyInstance> {
    let base = match base {
        AnyInstance::MinCut(mc) => CoveringBase::MinCut(mc),
        AnyInstance::Steiner(st) => CoveringBase::Steiner(st),
        other => bail!("hybrid-wrap expects a mincut or steiner base, got {}", other.problem()),
    };
    Ok(AnyInstance::Hybrid(HybridInstance::new(base, rho)?))
}
