//! Weighted k-median by single-swap local search. Clients carry weights
//! natively; the objective is the weighted sum of each client's distance
//! to its nearest chosen center.

use crate::ufl::Metric;

/// A swap must beat the current cost by this relative margin to be taken,
/// which keeps the search from cycling on float noise.
const IMPROVEMENT: f64 = 1e-6;

/// Weighted connection cost of serving `clients` from `centers`.
pub fn weighted_cost(
    metric: &Metric,
    clients: &[usize],
    weights: &[f64],
    centers: &[usize],
) -> f64 {
    assert!(!centers.is_empty(), "cost needs at least one center");
    clients
        .iter()
        .zip(weights)
        .map(|(&j, &w)| {
            w * centers.iter().map(|&c| metric.dist(c, j)).fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// Picks at most `k` centers from `candidates` serving the weighted
/// `clients`: greedy insertion followed by single-swap descent. Ties
/// break toward the lowest candidate id, so the result is deterministic.
pub fn kmedian_local_search(
    metric: &Metric,
    clients: &[usize],
    weights: &[f64],
    candidates: &[usize],
    k: usize,
) -> (Vec<usize>, f64) {
    assert!(k >= 1, "k-median needs k >= 1");
    assert_eq!(clients.len(), weights.len());
    assert!(!candidates.is_empty(), "k-median needs candidate centers");
    let mut candidates: Vec<usize> = candidates.to_vec();
    candidates.sort_unstable();
    candidates.dedup();

    let mut chosen: Vec<usize> = Vec::new();
    while chosen.len() < k.min(candidates.len()) {
        let mut best: Option<(f64, usize)> = None;
        for &c in &candidates {
            if chosen.contains(&c) {
                continue;
            }
            chosen.push(c);
            let cost = weighted_cost(metric, clients, weights, &chosen);
            chosen.pop();
            if best.map_or(true, |(b, _)| cost < b) {
                best = Some((cost, c));
            }
        }
        chosen.push(best.expect("candidates remain").1);
    }

    let mut current = weighted_cost(metric, clients, weights, &chosen);
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for slot in 0..chosen.len() {
            for &incoming in &candidates {
                if chosen.contains(&incoming) {
                    continue;
                }
                let outgoing = chosen[slot];
                chosen[slot] = incoming;
                let cost = weighted_cost(metric, clients, weights, &chosen);
                chosen[slot] = outgoing;
                if cost < current * (1.0 - IMPROVEMENT)
                    && best.map_or(true, |(b, _, _)| cost < b)
                {
                    best = Some((cost, slot, incoming));
                }
            }
        }
        match best {
            Some((cost, slot, incoming)) => {
                chosen[slot] = incoming;
                current = cost;
            }
            None => break,
        }
    }
    chosen.sort_unstable();
    (chosen, current)
}
