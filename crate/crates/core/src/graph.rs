//! Shared graph machinery: undirected weighted graphs, union-find,
//! max-flow/min-cut, shortest paths and spanning forests.
//!
//! All two-stage network problems address edges by their index into the
//! instance graph's edge list, so helper routines take per-edge weight
//! slices aligned with that list rather than baking weights into the
//! graph itself.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::{Error, Result};

/// An undirected simple graph; `cost` is the base (first-stage) price of
/// the edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("graph needs at least one vertex".into()));
        }
        let mut seen = std::collections::HashSet::new();
        let mut list = Vec::with_capacity(edges.len());
        for (id, (u, v, cost)) in edges.into_iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvalidInstance(format!(
                    "edge {id} endpoint out of range ({u}, {v}) with {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidInstance(format!("edge {id} is a self-loop at {u}")));
            }
            if !cost.is_finite() || cost < 0.0 {
                return Err(Error::InvalidValue(format!("edge {id} cost {cost} is invalid")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidInstance(format!(
                    "duplicate edge {id} between {u} and {v}"
                )));
            }
            list.push(Edge { u, v, cost });
        }
        Ok(Self { n, edges: list })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_costs(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.cost).collect()
    }

    /// Per-vertex list of `(edge id, other endpoint)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (id, e) in self.edges.iter().enumerate() {
            adj[e.u].push((id, e.v));
            adj[e.v].push((id, e.u));
        }
        adj
    }

    /// Vertices reachable from `start` using only edges enabled by the
    /// predicate.
    pub fn reachable(&self, start: usize, enabled: impl Fn(usize) -> bool) -> Vec<bool> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &(id, w) in &adj[v] {
                if enabled(id) && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}

/// Disjoint-set forest with union by rank and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n], components: n }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the two sets; returns false when already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[lo] = hi;
        if self.rank[ra] == self.rank[rb] {
            self.rank[hi] += 1;
        }
        self.components -= 1;
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

/// Capacity below which a residual arc counts as saturated.
const FLOW_TOL: f64 = 1e-12;

/// Maximum flow and a matching minimum cut from `source` to the sink set.
///
/// Multiple sinks are merged through an implicit super-sink. Returns the
/// cut capacity and the source-side crossing edges (ids, ascending);
/// removing them disconnects `source` from every sink. Edge capacities
/// come from `weights`, aligned with the graph's edge list; each
/// undirected edge carries its capacity in both directions.
pub fn max_flow_min_cut(
    graph: &Graph,
    weights: &[f64],
    source: usize,
    sinks: &[usize],
) -> Result<(f64, Vec<usize>)> {
    if weights.len() != graph.num_edges() {
        return Err(Error::LengthMismatch(format!(
            "{} weights vs {} edges",
            weights.len(),
            graph.num_edges()
        )));
    }
    if sinks.is_empty() {
        return Ok((0.0, Vec::new()));
    }
    if sinks.contains(&source) {
        return Err(Error::InvalidInstance("source cannot be a sink".into()));
    }
    let mut sink_set = vec![false; graph.n()];
    for &t in sinks {
        if t >= graph.n() {
            return Err(Error::InvalidInstance(format!("sink {t} out of range")));
        }
        sink_set[t] = true;
    }

    // Forward/backward residual capacity per undirected edge: arc 2e runs
    // u -> v, arc 2e + 1 runs v -> u.
    let mut cap: Vec<f64> = Vec::with_capacity(2 * graph.num_edges());
    for &w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidValue(format!("capacity {w} is invalid")));
        }
        cap.push(w);
        cap.push(w);
    }
    let adj = graph.adjacency();

    // Edmonds-Karp: augment along breadth-first shortest residual paths.
    let mut flow = 0.0;
    loop {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; graph.n()];
        let mut queue = std::collections::VecDeque::from([source]);
        let mut reached_sink = None;
        'bfs: while let Some(v) = queue.pop_front() {
            for &(id, w) in &adj[v] {
                let arc = if graph.edges()[id].u == v { 2 * id } else { 2 * id + 1 };
                if cap[arc] > FLOW_TOL && prev[w].is_none() && w != source {
                    prev[w] = Some((arc, v));
                    if sink_set[w] {
                        reached_sink = Some(w);
                        break 'bfs;
                    }
                    queue.push_back(w);
                }
            }
        }
        let Some(sink) = reached_sink else { break };
        let mut bottleneck = f64::INFINITY;
        let mut v = sink;
        while v != source {
            let (arc, from) = prev[v].unwrap();
            bottleneck = bottleneck.min(cap[arc]);
            v = from;
        }
        let mut v = sink;
        while v != source {
            let (arc, from) = prev[v].unwrap();
            cap[arc] -= bottleneck;
            cap[arc ^ 1] += bottleneck;
            v = from;
        }
        flow += bottleneck;
    }

    // Source side of the residual graph gives the min cut.
    let mut side = vec![false; graph.n()];
    side[source] = true;
    let mut stack = vec![source];
    while let Some(v) = stack.pop() {
        for &(id, w) in &adj[v] {
            let arc = if graph.edges()[id].u == v { 2 * id } else { 2 * id + 1 };
            if cap[arc] > FLOW_TOL && !side[w] {
                side[w] = true;
                stack.push(w);
            }
        }
    }
    let cut: Vec<usize> = (0..graph.num_edges())
        .filter(|&id| side[graph.edges()[id].u] != side[graph.edges()[id].v])
        .collect();
    let cut_value: f64 = cut.iter().map(|&id| weights[id]).sum();
    debug_assert!((cut_value - flow).abs() <= 1e-6 * (1.0 + flow.abs()));
    Ok((cut_value, cut))
}

/// Multi-source Dijkstra. Returns per-vertex distance and the edge used
/// to reach it; unreachable vertices keep infinite distance. Negative
/// rounding noise in weights is clamped to zero.
pub fn dijkstra_multi(
    graph: &Graph,
    weights: &[f64],
    sources: &[usize],
) -> (Vec<f64>, Vec<Option<(usize, usize)>>) {
    let adj = graph.adjacency();
    let mut dist = vec![f64::INFINITY; graph.n()];
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; graph.n()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Reverse((ordered(0.0), s)));
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        let d = f64::from_bits(d ^ SIGN_FLIP);
        if d > dist[v] {
            continue;
        }
        for &(id, w) in &adj[v] {
            let next = d + weights[id].max(0.0);
            if next < dist[w] {
                dist[w] = next;
                prev[w] = Some((id, v));
                heap.push(Reverse((ordered(next), w)));
            }
        }
    }
    (dist, prev)
}

/// Walks `prev` pointers back from `target` to the nearest source,
/// returning the edge ids on the path.
pub fn extract_path(prev: &[Option<(usize, usize)>], mut target: usize) -> Vec<usize> {
    let mut path = Vec::new();
    while let Some((id, from)) = prev[target] {
        path.push(id);
        target = from;
    }
    path.reverse();
    path
}

const SIGN_FLIP: u64 = 1 << 63;

/// Order-preserving bit encoding of a nonnegative float for use as a heap
/// key.
fn ordered(x: f64) -> u64 {
    debug_assert!(x >= 0.0);
    x.to_bits() ^ SIGN_FLIP
}

/// Kruskal over the candidate edges (ids into the graph), cheapest first
/// with ties by id, merging onto `uf`. Returns the edges that joined two
/// components.
pub fn kruskal_extend(
    uf: &mut UnionFind,
    graph: &Graph,
    candidates: &[usize],
    weight: impl Fn(usize) -> f64,
) -> Vec<usize> {
    let mut order = candidates.to_vec();
    order.sort_by(|&a, &b| weight(a).total_cmp(&weight(b)).then(a.cmp(&b)));
    let mut taken = Vec::new();
    for id in order {
        let e = &graph.edges()[id];
        if uf.union(e.u, e.v) {
            taken.push(id);
        }
    }
    taken.sort_unstable();
    taken
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i, 1.0)).collect()).unwrap()
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(Graph::new(0, vec![]).is_err());
        assert!(Graph::new(2, vec![(0, 0, 1.0)]).is_err());
        assert!(Graph::new(2, vec![(0, 2, 1.0)]).is_err());
        assert!(Graph::new(2, vec![(0, 1, -1.0)]).is_err());
        assert!(Graph::new(2, vec![(0, 1, 1.0), (1, 0, 2.0)]).is_err());
    }

    #[test]
    fn min_cut_on_single_edge() {
        let g = Graph::new(2, vec![(0, 1, 1.0)]).unwrap();
        let (value, cut) = max_flow_min_cut(&g, &[1.0], 0, &[1]).unwrap();
        assert_eq!(value, 1.0);
        assert_eq!(cut, vec![0]);
    }

    #[test]
    fn min_cut_sums_parallel_paths() {
        // Two vertex-disjoint paths from 0 to 3 with bottlenecks 2 and 3.
        let g = Graph::new(
            4,
            vec![(0, 1, 1.0), (1, 3, 1.0), (0, 2, 1.0), (2, 3, 1.0)],
        )
        .unwrap();
        let (value, cut) = max_flow_min_cut(&g, &[2.0, 2.0, 3.0, 3.0], 0, &[3]).unwrap();
        assert_eq!(value, 5.0);
        assert_eq!(cut.len(), 2);
    }

    #[test]
    fn min_cut_picks_cheap_middle_edge() {
        let g = path_graph(3);
        let (value, cut) = max_flow_min_cut(&g, &[5.0, 2.0], 0, &[2]).unwrap();
        assert_eq!(value, 2.0);
        assert_eq!(cut, vec![1]);
    }

    #[test]
    fn min_cut_handles_multiple_sinks() {
        // Star with center 0; cutting both spokes isolates both sinks.
        let g = Graph::new(3, vec![(0, 1, 3.0), (0, 2, 4.0)]).unwrap();
        let (value, cut) = max_flow_min_cut(&g, &g.edge_costs(), 0, &[1, 2]).unwrap();
        assert_eq!(value, 7.0);
        assert_eq!(cut, vec![0, 1]);
    }

    #[test]
    fn min_cut_of_disconnected_sink_is_empty() {
        let g = Graph::new(3, vec![(0, 1, 2.0)]).unwrap();
        let (value, cut) = max_flow_min_cut(&g, &g.edge_costs(), 0, &[2]).unwrap();
        assert_eq!(value, 0.0);
        assert!(cut.is_empty());
    }

    #[test]
    fn min_cut_removal_disconnects() {
        // Wheel-ish graph; verify the returned edges really separate.
        let g = Graph::new(
            5,
            vec![
                (0, 1, 1.5),
                (0, 2, 2.0),
                (1, 2, 1.0),
                (1, 3, 2.5),
                (2, 4, 1.0),
                (3, 4, 2.0),
            ],
        )
        .unwrap();
        let w = g.edge_costs();
        let (value, cut) = max_flow_min_cut(&g, &w, 0, &[4]).unwrap();
        assert!(value > 0.0);
        let reach = g.reachable(0, |id| !cut.contains(&id));
        assert!(!reach[4]);
    }

    #[test]
    fn dijkstra_finds_cheapest_route() {
        // Direct edge 0-2 costs 5; detour through 1 costs 3.
        let g = Graph::new(3, vec![(0, 1, 1.0), (1, 2, 2.0), (0, 2, 5.0)]).unwrap();
        let (dist, prev) = dijkstra_multi(&g, &g.edge_costs(), &[0]);
        assert_eq!(dist[2], 3.0);
        assert_eq!(extract_path(&prev, 2), vec![0, 1]);
    }

    #[test]
    fn dijkstra_multi_source_takes_nearest() {
        let g = path_graph(5);
        let (dist, _) = dijkstra_multi(&g, &g.edge_costs(), &[0, 4]);
        assert_eq!(dist[1], 1.0);
        assert_eq!(dist[3], 1.0);
        assert_eq!(dist[2], 2.0);
    }

    #[test]
    fn dijkstra_leaves_unreachable_infinite() {
        let g = Graph::new(3, vec![(0, 1, 1.0)]).unwrap();
        let (dist, prev) = dijkstra_multi(&g, &g.edge_costs(), &[0]);
        assert!(dist[2].is_infinite());
        assert!(prev[2].is_none());
    }

    #[test]
    fn union_find_tracks_components() {
        let mut uf = UnionFind::new(4);
        assert_eq!(uf.components(), 4);
        assert!(uf.union(0, 1));
        assert!(!uf.union(1, 0));
        assert!(uf.union(2, 3));
        assert_eq!(uf.components(), 2);
        assert!(uf.same(0, 1));
        assert!(!uf.same(0, 2));
    }

    #[test]
    fn kruskal_extends_to_spanning_tree() {
        let g = Graph::new(
            4,
            vec![(0, 1, 4.0), (1, 2, 1.0), (2, 3, 2.0), (0, 3, 3.0), (0, 2, 10.0)],
        )
        .unwrap();
        let mut uf = UnionFind::new(4);
        let all: Vec<usize> = (0..g.num_edges()).collect();
        let tree = kruskal_extend(&mut uf, &g, &all, |id| g.edges()[id].cost);
        assert_eq!(uf.components(), 1);
        assert_eq!(tree, vec![1, 2, 3]);
        let total: f64 = tree.iter().map(|&id| g.edges()[id].cost).sum();
        assert_eq!(total, 6.0);
    }

    #[test]
    fn kruskal_respects_preexisting_components() {
        let g = path_graph(4);
        let mut uf = UnionFind::new(4);
        uf.union(0, 1);
        let all: Vec<usize> = (0..g.num_edges()).collect();
        let added = kruskal_extend(&mut uf, &g, &all, |id| g.edges()[id].cost);
        assert_eq!(added, vec![1, 2]);
    }
}
