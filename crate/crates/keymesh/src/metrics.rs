//! Oracle-grade graph measurements: exact BFS shortest paths, diameter,
//! average path length, clustering coefficient, and the exhaustive
//! greedy-versus-BFS comparison.
//!
//! Per-source computations run in parallel over the immutable graph; every
//! aggregation is order-independent (integer sums, maxima, or index-ordered
//! reductions), so results do not depend on thread scheduling.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use num::{BigRational, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::graph::Graph;
use crate::keygraph::{KeyGraph, NodeId};
use crate::router;
use crate::seeding;

/// How to average shortest paths: exact over all ordered pairs, or an
/// unbiased seeded sample of distinct pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathAveraging {
    Exact,
    Sampled { pairs: u64, seed: u64 },
}

/// Exact hop counts from `source` to every node; `None` marks unreachable
/// nodes (possible in the random baseline graphs, never in structured ones).
pub fn shortest_path_lengths(graph: &Graph, source: u32) -> Vec<Option<u32>> {
    assert!(source < graph.node_count(), "source out of range");
    let n = graph.node_count() as usize;
    let mut dist: Vec<Option<u32>> = vec![None; n];
    dist[source as usize] = Some(0);
    let mut queue = VecDeque::new();
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize].expect("queued nodes have distances");
        for &v in graph.neighbors(u) {
            if dist[v as usize].is_none() {
                dist[v as usize] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

fn eccentricity(graph: &Graph, source: u32) -> Option<u32> {
    let mut max = 0;
    for d in shortest_path_lengths(graph, source) {
        max = max.max(d?);
    }
    Some(max)
}

/// Longest shortest path in the graph; `None` when the graph is disconnected.
pub fn diameter(graph: &Graph) -> Option<u32> {
    let n = graph.node_count();
    if n <= 1 {
        return Some(0);
    }
    (0..n)
        .into_par_iter()
        .map(|s| eccentricity(graph, s))
        .reduce(
            || Some(0),
            |a, b| match (a, b) {
                (Some(x), Some(y)) => Some(x.max(y)),
                _ => None,
            },
        )
}

/// Mean shortest-path length over ordered pairs of distinct nodes; `None`
/// when the graph is disconnected or has fewer than two nodes.
pub fn average_shortest_path(graph: &Graph, mode: PathAveraging) -> Option<f64> {
    match mode {
        PathAveraging::Exact => exact_average(graph),
        PathAveraging::Sampled { pairs, seed } => sampled_average(graph, pairs, seed),
    }
}

fn exact_average(graph: &Graph) -> Option<f64> {
    let n = graph.node_count();
    if n < 2 {
        return None;
    }
    let total: Option<u64> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut sum = 0u64;
            for d in shortest_path_lengths(graph, s) {
                sum += d? as u64;
            }
            Some(sum)
        })
        .reduce(
            || Some(0),
            |a, b| match (a, b) {
                (Some(x), Some(y)) => Some(x + y),
                _ => None,
            },
        );
    let pairs = n as u64 * (n as u64 - 1);
    total.map(|t| t as f64 / pairs as f64)
}

fn sampled_average(graph: &Graph, pairs: u64, seed: u64) -> Option<f64> {
    let n = graph.node_count();
    if n < 2 || pairs == 0 {
        return None;
    }
    let mut rng = seeding::stream_rng(seed, "avg-path-sample", &[]);
    let mut by_source: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for _ in 0..pairs {
        loop {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                by_source.entry(a).or_default().push(b);
                break;
            }
        }
    }
    let total: Option<u64> = by_source
        .par_iter()
        .map(|(&source, targets)| {
            let dist = shortest_path_lengths(graph, source);
            let mut sum = 0u64;
            for &t in targets {
                sum += dist[t as usize]? as u64;
            }
            Some(sum)
        })
        .reduce(
            || Some(0),
            |a, b| match (a, b) {
                (Some(x), Some(y)) => Some(x + y),
                _ => None,
            },
        );
    total.map(|t| t as f64 / pairs as f64)
}

/// Mean over all nodes of the fraction of a node's neighbor pairs that are
/// themselves adjacent. Nodes of degree below 2 contribute 0.
///
/// The mean is accumulated as an exact rational and rounded to f64 once, so
/// derived oracle values like 3/7 compare exactly.
pub fn clustering_coefficient(graph: &Graph) -> f64 {
    let n = graph.node_count();
    if n == 0 {
        return 0.0;
    }
    let locals: Vec<(u64, u64)> = (0..n)
        .into_par_iter()
        .map(|u| local_clustering(graph, u))
        .collect();
    let sum = locals
        .into_iter()
        .fold(BigRational::zero(), |acc, (links, possible)| {
            if possible == 0 {
                acc
            } else {
                acc + BigRational::new(links.into(), possible.into())
            }
        });
    (sum / BigRational::from_integer(n.into()))
        .to_f64()
        .expect("clustering mean is finite")
}

/// Adjacent neighbor pairs of `u` and the total neighbor pairs; degree
/// below 2 yields `(0, 0)`.
fn local_clustering(graph: &Graph, u: u32) -> (u64, u64) {
    let nbrs = graph.neighbors(u);
    let degree = nbrs.len() as u64;
    if degree < 2 {
        return (0, 0);
    }
    let mut links = 0u64;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if graph.has_edge(a, b) {
                links += 1;
            }
        }
    }
    (links, degree * (degree - 1) / 2)
}

/// Summary measurements of one graph.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub n: u32,
    /// `None` means the graph is disconnected (infinite diameter).
    pub diameter: Option<u32>,
    pub avg_shortest_path: Option<f64>,
    pub clustering_coefficient: f64,
    pub degree_min: usize,
    pub degree_max: usize,
    pub degree_mean: f64,
    pub pairs_measured: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling_seed: Option<u64>,
}

pub fn measure(graph: &Graph, mode: PathAveraging) -> MetricsReport {
    let n = graph.node_count();
    let (degree_min, degree_max) = (0..n).fold((usize::MAX, 0), |(lo, hi), u| {
        let d = graph.degree(u);
        (lo.min(d), hi.max(d))
    });
    let (pairs_measured, sampling_seed) = match mode {
        PathAveraging::Exact => (n as u64 * (n as u64).saturating_sub(1), None),
        PathAveraging::Sampled { pairs, seed } => (pairs, Some(seed)),
    };
    MetricsReport {
        n,
        diameter: diameter(graph),
        avg_shortest_path: average_shortest_path(graph, mode),
        clustering_coefficient: clustering_coefficient(graph),
        degree_min: if n == 0 { 0 } else { degree_min },
        degree_max,
        degree_mean: if n == 0 {
            0.0
        } else {
            2.0 * graph.edge_count() as f64 / n as f64
        },
        pairs_measured,
        sampling_seed,
    }
}

/// An ordered pair where the greedy route was longer than the true shortest
/// path. The structured topology is expected to produce none.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GreedyMismatch {
    pub src: NodeId,
    pub dst: NodeId,
    pub greedy_hops: u32,
    pub bfs_hops: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct GreedyOptimalityReport {
    pub n: u32,
    pub pairs_checked: u64,
    pub mismatches: Vec<GreedyMismatch>,
}

/// Compare the greedy hop count against the BFS shortest path for every
/// ordered pair. Any pair where greedy is longer is recorded verbatim; an
/// empty mismatch list confirms greedy optimality on this instance.
pub fn verify_greedy_optimality(graph: &KeyGraph) -> GreedyOptimalityReport {
    let n = graph.n();
    let per_source: Vec<Vec<GreedyMismatch>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let dist = shortest_path_lengths(graph.topology(), s);
            let mut found = Vec::new();
            for d in 0..n {
                if d == s {
                    continue;
                }
                let greedy = router::hop_count_between(s, d, graph);
                let bfs = dist[d as usize].expect("structured graphs are connected");
                if greedy != bfs {
                    found.push(GreedyMismatch {
                        src: NodeId::new(s),
                        dst: NodeId::new(d),
                        greedy_hops: greedy,
                        bfs_hops: bfs,
                    });
                }
            }
            found
        })
        .collect();
    GreedyOptimalityReport {
        n,
        pairs_checked: n as u64 * (n as u64 - 1),
        mismatches: per_source.into_iter().flatten().collect(),
    }
}

/// Maximum greedy hop count over all ordered pairs.
pub fn max_route_hops(graph: &KeyGraph) -> u32 {
    let n = graph.n();
    (0..n)
        .into_par_iter()
        .map(|s| {
            let mut worst = 0u32;
            for d in 0..n {
                if d != s {
                    worst = worst.max(router::hop_count_between(s, d, graph));
                }
            }
            worst
        })
        .reduce(|| 0, u32::max)
}
