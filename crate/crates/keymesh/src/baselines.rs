//! Comparison models — the 2-key ring, the random-key-pool graph, and the
//! fixed-edge-count random graph — plus node-capture analysis.
//!
//! Every generator is a pure function of `(seed, trial_index)`: per-trial and
//! per-node RNG streams are derived independently, so Monte Carlo runs can be
//! parallelized and always reproduce bit-identically.

use std::collections::BTreeSet;

use num::{BigRational, BigUint, One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::keygraph::{check_node, KeyGraph, KeyId, NodeId};
use crate::seeding;

/// The minimal connected key topology: node `i` shares keys with `i±1` only.
pub fn ring_graph(n: u32) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidConfig(format!(
            "a ring needs at least 3 nodes, got {n}"
        )));
    }
    Ok(Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))))
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut result = BigUint::one();
    // C(n, i+1) = C(n, i) · (n − i) / (i + 1), exact at every step.
    for i in 0..k {
        result = result * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    result
}

/// Probability that two independently drawn `ring`-subsets of a `pool`-key
/// pool intersect: `1 − C(pool−ring, ring) / C(pool, ring)`, evaluated with
/// exact big-integer binomials. When `2·ring > pool` the subsets cannot be
/// disjoint, so the probability is 1.
pub fn eg_share_probability(pool: u64, ring: u64) -> f64 {
    if ring == 0 {
        return 0.0;
    }
    if 2 * ring > pool {
        return 1.0;
    }
    let disjoint = BigRational::new(
        binomial(pool - ring, ring).into(),
        binomial(pool, ring).into(),
    );
    1.0 - disjoint.to_f64().expect("ratio is in [0, 1]")
}

/// Parameters of the random-key-pool model: each node draws `ring_size` keys
/// from a pool of `pool_size`; nodes sharing at least one key get an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EgConfig {
    pub n: u32,
    pub pool_size: u32,
    pub ring_size: u32,
    pub trials: u64,
    pub seed: u64,
}

impl EgConfig {
    pub fn new(n: u32, pool_size: u32, ring_size: u32, trials: u64, seed: u64) -> Result<EgConfig> {
        if n == 0 {
            return Err(Error::InvalidConfig("node count must be positive".into()));
        }
        if pool_size == 0 {
            return Err(Error::InvalidConfig("key pool must be non-empty".into()));
        }
        if ring_size > pool_size {
            return Err(Error::InvalidConfig(format!(
                "ring size {ring_size} exceeds pool size {pool_size}"
            )));
        }
        Ok(EgConfig {
            n,
            pool_size,
            ring_size,
            trials,
            seed,
        })
    }
}

/// Draw `ring_size` distinct keys as the prefix of a seeded partial shuffle.
///
/// Because the swap sequence depends only on `(seed, trial, node)` and not on
/// the ring size, a ring drawn with a smaller `ring_size` is always a subset
/// of the ring drawn with a larger one — connectivity is therefore monotone
/// in the ring size under identical seeds.
fn draw_ring(cfg: &EgConfig, trial_index: u64, node: u32) -> Vec<u32> {
    let mut rng = seeding::stream_rng(cfg.seed, "eg-ring", &[trial_index, node as u64]);
    let pool = cfg.pool_size as usize;
    let k = cfg.ring_size as usize;
    let mut items: Vec<u32> = (0..cfg.pool_size).collect();
    for i in 0..k {
        let j = rng.gen_range(i..pool);
        items.swap(i, j);
    }
    let mut ring = items[..k].to_vec();
    ring.sort_unstable();
    ring
}

fn sorted_intersect(a: &[u32], b: &[u32]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// One realization of the random-key-pool graph. May be disconnected.
pub fn eg_random_key_graph(cfg: &EgConfig, trial_index: u64) -> Graph {
    let rings: Vec<Vec<u32>> = (0..cfg.n)
        .map(|node| draw_ring(cfg, trial_index, node))
        .collect();
    let mut edges = Vec::new();
    for a in 0..cfg.n {
        for b in (a + 1)..cfg.n {
            if sorted_intersect(&rings[a as usize], &rings[b as usize]) {
                edges.push((a, b));
            }
        }
    }
    Graph::from_edges(cfg.n, edges)
}

/// Uniform random simple graph with exactly `edge_count` edges.
pub fn er_random_graph(n: u32, edge_count: usize, seed: u64) -> Result<Graph> {
    let max = Graph::max_edges(n);
    if edge_count > max {
        return Err(Error::TooManyEdges {
            n,
            requested: edge_count,
            max,
        });
    }
    let mut rng = seeding::stream_rng(seed, "er-gnm", &[]);
    let mut sample_pairs = |count: usize| -> BTreeSet<(u32, u32)> {
        let mut set = BTreeSet::new();
        while set.len() < count {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                set.insert((a.min(b), a.max(b)));
            }
        }
        set
    };
    let edges: Vec<(u32, u32)> = if edge_count * 2 <= max {
        sample_pairs(edge_count).into_iter().collect()
    } else {
        // Dense case: sample the complement instead.
        let excluded = sample_pairs(max - edge_count);
        let mut edges = Vec::with_capacity(edge_count);
        for a in 0..n {
            for b in (a + 1)..n {
                if !excluded.contains(&(a, b)) {
                    edges.push((a, b));
                }
            }
        }
        edges
    };
    Ok(Graph::from_edges(n, edges))
}

/// Fraction of `trials` generated graphs that are connected. Trials are
/// independent and evaluated in parallel; the result depends only on the
/// generator's seeding.
pub fn connectivity_probability<F>(generate: F, trials: u64) -> f64
where
    F: Fn(u64) -> Graph + Sync,
{
    assert!(trials >= 1, "at least one trial is required");
    let connected: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| u64::from(generate(trial).is_connected()))
        .sum();
    connected as f64 / trials as f64
}

/// Which keys an adversary learns by capturing `captured`: the union of the
/// captured nodes' rings, as a fraction of all links in the network.
#[derive(Debug, Clone, Serialize)]
pub struct CaptureReport {
    pub captured: Vec<NodeId>,
    pub revealed_key_ids: Vec<KeyId>,
    pub revealed_count: usize,
    pub total_links: usize,
    pub fraction_compromised: f64,
}

pub fn capture_report(graph: &KeyGraph, captured: &BTreeSet<NodeId>) -> Result<CaptureReport> {
    let n = graph.n();
    let mut revealed: BTreeSet<KeyId> = BTreeSet::new();
    for &node in captured {
        check_node(node, n)?;
        revealed.extend(graph.ring(node)?.values().map(|key| key.id()));
    }
    let total_links = graph.edge_count();
    let revealed_count = revealed.len();
    Ok(CaptureReport {
        captured: captured.iter().copied().collect(),
        revealed_key_ids: revealed.into_iter().collect(),
        revealed_count,
        total_links,
        fraction_compromised: revealed_count as f64 / total_links as f64,
    })
}

/// A parameterized comparison model, one graph per trial index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaselineModel {
    Ring { n: u32 },
    Eg(EgConfig),
    Er { n: u32, edge_count: usize, seed: u64 },
}

impl BaselineModel {
    pub fn name(&self) -> &'static str {
        match self {
            BaselineModel::Ring { .. } => "ring",
            BaselineModel::Eg(_) => "eg",
            BaselineModel::Er { .. } => "er",
        }
    }

    pub fn n(&self) -> u32 {
        match self {
            BaselineModel::Ring { n } => *n,
            BaselineModel::Eg(cfg) => cfg.n,
            BaselineModel::Er { n, .. } => *n,
        }
    }

    /// Generate the graph for one trial. The ring is deterministic; the
    /// random models derive an independent stream per trial.
    pub fn generate(&self, trial_index: u64) -> Result<Graph> {
        match self {
            BaselineModel::Ring { n } => ring_graph(*n),
            BaselineModel::Eg(cfg) => Ok(eg_random_key_graph(cfg, trial_index)),
            BaselineModel::Er { n, edge_count, seed } => er_random_graph(
                *n,
                *edge_count,
                seeding::sub_seed(*seed, "er-trial", &[trial_index]),
            ),
        }
    }
}
