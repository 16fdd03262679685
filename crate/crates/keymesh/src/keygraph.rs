//! The structured key graph: every node shares a pairwise key with the nodes
//! at power-of-two ring offsets, so the whole topology and every key ring is
//! known before deployment. No key-discovery traffic is ever needed.
//!
//! Node ids are 0-based internally; display layers may re-offset.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use hmac::{Hmac, Mac};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::Sha256;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seeding;

/// Index of a node on the ring, in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(u32);

impl NodeId {
    pub const fn new(index: u32) -> NodeId {
        NodeId(index)
    }

    pub const fn index(self) -> u32 {
        self.0
    }
}

impl From<u32> for NodeId {
    fn from(index: u32) -> NodeId {
        NodeId(index)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn check_node(node: NodeId, n: u32) -> Result<()> {
    if node.index() < n {
        Ok(())
    } else {
        Err(Error::NodeOutOfRange {
            node: node.index(),
            n,
        })
    }
}

/// Stable identifier of the key on one edge: the unordered node pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KeyId {
    lo: NodeId,
    hi: NodeId,
}

impl KeyId {
    /// Canonical id for the edge `{a, b}`; order of arguments is irrelevant.
    pub fn new(a: NodeId, b: NodeId) -> KeyId {
        debug_assert_ne!(a, b, "an edge needs two distinct nodes");
        if a <= b {
            KeyId { lo: a, hi: b }
        } else {
            KeyId { lo: b, hi: a }
        }
    }

    pub fn lo(self) -> NodeId {
        self.lo
    }

    pub fn hi(self) -> NodeId {
        self.hi
    }
}

impl fmt::Display for KeyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

impl FromStr for KeyId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<KeyId, String> {
        let (lo, hi) = s
            .split_once('-')
            .ok_or_else(|| format!("malformed key id {s:?}, expected \"lo-hi\""))?;
        let lo: u32 = lo.parse().map_err(|e| format!("bad key id {s:?}: {e}"))?;
        let hi: u32 = hi.parse().map_err(|e| format!("bad key id {s:?}: {e}"))?;
        if lo >= hi {
            return Err(format!("bad key id {s:?}: nodes must be distinct and sorted"));
        }
        Ok(KeyId {
            lo: NodeId(lo),
            hi: NodeId(hi),
        })
    }
}

impl Serialize for KeyId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for KeyId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<KeyId, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One pairwise symmetric key: id plus 256-bit material.
///
/// Deliberately not serializable; exports carry key ids only, never material.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairKey {
    id: KeyId,
    material: [u8; 32],
}

impl PairKey {
    pub fn id(&self) -> KeyId {
        self.id
    }

    pub fn material(&self) -> &[u8; 32] {
        &self.material
    }
}

/// Parameters of one structured key graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphConfig {
    n: u32,
    master_seed: [u8; 32],
}

impl GraphConfig {
    /// `n` must be at least 4 so that offsets 1 and 2 are distinct.
    pub fn new(n: u32, master_seed: [u8; 32]) -> Result<GraphConfig> {
        if n < 4 {
            return Err(Error::InvalidConfig(format!(
                "node count must be at least 4, got {n}"
            )));
        }
        Ok(GraphConfig { n, master_seed })
    }

    /// Convenience constructor expanding a numeric seed to seed material.
    pub fn from_numeric_seed(n: u32, seed: u64) -> Result<GraphConfig> {
        GraphConfig::new(n, seeding::expand_seed(seed))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn master_seed(&self) -> &[u8; 32] {
        &self.master_seed
    }
}

/// The ring offsets at which every node shares a key: all powers of two up to
/// `n/2`. For `n = 2^k` this is `{1, 2, 4, ..., n/2}`, of size `k`.
pub fn finger_offsets(n: u32) -> Result<Vec<u32>> {
    if n < 4 {
        return Err(Error::InvalidConfig(format!(
            "node count must be at least 4, got {n}"
        )));
    }
    let mut offsets = Vec::new();
    let mut d = 1u32;
    while d <= n / 2 {
        offsets.push(d);
        match d.checked_mul(2) {
            Some(next) => d = next,
            None => break,
        }
    }
    Ok(offsets)
}

/// The direct contacts of node `i`: both ring directions at every finger
/// offset. For power-of-two `n` the antipodal offset `n/2` is its own mirror,
/// giving exactly `2·log2(n) − 1` contacts.
pub fn neighbors(i: NodeId, n: u32) -> Result<BTreeSet<NodeId>> {
    check_node(i, n)?;
    let offsets = finger_offsets(n)?;
    let mut out = BTreeSet::new();
    let i = i.index() as u64;
    let n64 = n as u64;
    for d in offsets {
        let d = d as u64;
        out.insert(NodeId(((i + d) % n64) as u32));
        out.insert(NodeId(((i + n64 - d) % n64) as u32));
    }
    Ok(out)
}

/// Number of edges the structured graph on `n` nodes will have: every
/// offset contributes `n` edges except the antipodal one, which pairs each
/// node only once. For `n = 2^k` this is `n·k − n/2`.
pub fn structured_edge_count(n: u32) -> Result<usize> {
    Ok(finger_offsets(n)?
        .iter()
        .map(|&d| {
            if (d as u64) * 2 == n as u64 {
                (n / 2) as usize
            } else {
                n as usize
            }
        })
        .sum())
}

/// Ring distance between two nodes: the shorter way around the circle.
pub fn circular_distance(a: NodeId, b: NodeId, n: u32) -> Result<u32> {
    check_node(a, n)?;
    check_node(b, n)?;
    let forward = ((b.index() as u64 + n as u64 - a.index() as u64) % n as u64) as u32;
    Ok(forward.min(n - forward))
}

/// Derive the unique symmetric key for the edge `{a, b}`.
///
/// Order-independent and fully determined by `(master_seed, n, min, max)`.
/// Fails when the pair is not an edge of the structured graph: keys exist
/// only for shared links.
pub fn derive_pair_key(master_seed: &[u8; 32], a: NodeId, b: NodeId, n: u32) -> Result<PairKey> {
    check_node(a, n)?;
    check_node(b, n)?;
    if a == b {
        return Err(Error::SameNode(a.index()));
    }
    let distance = circular_distance(a, b, n)?;
    if finger_offsets(n)?.binary_search(&distance).is_err() {
        return Err(Error::NotAnEdge {
            a: a.index(),
            b: b.index(),
        });
    }
    let id = KeyId::new(a, b);
    let mut mac = Hmac::<Sha256>::new_from_slice(master_seed).expect("any key length works");
    mac.update(b"keymesh/pair-key/v1");
    mac.update(&n.to_be_bytes());
    mac.update(&id.lo.index().to_be_bytes());
    mac.update(&id.hi.index().to_be_bytes());
    let material: [u8; 32] = mac.finalize().into_bytes().into();
    Ok(PairKey { id, material })
}

/// JSON-facing view of a built graph. Key material is never included; key
/// ids appear only on request.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphExport {
    pub n: u32,
    pub offsets: Vec<u32>,
    pub degree_histogram: BTreeMap<usize, u32>,
    pub edges: Vec<(u32, u32)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key_ids: Option<Vec<KeyId>>,
}

/// The built structured key graph: topology plus one unique key per edge,
/// indexed by each endpoint's ring.
///
/// Immutable after construction; all read operations are pure, so the value
/// can be shared freely across threads.
#[derive(Debug, Clone)]
pub struct KeyGraph {
    config: GraphConfig,
    offsets: Vec<u32>,
    topology: Graph,
    rings: Vec<BTreeMap<NodeId, PairKey>>,
}

/// Construct the full key graph for `config`: one edge per (node, offset)
/// pair, one derived key per edge, mirrored into both endpoint rings.
pub fn build_graph(config: GraphConfig) -> KeyGraph {
    let n = config.n();
    let offsets = finger_offsets(n).expect("config is validated");
    let mut edges = Vec::new();
    for &d in &offsets {
        // Offsets below n/2 pair every node with a distinct partner; the
        // antipodal offset pairs each node with its mirror only once.
        let span = if (d as u64) * 2 == n as u64 { n / 2 } else { n };
        for i in 0..span {
            edges.push((i, ((i as u64 + d as u64) % n as u64) as u32));
        }
    }
    let topology = Graph::from_edges(n, edges.iter().copied());
    let mut rings: Vec<BTreeMap<NodeId, PairKey>> = vec![BTreeMap::new(); n as usize];
    for &(a, b) in &edges {
        let key = derive_pair_key(config.master_seed(), NodeId(a), NodeId(b), n)
            .expect("enumerated pairs are edges");
        rings[a as usize].insert(NodeId(b), key.clone());
        rings[b as usize].insert(NodeId(a), key);
    }
    KeyGraph {
        config,
        offsets,
        topology,
        rings,
    }
}

impl KeyGraph {
    pub fn config(&self) -> &GraphConfig {
        &self.config
    }

    pub fn n(&self) -> u32 {
        self.config.n()
    }

    pub fn offsets(&self) -> &[u32] {
        &self.offsets
    }

    pub fn topology(&self) -> &Graph {
        &self.topology
    }

    pub fn edge_count(&self) -> usize {
        self.topology.edge_count()
    }

    /// Sorted ids of the direct contacts of `i`.
    pub fn contacts(&self, i: NodeId) -> Result<&[u32]> {
        check_node(i, self.n())?;
        Ok(self.topology.neighbors(i.index()))
    }

    /// The key ring stored on node `i`: peer -> pairwise key.
    pub fn ring(&self, i: NodeId) -> Result<&BTreeMap<NodeId, PairKey>> {
        check_node(i, self.n())?;
        Ok(&self.rings[i.index() as usize])
    }

    /// The key shared by `a` and `b`, if that edge exists.
    pub fn key_between(&self, a: NodeId, b: NodeId) -> Result<&PairKey> {
        check_node(a, self.n())?;
        check_node(b, self.n())?;
        self.rings[a.index() as usize]
            .get(&b)
            .ok_or(Error::NotAnEdge {
                a: a.index(),
                b: b.index(),
            })
    }

    pub fn export(&self, include_key_ids: bool) -> GraphExport {
        let key_ids = include_key_ids.then(|| {
            self.topology
                .edges()
                .iter()
                .map(|&(a, b)| KeyId::new(NodeId(a), NodeId(b)))
                .collect()
        });
        GraphExport {
            n: self.n(),
            offsets: self.offsets.clone(),
            degree_histogram: self.topology.degree_histogram(),
            edges: self.topology.edges(),
            key_ids,
        }
    }
}
