//! keymesh — a deterministic key-predistribution topology and its analysis
//! toolkit.
//!
//! Every node on a ring of `n` nodes shares a unique pairwise key with the
//! nodes at power-of-two offsets in both directions. The resulting graph is
//! known before deployment, so there is no key-discovery or path-discovery
//! traffic: greedy forwarding over local contacts reaches any destination in
//! logarithmically few hops.
//!
//! The crate provides:
//! - [`keygraph`]: the topology and per-edge key derivation,
//! - [`router`]: greedy next-hop selection and the closed-form hop bound,
//! - [`metrics`]: exact BFS oracles (diameter, average path, clustering),
//! - [`securemsg`]: hop-by-hop encrypted delivery over a simulated network,
//! - [`baselines`]: ring / random-key-pool / fixed-edge-count comparisons
//!   and node-capture analysis,
//! - [`cli`]: the `keymesh` command-line front end.

pub mod baselines;
pub mod cli;
pub mod error;
pub mod graph;
pub mod keygraph;
pub mod metrics;
pub mod router;
pub mod securemsg;
pub mod seeding;

pub use error::{Error, Result};
pub use keygraph::{
    build_graph, circular_distance, derive_pair_key, finger_offsets, neighbors,
    structured_edge_count, GraphConfig, KeyGraph, KeyId, NodeId, PairKey,
};
pub use router::{diameter_bound, next_hop, route, PathTrace};
