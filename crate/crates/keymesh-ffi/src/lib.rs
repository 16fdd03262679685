//! C ABI over the keymesh library: opaque handles, status codes, and
//! JSON-string reports for richer results.
//!
//! Conventions:
//! - Every fallible call returns a [`KeymeshStatus`]; results come back
//!   through out-pointers that are written only on `KEYMESH_STATUS_OK`.
//! - Handles from `keymesh_graph_build` / `keymesh_network_new` must be
//!   released with the matching `_free` function.
//! - Strings returned through `char **` are NUL-terminated, UTF-8, and must
//!   be released with `keymesh_string_free`.
//! - Array outputs take a caller buffer plus capacity; the required length
//!   is always stored in `*written`, and `KEYMESH_STATUS_BUFFER_TOO_SMALL`
//!   is returned when the capacity does not suffice.
//!
//! The generated header lands in `include/keymesh.h`.

use std::collections::BTreeSet;
use std::ffi::CString;
use std::os::raw::c_char;

use keymesh::baselines;
use keymesh::keygraph::{
    build_graph, circular_distance, finger_offsets, GraphConfig, KeyGraph, NodeId,
};
use keymesh::metrics::{self, PathAveraging};
use keymesh::router;
use keymesh::securemsg::SimNetwork;
use keymesh::Error;

/// Result of every fallible keymesh call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeymeshStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    InvalidConfig = 2,
    NodeOutOfRange = 3,
    /// The operation needs two distinct nodes.
    SameNode = 4,
    NotAnEdge = 5,
    /// The hop bound is only defined for power-of-two sizes of at least 8.
    BoundUndefined = 6,
    TooManyEdges = 7,
    EmptyPlaintext = 8,
    AuthenticationFailed = 9,
    /// The caller buffer is too small; `*written` holds the needed length.
    BufferTooSmall = 10,
}

impl From<&Error> for KeymeshStatus {
    fn from(err: &Error) -> KeymeshStatus {
        match err {
            Error::InvalidConfig(_) => KeymeshStatus::InvalidConfig,
            Error::NodeOutOfRange { .. } => KeymeshStatus::NodeOutOfRange,
            Error::SameNode(_) => KeymeshStatus::SameNode,
            Error::NotAnEdge { .. } => KeymeshStatus::NotAnEdge,
            Error::BoundUndefined(_) => KeymeshStatus::BoundUndefined,
            Error::TooManyEdges { .. } => KeymeshStatus::TooManyEdges,
            Error::EmptyPlaintext => KeymeshStatus::EmptyPlaintext,
            Error::AuthenticationFailure { .. } => KeymeshStatus::AuthenticationFailed,
        }
    }
}

/// Opaque handle to a built key graph.
pub struct KeymeshGraph {
    inner: KeyGraph,
}

/// Opaque handle to a simulated network with per-key nonce state.
pub struct KeymeshNetwork {
    inner: SimNetwork,
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn keymesh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by any `*_json` function.
///
/// # Safety
/// `s` must be a pointer previously returned by this library's string
/// functions and not yet freed; NULL is accepted and ignored.
#[no_mangle]
pub unsafe extern "C" fn keymesh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn into_c_string(payload: String) -> *mut c_char {
    CString::new(payload)
        .expect("JSON payloads contain no NUL bytes")
        .into_raw()
}

unsafe fn write_slice(
    data: &[u32],
    buffer: *mut u32,
    capacity: usize,
    written: *mut usize,
) -> KeymeshStatus {
    if written.is_null() {
        return KeymeshStatus::NullPointer;
    }
    *written = data.len();
    if capacity < data.len() {
        return KeymeshStatus::BufferTooSmall;
    }
    if data.is_empty() {
        return KeymeshStatus::Ok;
    }
    if buffer.is_null() {
        return KeymeshStatus::NullPointer;
    }
    std::ptr::copy_nonoverlapping(data.as_ptr(), buffer, data.len());
    KeymeshStatus::Ok
}

/// Build the structured key graph for `n` nodes from a numeric seed.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle that must
/// be released with [`keymesh_graph_free`].
#[no_mangle]
pub unsafe extern "C" fn keymesh_graph_build(
    n: u32,
    seed: u64,
    out: *mut *mut KeymeshGraph,
) -> KeymeshStatus {
    if out.is_null() {
        return KeymeshStatus::NullPointer;
    }
    match GraphConfig::from_numeric_seed(n, seed) {
        Ok(config) => {
            let graph = KeymeshGraph {
                inner: build_graph(config),
            };
            *out = Box::into_raw(Box::new(graph));
            KeymeshStatus::Ok
        }
        Err(err) => KeymeshStatus::from(&err),
    }
}

/// Build the graph from 32 bytes of master seed material.
///
/// # Safety
/// `master_seed` must point to 32 readable bytes; `out` as in
/// [`keymesh_graph_build`].
#[no_mangle]
pub unsafe extern "C" fn keymesh_graph_build_with_master_seed(
    n: u32,
    master_seed: *const u8,
    out: *mut *mut KeymeshGraph,
) -> KeymeshStatus {
    if master_seed.is_null() || out.is_null() {
        return KeymeshStatus::NullPointer;
    }
    let mut seed = [0u8; 32];
    std::ptr::copy_nonoverlapping(master_seed, seed.as_mut_ptr(), 32);
    match GraphConfig::new(n, seed) {
        Ok(config) => {
            let graph = KeymeshGraph {
                inner: build_graph(config),
            };
            *out = Box::into_raw(Box::new(graph));
            KeymeshStatus::Ok
        }
        Err(err) => KeymeshStatus::from(&err),
    }
}

/// Release a graph handle; NULL is accepted and ignored.
///
/// # Safety
/// `graph` must come from a build function and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn keymesh_graph_free(graph: *mut KeymeshGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Number of nodes, or 0 for a NULL handle.
///
/// # Safety
/// `graph` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn keymesh_graph_node_count(graph: *const KeymeshGraph) -> u32 {
    graph.as_ref().map_or(0, |g| g.inner.n())
}

/// Number of key-sharing links, or 0 for a NULL handle.
///
/// # Safety
/// `graph` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn keymesh_graph_edge_count(graph: *const KeymeshGraph) -> u64 {
    graph.as_ref().map_or(0, |g| g.inner.edge_count() as u64)
}

/// Degree of `node` (the number of keys it stores).
///
/// # Safety
/// `graph` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn keymesh_graph_degree(
    graph: *const KeymeshGraph,
    node: u32,
    out: *mut u32,
) -> KeymeshStatus {
    let Some(graph) = graph.as_ref() else {
        return KeymeshStatus::NullPointer;
    };
    if out.is_null() {
        return KeymeshStatus::NullPointer;
    }
    match graph.inner.contacts(NodeId::new(node)) {
        Ok(contacts) => {
            *out = contacts.len() as u32;
            KeymeshStatus::Ok
        }
        Err(err) => KeymeshStatus::from(&err),
    }
}

/// Sorted direct contacts of `node`.
///
/// # Safety
/// `graph` must be a live handle; `buffer` must hold `capacity` u32 values;
/// `written` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn keymesh_graph_neighbors(
    graph: *const KeymeshGraph,
    node: u32,
    buffer: *mut u32,
    capacity: usize,
    written: *mut usize,
) -> KeymeshStatus {
    let Some(graph) = graph.as_ref() else {
        return KeymeshStatus::NullPointer;
    };
    match graph.inner.contacts(NodeId::new(node)) {
        Ok(contacts) => write_slice(contacts, buffer, capacity, written),
        Err(err) => KeymeshStatus::from(&err),
    }
}

/// The power-of-two ring offsets used at size `n`.
///
/// # Safety
/// `buffer` must hold `capacity` u32 values; `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn keymesh_finger_offsets(
    n: u32,
    buffer: *mut u32,
    capacity: usize,
    written: *mut usize,
) -> KeymeshStatus {
    match finger_offsets(n) {
        Ok(offsets) => write_slice(&offsets, buffer, capacity, written),
        Err(err) => KeymeshStatus::from(&err),
    }
}

/// Ring distance between two node ids at size `n`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn keymesh_circular_distance(
    a: u32,
    b: u32,
    n: u32,
    out: *mut u32,
) -> KeymeshStatus {
    if out.is_null() {
        return KeymeshStatus::NullPointer;
    }
    match circular_distance(NodeId::new(a), NodeId::new(b), n) {
        Ok(distance) => {
            *out = distance;
            KeymeshStatus::Ok
        }
        Err(err) => KeymeshStatus::from(&err),
    }
}

/// Closed-form worst-case hop count for power-of-two `n >= 8`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn keymesh_diameter_bound(n: u32, out: *mut u32) -> KeymeshStatus {
    if out.is_null() {
        return KeymeshStatus::NullPointer;
    }
    match router::diameter_bound(n) {
        Ok(bound) => {
            *out = bound;
            KeymeshStatus::Ok
        }
        Err(err) => KeymeshStatus::from(&err),
    }
}

/// Greedy next hop from `current` towards `dest`.
///
/// # Safety
/// `graph` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn keymesh_next_hop(
    graph: *const KeymeshGraph,
    current: u32,
    dest: u32,
    out: *mut u32,
) -> KeymeshStatus {
    let Some(graph) = graph.as_ref() else {
        return KeymeshStatus::NullPointer;
    };
    if out.is_null() {
        return KeymeshStatus::NullPointer;
    }
    match router::next_hop(NodeId::new(current), NodeId::new(dest), &graph.inner) {
        Ok(next) => {
            *out = next.index();
            KeymeshStatus::Ok
        }
        Err(err) => KeymeshStatus::from(&err),
    }
}

/// Full greedy route: writes the visited nodes, source first, destination
/// last.
///
/// # Safety
/// `graph` must be a live handle; `buffer` must hold `capacity` u32 values;
/// `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn keymesh_route(
    graph: *const KeymeshGraph,
    src: u32,
    dst: u32,
    buffer: *mut u32,
    capacity: usize,
    written: *mut usize,
) -> KeymeshStatus {
    let Some(graph) = graph.as_ref() else {
        return KeymeshStatus::NullPointer;
    };
    match router::route(NodeId::new(src), NodeId::new(dst), &graph.inner) {
        Ok(trace) => {
            let hops: Vec<u32> = trace.hops().iter().map(|h| h.index()).collect();
            write_slice(&hops, buffer, capacity, written)
        }
        Err(err) => KeymeshStatus::from(&err),
    }
}

/// Greedy route as a JSON object: src, dst, hops, hop_count, bound.
///
/// # Safety
/// `graph` must be a live handle; `out` receives a string to free with
/// [`keymesh_string_free`].
#[no_mangle]
pub unsafe extern "C" fn keymesh_route_json(
    graph: *const KeymeshGraph,
    src: u32,
    dst: u32,
    out: *mut *mut c_char,
) -> KeymeshStatus {
    let Some(graph) = graph.as_ref() else {
        return KeymeshStatus::NullPointer;
    };
    if out.is_null() {
        return KeymeshStatus::NullPointer;
    }
    match router::route(NodeId::new(src), NodeId::new(dst), &graph.inner) {
        Ok(trace) => {
            let payload = serde_json::json!({
                "src": src,
                "dst": dst,
                "hops": trace.hops().iter().map(|h| h.index()).collect::<Vec<_>>(),
                "hop_count": trace.hop_count(),
                "bound": router::diameter_bound(graph.inner.n()).ok(),
            });
            *out = into_c_string(payload.to_string());
            KeymeshStatus::Ok
        }
        Err(err) => KeymeshStatus::from(&err),
    }
}

/// Graph measurements as JSON. `sample_pairs == 0` computes the exact
/// average path; a positive value estimates it from that many sampled pairs.
///
/// # Safety
/// `graph` must be a live handle; `out` receives a string to free with
/// [`keymesh_string_free`].
#[no_mangle]
pub unsafe extern "C" fn keymesh_metrics_json(
    graph: *const KeymeshGraph,
    sample_pairs: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> KeymeshStatus {
    let Some(graph) = graph.as_ref() else {
        return KeymeshStatus::NullPointer;
    };
    if out.is_null() {
        return KeymeshStatus::NullPointer;
    }
    let mode = if sample_pairs == 0 {
        PathAveraging::Exact
    } else {
        PathAveraging::Sampled {
            pairs: sample_pairs,
            seed,
        }
    };
    let report = metrics::measure(graph.inner.topology(), mode);
    *out = into_c_string(serde_json::to_string(&report).expect("report serializes"));
    KeymeshStatus::Ok
}

/// Capture analysis: how many keys a set of captured nodes reveals.
///
/// # Safety
/// `graph` must be a live handle; `nodes` must point to `node_count` ids;
/// `out_revealed` and `out_fraction` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn keymesh_capture(
    graph: *const KeymeshGraph,
    nodes: *const u32,
    node_count: usize,
    out_revealed: *mut u64,
    out_fraction: *mut f64,
) -> KeymeshStatus {
    let Some(graph) = graph.as_ref() else {
        return KeymeshStatus::NullPointer;
    };
    if (nodes.is_null() && node_count > 0) || out_revealed.is_null() || out_fraction.is_null() {
        return KeymeshStatus::NullPointer;
    }
    let captured: BTreeSet<NodeId> = std::slice::from_raw_parts(nodes, node_count)
        .iter()
        .map(|&i| NodeId::new(i))
        .collect();
    match baselines::capture_report(&graph.inner, &captured) {
        Ok(report) => {
            *out_revealed = report.revealed_count as u64;
            *out_fraction = report.fraction_compromised;
            KeymeshStatus::Ok
        }
        Err(err) => KeymeshStatus::from(&err),
    }
}

/// Create a simulated network over a freshly built graph.
///
/// # Safety
/// `out` must be valid; release the handle with [`keymesh_network_free`].
#[no_mangle]
pub unsafe extern "C" fn keymesh_network_new(
    n: u32,
    seed: u64,
    out: *mut *mut KeymeshNetwork,
) -> KeymeshStatus {
    if out.is_null() {
        return KeymeshStatus::NullPointer;
    }
    match GraphConfig::from_numeric_seed(n, seed) {
        Ok(config) => {
            let network = KeymeshNetwork {
                inner: SimNetwork::new(build_graph(config)),
            };
            *out = Box::into_raw(Box::new(network));
            KeymeshStatus::Ok
        }
        Err(err) => KeymeshStatus::from(&err),
    }
}

/// Release a network handle; NULL is accepted and ignored.
///
/// # Safety
/// `network` must come from [`keymesh_network_new`] and not be used after.
#[no_mangle]
pub unsafe extern "C" fn keymesh_network_free(network: *mut KeymeshNetwork) {
    if !network.is_null() {
        drop(Box::from_raw(network));
    }
}

/// Deliver a message hop by hop; the delivery report comes back as JSON
/// (hops, key ids, plaintext round trip, transmission count).
///
/// # Safety
/// `network` must be a live handle; `message` must point to `message_len`
/// readable bytes; `out` receives a string to free with
/// [`keymesh_string_free`].
#[no_mangle]
pub unsafe extern "C" fn keymesh_network_send_json(
    network: *mut KeymeshNetwork,
    src: u32,
    dst: u32,
    message: *const u8,
    message_len: usize,
    out: *mut *mut c_char,
) -> KeymeshStatus {
    let Some(network) = network.as_mut() else {
        return KeymeshStatus::NullPointer;
    };
    if message.is_null() || out.is_null() {
        return KeymeshStatus::NullPointer;
    }
    let plaintext = std::slice::from_raw_parts(message, message_len);
    match network
        .inner
        .send_secure(NodeId::new(src), NodeId::new(dst), plaintext)
    {
        Ok(report) => {
            let payload = serde_json::json!({
                "src": src,
                "dst": dst,
                "hops": report.trace.hops().iter().map(|h| h.index()).collect::<Vec<_>>(),
                "hop_count": report.hop_count,
                "key_ids": report.key_ids.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
                "delivered_plaintext_utf8": String::from_utf8_lossy(&report.delivered_plaintext),
                "transmissions": report.transmissions,
                "success": report.success,
            });
            *out = into_c_string(payload.to_string());
            KeymeshStatus::Ok
        }
        Err(err) => KeymeshStatus::from(&err),
    }
}
