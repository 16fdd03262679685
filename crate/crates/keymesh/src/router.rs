//! Greedy next-hop routing over the structured key graph.
//!
//! Each node sees only its own contacts. A message for a non-contact is
//! forwarded to the contact closest to the destination on the ring; ring
//! distance strictly decreases every hop, so delivery always terminates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::keygraph::{check_node, circular_distance, KeyGraph, NodeId};

/// One forwarding step: the signed ring offset taken and the ring distance
/// still separating the message from its destination afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HopRecord {
    pub from: NodeId,
    pub to: NodeId,
    pub offset: i64,
    pub distance_after: u32,
}

/// A complete greedy route from source to destination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathTrace {
    src: NodeId,
    dst: NodeId,
    hops: Vec<NodeId>,
    records: Vec<HopRecord>,
}

impl PathTrace {
    pub fn src(&self) -> NodeId {
        self.src
    }

    pub fn dst(&self) -> NodeId {
        self.dst
    }

    /// Every node the message visits, source first, destination last.
    pub fn hops(&self) -> &[NodeId] {
        &self.hops
    }

    pub fn records(&self) -> &[HopRecord] {
        &self.records
    }

    pub fn hop_count(&self) -> usize {
        self.hops.len() - 1
    }
}

#[inline(always)]
fn ring_distance(a: u32, b: u32, n: u32) -> u32 {
    let forward = if b >= a { b - a } else { n - (a - b) };
    forward.min(n - forward)
}

/// Allocation-free greedy step on raw indices; both must be valid and
/// distinct. This is the single selection rule behind every routing entry
/// point.
#[inline]
pub(crate) fn next_hop_index(current: u32, dest: u32, graph: &KeyGraph) -> u32 {
    let n = graph.n();
    let mut best = (u32::MAX, u32::MAX, 2u8);
    let mut best_node = current;
    for &candidate in graph.topology().neighbors(current) {
        if candidate == dest {
            return dest;
        }
        let distance = ring_distance(candidate, dest, n);
        let magnitude = ring_distance(current, candidate, n);
        let clockwise = (current as u64 + magnitude as u64) % n as u64 == candidate as u64;
        // (magnitude, direction) identifies a contact uniquely, so the key
        // has no residual ties and the choice is order-independent.
        let key = (distance, magnitude, u8::from(!clockwise));
        if key < best {
            best = key;
            best_node = candidate;
        }
    }
    debug_assert!(
        best.0 < ring_distance(current, dest, n),
        "greedy step must shrink ring distance"
    );
    best_node
}

/// Greedy hop count without materializing the trace.
pub(crate) fn hop_count_between(src: u32, dst: u32, graph: &KeyGraph) -> u32 {
    let mut current = src;
    let mut hops = 0;
    while current != dst {
        current = next_hop_index(current, dst, graph);
        hops += 1;
    }
    hops
}

/// Pick the contact of `current` to forward towards `dest`.
///
/// A direct contact wins outright. Otherwise the contact with minimum ring
/// distance to the destination is chosen; ties fall to the smaller offset
/// magnitude, then to the clockwise direction.
pub fn next_hop(current: NodeId, dest: NodeId, graph: &KeyGraph) -> Result<NodeId> {
    let n = graph.n();
    check_node(current, n)?;
    check_node(dest, n)?;
    if current == dest {
        return Err(Error::SameNode(current.index()));
    }
    Ok(NodeId::new(next_hop_index(
        current.index(),
        dest.index(),
        graph,
    )))
}

/// Route greedily from `src` to `dest`, recording every hop. `src == dest`
/// yields a zero-hop trace.
pub fn route(src: NodeId, dest: NodeId, graph: &KeyGraph) -> Result<PathTrace> {
    let n = graph.n();
    check_node(src, n)?;
    check_node(dest, n)?;
    let mut hops = vec![src];
    let mut records = Vec::new();
    let mut current = src;
    while current != dest {
        let next = NodeId::new(next_hop_index(current.index(), dest.index(), graph));
        let magnitude = circular_distance(current, next, n)?;
        let clockwise =
            (current.index() as u64 + magnitude as u64) % n as u64 == next.index() as u64;
        let offset = if clockwise {
            magnitude as i64
        } else {
            -(magnitude as i64)
        };
        records.push(HopRecord {
            from: current,
            to: next,
            offset,
            distance_after: circular_distance(next, dest, n)?,
        });
        hops.push(next);
        current = next;
    }
    Ok(PathTrace {
        src,
        dst: dest,
        hops,
        records,
    })
}

/// Worst-case hop count for a power-of-two network of at least 8 nodes:
/// `floor(log2(n/8) / 2) + 2`, in exact integer arithmetic.
pub fn diameter_bound(n: u32) -> Result<u32> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::BoundUndefined(n));
    }
    let k = n.trailing_zeros(); // log2(n)
    Ok((k - 3) / 2 + 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keygraph::{build_graph, GraphConfig};

    fn graph(n: u32) -> KeyGraph {
        build_graph(GraphConfig::from_numeric_seed(n, 0).unwrap())
    }

    fn hop_ids(trace: &PathTrace) -> Vec<u32> {
        trace.hops().iter().map(|h| h.index()).collect()
    }

    #[test]
    fn direct_contact_wins() {
        assert_eq!(next_hop(NodeId::new(0), NodeId::new(12), &graph(16)).unwrap(), NodeId::new(12));
    }

    #[test]
    fn closest_contact_is_chosen() {
        // Contacts of 0 are {1,2,4,8,12,14,15}; node 12 is the unique
        // distance-1 contact of destination 11.
        assert_eq!(next_hop(NodeId::new(0), NodeId::new(11), &graph(16)).unwrap(), NodeId::new(12));
    }

    #[test]
    fn ties_fall_to_the_smaller_offset() {
        // Nodes 2 and 4 both sit at distance 1 from destination 3; offset 2
        // beats offset 4.
        assert_eq!(next_hop(NodeId::new(0), NodeId::new(3), &graph(16)).unwrap(), NodeId::new(2));
    }

    #[test]
    fn next_hop_rejects_self_routing() {
        assert_eq!(
            next_hop(NodeId::new(3), NodeId::new(3), &graph(16)),
            Err(Error::SameNode(3))
        );
    }

    #[test]
    fn route_to_self_is_empty() {
        let trace = route(NodeId::new(0), NodeId::new(0), &graph(16)).unwrap();
        assert_eq!(trace.hop_count(), 0);
        assert_eq!(hop_ids(&trace), vec![0]);
    }

    #[test]
    fn route_0_to_11_goes_via_12() {
        let trace = route(NodeId::new(0), NodeId::new(11), &graph(16)).unwrap();
        assert_eq!(hop_ids(&trace), vec![0, 12, 11]);
        assert_eq!(trace.hop_count(), 2);
        assert!(trace.hop_count() as u32 <= diameter_bound(16).unwrap());
        assert_eq!(trace.records()[0].offset, -4);
        assert_eq!(trace.records()[0].distance_after, 1);
        assert_eq!(trace.records()[1].distance_after, 0);
    }

    #[test]
    fn route_0_to_5_in_8_takes_the_counterclockwise_tie() {
        // Contacts 4 (offset +4) and 6 (offset −2) both reach distance 1;
        // the smaller magnitude wins, so the trace passes through 6.
        let trace = route(NodeId::new(0), NodeId::new(5), &graph(8)).unwrap();
        assert_eq!(hop_ids(&trace), vec![0, 6, 5]);
        assert_eq!(trace.records()[0].offset, -2);
    }

    #[test]
    fn distance_strictly_decreases_along_traces() {
        let g = graph(64);
        for dst in 1..64 {
            let trace = route(NodeId::new(0), NodeId::new(dst), &g).unwrap();
            let mut last = circular_distance(NodeId::new(0), NodeId::new(dst), 64).unwrap();
            for record in trace.records() {
                assert!(record.distance_after < last);
                last = record.distance_after;
            }
            assert_eq!(last, 0);
        }
    }

    #[test]
    fn bound_values_from_the_closed_form() {
        assert_eq!(diameter_bound(8).unwrap(), 2);
        assert_eq!(diameter_bound(16).unwrap(), 2);
        assert_eq!(diameter_bound(1024).unwrap(), 5);
        assert_eq!(diameter_bound(2048).unwrap(), 6);
    }

    #[test]
    fn bound_is_undefined_below_8_and_off_powers() {
        assert_eq!(diameter_bound(4), Err(Error::BoundUndefined(4)));
        assert_eq!(diameter_bound(100), Err(Error::BoundUndefined(100)));
    }
}
