//! Undirected adjacency-list graph shared by the structured topology and the
//! baseline models.

use std::collections::BTreeMap;
use std::collections::VecDeque;

/// A simple undirected graph over nodes `0..n` with sorted adjacency lists.
///
/// Immutable once built; generators construct it from an edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
}

impl Graph {
    /// Build a graph from an iterator of unordered edges. Edges must be
    /// distinct, non-loop pairs with both endpoints below `n`.
    pub fn from_edges(n: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Graph {
        let mut adjacency = vec![Vec::new(); n as usize];
        let mut edge_count = 0usize;
        for (a, b) in edges {
            debug_assert!(a != b, "self-loop ({a},{a})");
            debug_assert!(a < n && b < n, "edge ({a},{b}) out of range for n={n}");
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
            edge_count += 1;
        }
        for list in &mut adjacency {
            list.sort_unstable();
            debug_assert!(list.windows(2).all(|w| w[0] != w[1]), "duplicate edge");
        }
        Graph {
            adjacency,
            edge_count,
        }
    }

    pub fn node_count(&self) -> u32 {
        self.adjacency.len() as u32
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Maximum number of edges a simple graph on `n` nodes can hold.
    pub fn max_edges(n: u32) -> usize {
        let n = n as usize;
        n * n.saturating_sub(1) / 2
    }

    /// Sorted neighbor list of `u`. Panics if `u` is out of range.
    pub fn neighbors(&self, u: u32) -> &[u32] {
        &self.adjacency[u as usize]
    }

    pub fn degree(&self, u: u32) -> usize {
        self.adjacency[u as usize].len()
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.adjacency[a as usize].binary_search(&b).is_ok()
    }

    /// All edges as sorted `(min, max)` pairs, lexicographically ordered.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (a, list) in self.adjacency.iter().enumerate() {
            let a = a as u32;
            for &b in list {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Histogram of node degrees: degree -> number of nodes.
    pub fn degree_histogram(&self) -> BTreeMap<usize, u32> {
        let mut hist = BTreeMap::new();
        for list in &self.adjacency {
            *hist.entry(list.len()).or_insert(0) += 1;
        }
        hist
    }

    /// BFS reachability from node 0. The empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        let n = self.adjacency.len();
        if n <= 1 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        seen[0] = true;
        queue.push_back(0u32);
        let mut visited = 1usize;
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    visited += 1;
                    queue.push_back(v);
                }
            }
        }
        visited == n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_sorted_adjacency() {
        let g = Graph::from_edges(4, [(2, 1), (0, 3), (0, 1)]);
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.neighbors(0), &[1, 3]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert!(g.has_edge(1, 2));
        assert!(!g.has_edge(2, 3));
    }

    #[test]
    fn connectivity() {
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]);
        assert!(path.is_connected());
        let split = Graph::from_edges(4, [(0, 1), (2, 3)]);
        assert!(!split.is_connected());
        assert!(Graph::from_edges(1, []).is_connected());
    }

    #[test]
    fn edges_are_lexicographic() {
        let g = Graph::from_edges(4, [(3, 2), (1, 0), (0, 2)]);
        assert_eq!(g.edges(), vec![(0, 1), (0, 2), (2, 3)]);
    }
}
