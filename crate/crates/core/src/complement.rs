// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Dense graphs stored by their missing edges.
//!
//! The auxiliary graph of the heuristic links most pairs of a bicomponent, so
//! it is kept as the (sparse) set of pairs that are *not* adjacent. Every
//! [`GraphView`] algorithm runs on it unchanged.

use crate::graph::{local_positions, Graph, GraphView, NodeIndex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplementView {
    absent: Vec<Vec<NodeIndex>>,
    absent_pairs: usize,
}

impl ComplementView {
    /// Complete graph on `n` nodes.
    pub fn complete(n: usize) -> Self {
        ComplementView { absent: vec![Vec::new(); n], absent_pairs: 0 }
    }

    /// Builds the view from per-node lists of non-adjacent nodes. The lists
    /// need not be sorted or symmetric; both directions are filled in.
    pub fn from_absent_rows(rows: Vec<Vec<NodeIndex>>) -> Self {
        let n = rows.len();
        let mut absent = vec![Vec::new(); n];
        for (u, row) in rows.into_iter().enumerate() {
            for v in row {
                assert!(v < n, "absent pair ({u}, {v}) out of range");
                if u != v {
                    absent[u].push(v);
                    absent[v].push(u);
                }
            }
        }
        let mut twice = 0;
        for row in &mut absent {
            row.sort_unstable();
            row.dedup();
            twice += row.len();
        }
        ComplementView { absent, absent_pairs: twice / 2 }
    }

    /// Number of stored (missing) pairs; memory is proportional to this.
    pub fn absent_pair_count(&self) -> usize {
        self.absent_pairs
    }

    pub fn absent(&self, u: NodeIndex) -> &[NodeIndex] {
        &self.absent[u]
    }

    /// Explicit adjacency-list copy of the represented graph.
    pub fn materialize(&self) -> Graph {
        let n = self.node_count();
        Graph::from_edges(n, (0..n).flat_map(|u| self.neighbors(u).filter(move |&v| u < v).map(move |v| (u, v))))
    }
}

/// View behaving as the complement of `g`: the edges of `g` are the stored
/// absent pairs.
pub fn complement_view(g: &Graph) -> ComplementView {
    ComplementView {
        absent: (0..g.node_count()).map(|u| g.neighbor_slice(u).to_vec()).collect(),
        absent_pairs: g.edge_count(),
    }
}

/// Ascending neighbours of `u`: every index except `u` and its absent list.
pub struct ComplementNeighbors<'a> {
    u: NodeIndex,
    next: NodeIndex,
    n: usize,
    absent: &'a [NodeIndex],
}

impl Iterator for ComplementNeighbors<'_> {
    type Item = NodeIndex;

    fn next(&mut self) -> Option<NodeIndex> {
        while self.next < self.n {
            let v = self.next;
            self.next += 1;
            if v == self.u {
                continue;
            }
            match self.absent.first() {
                Some(&a) if a == v => {
                    self.absent = &self.absent[1..];
                }
                _ => return Some(v),
            }
        }
        None
    }
}

impl GraphView for ComplementView {
    type Neighbors<'a> = ComplementNeighbors<'a>;

    fn node_count(&self) -> usize {
        self.absent.len()
    }

    fn neighbors(&self, u: NodeIndex) -> Self::Neighbors<'_> {
        ComplementNeighbors { u, next: 0, n: self.absent.len(), absent: &self.absent[u] }
    }

    fn degree(&self, u: NodeIndex) -> usize {
        self.absent.len() - 1 - self.absent[u].len()
    }

    fn has_edge(&self, u: NodeIndex, v: NodeIndex) -> bool {
        u != v && self.absent[u].binary_search(&v).is_err()
    }

    fn induced(&self, nodes: &[NodeIndex]) -> Self {
        let local = local_positions(self.node_count(), nodes);
        let mut twice = 0;
        let absent = nodes
            .iter()
            .map(|&u| {
                let mut row: Vec<NodeIndex> = self.absent[u]
                    .iter()
                    .filter_map(|&v| match local[v] {
                        usize::MAX => None,
                        i => Some(i),
                    })
                    .collect();
                row.sort_unstable();
                twice += row.len();
                row
            })
            .collect();
        ComplementView { absent, absent_pairs: twice / 2 }
    }

    fn edge_count(&self) -> usize {
        let n = self.absent.len();
        n * n.saturating_sub(1) / 2 - self.absent_pairs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_complement_is_complete() {
        let view = complement_view(&Graph::from_edges(4, []));
        assert_eq!(view.edge_count(), 6);
        assert!((0..4).all(|u| view.degree(u) == 3));
        assert_eq!(view.neighbors(2).collect::<Vec<_>>(), vec![0, 1, 3]);
    }

    #[test]
    fn complete_complement_is_empty() {
        let k4 = Graph::from_edges(4, (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))));
        let view = complement_view(&k4);
        assert_eq!(view.edge_count(), 0);
        assert!((0..4).all(|u| view.neighbors(u).next().is_none()));
    }

    #[test]
    fn exactly_one_of_present_or_absent() {
        let g = Graph::from_edges(6, [(0, 1), (0, 5), (2, 3), (4, 5)]);
        let view = complement_view(&g);
        for u in 0..6 {
            for v in 0..6 {
                if u != v {
                    assert_ne!(view.has_edge(u, v), g.has_edge(u, v));
                }
            }
            assert_eq!(view.degree(u), 5 - g.degree(u));
            assert_eq!(view.neighbors(u).count(), view.degree(u));
        }
        assert_eq!(view.materialize(), g.complement());
    }

    #[test]
    fn induced_view_matches_induced_complement() {
        let g = Graph::from_edges(6, [(0, 1), (0, 5), (2, 3), (4, 5), (1, 4)]);
        let nodes = [5, 0, 4, 1];
        let a = complement_view(&g).induced(&nodes).materialize();
        let b = g.induced_subgraph(&nodes).complement();
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
    }
}
