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

//! Linear-time decompositions: connected components, biconnected components
//! with articulation points, and core numbers.

use std::collections::VecDeque;

use crate::graph::{Graph, GraphView, NodeIndex};

/// Connected components as ascending node lists, ordered by smallest member.
pub fn connected_components<G: GraphView>(g: &G) -> Vec<Vec<NodeIndex>> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        queue.push_back(s);
        let mut comp = Vec::new();
        while let Some(u) = queue.pop_front() {
            comp.push(u);
            for v in g.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

pub fn is_connected<G: GraphView>(g: &G) -> bool {
    g.node_count() <= 1 || connected_components(g).len() == 1
}

/// Edge partition into biconnected components plus the articulation points.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BicomponentSet {
    /// Each entry holds the `(u, v)`, `u < v`, edges of one bicomponent, sorted.
    pub components: Vec<Vec<(NodeIndex, NodeIndex)>>,
    /// Ascending.
    pub articulation_points: Vec<NodeIndex>,
}

impl BicomponentSet {
    /// Node set of every bicomponent (ascending). A bridge yields a 2-node set.
    pub fn node_sets(&self) -> Vec<Vec<NodeIndex>> {
        self.components
            .iter()
            .map(|edges| {
                let mut nodes: Vec<NodeIndex> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
                nodes.sort_unstable();
                nodes.dedup();
                nodes
            })
            .collect()
    }
}

/// Biconnected components by depth-first lowpoint computation.
///
/// Components come out ordered by the smallest edge they contain; isolated
/// nodes belong to none.
pub fn biconnected_components<G: GraphView>(g: &G) -> BicomponentSet {
    const UNSEEN: usize = usize::MAX;
    let n = g.node_count();
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut is_cut = vec![false; n];
    let mut time = 0usize;
    let mut edge_stack: Vec<(NodeIndex, NodeIndex)> = Vec::new();
    let mut components = Vec::new();

    for root in 0..n {
        if disc[root] != UNSEEN {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        let mut stack = vec![(root, UNSEEN, g.neighbors(root))];
        while let Some(frame) = stack.last_mut() {
            let (u, parent) = (frame.0, frame.1);
            match frame.2.next() {
                Some(v) if v == parent => {}
                Some(v) if disc[v] == UNSEEN => {
                    edge_stack.push((u, v));
                    disc[v] = time;
                    low[v] = time;
                    time += 1;
                    stack.push((v, u, g.neighbors(v)));
                }
                Some(v) => {
                    if disc[v] < disc[u] {
                        low[u] = low[u].min(disc[v]);
                        edge_stack.push((u, v));
                    }
                }
                None => {
                    stack.pop();
                    if let Some(pframe) = stack.last() {
                        let p = pframe.0;
                        low[p] = low[p].min(low[u]);
                        if low[u] >= disc[p] {
                            if p == root {
                                root_children += 1;
                            } else {
                                is_cut[p] = true;
                            }
                            let mut comp = Vec::new();
                            while let Some((a, b)) = edge_stack.pop() {
                                comp.push(if a < b { (a, b) } else { (b, a) });
                                if (a, b) == (p, u) {
                                    break;
                                }
                            }
                            comp.sort_unstable();
                            components.push(comp);
                        }
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    components.sort_unstable_by(|a: &Vec<(usize, usize)>, b| a[0].cmp(&b[0]));
    BicomponentSet {
        components,
        articulation_points: (0..n).filter(|&u| is_cut[u]).collect(),
    }
}

/// Core number of every node by bucket peeling (linear in `n + m`).
pub fn core_numbers<G: GraphView>(g: &G) -> Vec<usize> {
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }
    let mut deg: Vec<usize> = (0..n).map(|u| g.degree(u)).collect();
    let max_deg = *deg.iter().max().unwrap();
    // bin[d] = start of the degree-d block in `order`
    let mut bin = vec![0usize; max_deg + 2];
    for &d in &deg {
        bin[d + 1] += 1;
    }
    for d in 1..bin.len() {
        bin[d] += bin[d - 1];
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0usize; n];
    {
        let mut next = bin.clone();
        for u in 0..n {
            pos[u] = next[deg[u]];
            order[pos[u]] = u;
            next[deg[u]] += 1;
        }
    }
    for i in 0..n {
        let v = order[i];
        for u in g.neighbors(v) {
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg
}

/// Nodes with core number `>= k`, ascending.
pub fn k_core_nodes(cores: &[usize], k: usize) -> Vec<NodeIndex> {
    (0..cores.len()).filter(|&u| cores[u] >= k).collect()
}

/// Subgraph induced by the nodes of core number `>= k`; possibly empty.
pub fn k_core_subgraph(g: &Graph, k: usize, cores: &[usize]) -> Graph {
    g.induced_subgraph(&k_core_nodes(cores, k))
}

/// The `k`-core of `g` by repeated removal of nodes of degree `< k`,
/// without computing every core number.
pub fn k_core_by_peeling<G: GraphView>(g: &G, k: usize) -> Vec<NodeIndex> {
    let n = g.node_count();
    let mut deg: Vec<usize> = (0..n).map(|u| g.degree(u)).collect();
    let mut removed = vec![false; n];
    let mut queue: Vec<NodeIndex> = (0..n).filter(|&u| deg[u] < k).collect();
    for &u in &queue {
        removed[u] = true;
    }
    while let Some(u) = queue.pop() {
        for v in g.neighbors(u) {
            if !removed[v] {
                deg[v] -= 1;
                if deg[v] < k {
                    removed[v] = true;
                    queue.push(v);
                }
            }
        }
    }
    (0..n).filter(|&u| !removed[u]).collect()
}
