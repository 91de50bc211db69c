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

//! Local and global node connectivity, edge connectivity and average node
//! connectivity.
//!
//! Two estimators of the local connectivity `κ(u, v)` are provided: an exact
//! one computing a max-flow on the node-split network, and the shortest-path
//! marking approximation, which is a lower bound.

use std::str::FromStr;

use dashmap::DashMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::is_connected;
use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::{GraphView, NodeIndex};
use crate::Ratio;

/// How `κ(u, v)` is estimated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// Max-flow on the node-split network.
    Exact,
    /// Shortest-path marking; never exceeds the exact value.
    Approx,
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact-flow" | "flow" => Ok(Estimator::Exact),
            "approx" => Ok(Estimator::Approx),
            other => Err(Error::Config(format!("unknown estimator `{other}`"))),
        }
    }
}

/// Exact local node connectivity on a fixed graph.
///
/// Node `w` becomes `w_in -> w_out` with capacity one; every undirected
/// edge `a -- b` becomes the unit arcs `a_out -> b_in` and `b_out -> a_in`.
/// The flow from `u_out` to `v_in` counts node-independent paths, with a
/// direct edge contributing exactly one.
pub struct ExactLocal {
    net: FlowNetwork,
    degree: Vec<usize>,
}

impl ExactLocal {
    pub fn new<G: GraphView>(g: &G) -> Self {
        let n = g.node_count();
        let mut arcs = Vec::with_capacity(n + 2 * g.edge_count());
        for w in 0..n {
            arcs.push((2 * w, 2 * w + 1, 1));
        }
        for a in 0..n {
            for b in g.neighbors(a) {
                arcs.push((2 * a + 1, 2 * b, 1));
            }
        }
        ExactLocal { net: FlowNetwork::new(2 * n, &arcs), degree: (0..n).map(|u| g.degree(u)).collect() }
    }

    /// `min(κ(u, v), cutoff)`.
    pub fn local(&mut self, u: NodeIndex, v: NodeIndex, cutoff: Option<usize>) -> usize {
        debug_assert_ne!(u, v);
        let limit = self.degree[u].min(self.degree[v]).min(cutoff.unwrap_or(usize::MAX));
        if limit == 0 {
            return 0;
        }
        let flow = self.net.max_flow(2 * u + 1, 2 * v, limit);
        self.net.reset();
        flow
    }
}

/// Shortest-path marking estimate of `κ(u, v)`.
///
/// Repeatedly finds a shortest `u`-`v` path avoiding the interior nodes of
/// the paths found so far. Breadth-first search expands neighbours in
/// ascending index order and the path is read back from `v` taking the
/// smallest-index predecessor at each step, so results are reproducible.
pub struct ApproxLocal<'g, G> {
    g: &'g G,
    // per search: forward and backward parents, valid when stamped
    pred: Vec<NodeIndex>,
    succ: Vec<NodeIndex>,
    pred_seen: Vec<u32>,
    succ_seen: Vec<u32>,
    used: Vec<u32>,
    bfs_stamp: u32,
    query_stamp: u32,
    forward: Vec<NodeIndex>,
    backward: Vec<NodeIndex>,
    next: Vec<NodeIndex>,
}

impl<'g, G: GraphView> ApproxLocal<'g, G> {
    pub fn new(g: &'g G) -> Self {
        let n = g.node_count();
        ApproxLocal {
            g,
            pred: vec![0; n],
            succ: vec![0; n],
            pred_seen: vec![0; n],
            succ_seen: vec![0; n],
            used: vec![0; n],
            bfs_stamp: 0,
            query_stamp: 0,
            forward: Vec::new(),
            backward: Vec::new(),
            next: Vec::new(),
        }
    }

    fn bump(stamp: &mut u32, marks: &mut [&mut Vec<u32>]) -> u32 {
        *stamp = stamp.wrapping_add(1);
        if *stamp == 0 {
            for m in marks.iter_mut() {
                m.iter_mut().for_each(|x| *x = 0);
            }
            *stamp = 1;
        }
        *stamp
    }

    /// Bidirectional breadth-first search between `u` and `v` avoiding used
    /// nodes, alternating one full level from each side. Returns the node
    /// where the two trees meet.
    fn search(&mut self, u: NodeIndex, v: NodeIndex) -> Option<NodeIndex> {
        let stamp = Self::bump(&mut self.bfs_stamp, &mut [&mut self.pred_seen, &mut self.succ_seen]);
        let query = self.query_stamp;
        self.pred_seen[u] = stamp;
        self.pred[u] = u;
        self.succ_seen[v] = stamp;
        self.succ[v] = v;
        self.forward.clear();
        self.forward.push(u);
        self.backward.clear();
        self.backward.push(v);
        let mut level = 0usize;
        while !self.forward.is_empty() && !self.backward.is_empty() {
            level += 1;
            let (fringe, mine, mine_seen, other_seen) = if level % 2 == 1 {
                (&mut self.forward, &mut self.pred, &mut self.pred_seen, &self.succ_seen)
            } else {
                (&mut self.backward, &mut self.succ, &mut self.succ_seen, &self.pred_seen)
            };
            self.next.clear();
            for &x in fringe.iter() {
                for y in self.g.neighbors(x) {
                    if self.used[y] == query {
                        continue;
                    }
                    if mine_seen[y] != stamp {
                        mine_seen[y] = stamp;
                        mine[y] = x;
                        self.next.push(y);
                    }
                    if other_seen[y] == stamp {
                        return Some(y);
                    }
                }
            }
            std::mem::swap(fringe, &mut self.next);
        }
        None
    }

    /// `min(estimate, cutoff)`.
    pub fn local(&mut self, u: NodeIndex, v: NodeIndex, cutoff: Option<usize>) -> usize {
        debug_assert_ne!(u, v);
        let limit = self.g.degree(u).min(self.g.degree(v)).min(cutoff.unwrap_or(usize::MAX));
        if limit == 0 {
            return 0;
        }
        let query = Self::bump(&mut self.query_stamp, &mut [&mut self.used]);
        // the endpoints are off limits as interior nodes, which also keeps
        // the direct edge from being counted twice
        self.used[u] = query;
        self.used[v] = query;
        let mut count = usize::from(self.g.has_edge(u, v));
        while count < limit {
            let Some(w) = self.search(u, v) else { break };
            let mut x = w;
            while x != u {
                self.used[x] = query;
                x = self.pred[x];
            }
            let mut x = w;
            while x != v {
                self.used[x] = query;
                x = self.succ[x];
            }
            count += 1;
        }
        count
    }
}

/// Either estimator behind one interface, for per-thread reuse.
pub enum LocalSolver<'g, G> {
    Exact(ExactLocal),
    Approx(ApproxLocal<'g, G>),
}

impl<'g, G: GraphView> LocalSolver<'g, G> {
    pub fn new(g: &'g G, estimator: Estimator) -> Self {
        match estimator {
            Estimator::Exact => LocalSolver::Exact(ExactLocal::new(g)),
            Estimator::Approx => LocalSolver::Approx(ApproxLocal::new(g)),
        }
    }

    pub fn local(&mut self, u: NodeIndex, v: NodeIndex, cutoff: Option<usize>) -> usize {
        match self {
            LocalSolver::Exact(s) => s.local(u, v, cutoff),
            LocalSolver::Approx(s) => s.local(u, v, cutoff),
        }
    }
}

fn check_pair<G: GraphView>(g: &G, u: NodeIndex, v: NodeIndex) -> Result<()> {
    let n = g.node_count();
    if u >= n || v >= n {
        return Err(Error::Domain(format!("node index out of range for {n} nodes")));
    }
    if u == v {
        return Err(Error::Domain("local connectivity of a node with itself is undefined".into()));
    }
    Ok(())
}

/// Exact `κ(u, v)`: the number of node-independent `u`-`v` paths.
/// Returns 0 when `u` and `v` lie in different components.
pub fn local_node_connectivity_exact<G: GraphView>(g: &G, u: NodeIndex, v: NodeIndex) -> Result<usize> {
    check_pair(g, u, v)?;
    Ok(ExactLocal::new(g).local(u, v, None))
}

/// Shortest-path marking lower bound on `κ(u, v)`.
pub fn local_node_connectivity_approx<G: GraphView>(g: &G, u: NodeIndex, v: NodeIndex) -> Result<usize> {
    check_pair(g, u, v)?;
    Ok(ApproxLocal::new(g).local(u, v, None))
}

fn is_complete<G: GraphView>(g: &G) -> bool {
    let n = g.node_count();
    g.edge_count() == n * n.saturating_sub(1) / 2
}

/// Exact node connectivity `κ(G)`.
///
/// Fixes a minimum-degree node `v` and takes the minimum of `κ(v, w)` over
/// non-neighbours `w` and of `κ(x, y)` over non-adjacent neighbour pairs of
/// `v`. A complete graph on `n` nodes has connectivity `n - 1`; a
/// disconnected graph has 0.
pub fn node_connectivity<G: GraphView>(g: &G) -> Result<usize> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::Domain(format!("node connectivity needs at least 2 nodes, got {n}")));
    }
    if !is_connected(g) {
        return Ok(0);
    }
    if is_complete(g) {
        return Ok(n - 1);
    }
    let v = (0..n).min_by_key(|&u| (g.degree(u), u)).unwrap();
    let mut best = g.degree(v);
    let mut solver = ExactLocal::new(g);
    let mut is_nbr = vec![false; n];
    for w in g.neighbors(v) {
        is_nbr[w] = true;
    }
    for w in 0..n {
        if w != v && !is_nbr[w] {
            best = best.min(solver.local(v, w, Some(best)));
        }
    }
    let nbrs: Vec<NodeIndex> = g.neighbors(v).collect();
    for (i, &x) in nbrs.iter().enumerate() {
        for &y in &nbrs[i + 1..] {
            if !g.has_edge(x, y) {
                best = best.min(solver.local(x, y, Some(best)));
            }
        }
    }
    Ok(best)
}

/// Exact edge connectivity `λ(G)` by unit-capacity max-flow from one fixed
/// node to every other node.
pub fn edge_connectivity<G: GraphView>(g: &G) -> Result<usize> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::Domain(format!("edge connectivity needs at least 2 nodes, got {n}")));
    }
    if !is_connected(g) {
        return Ok(0);
    }
    let mut arcs = Vec::with_capacity(2 * g.edge_count());
    for a in 0..n {
        for b in g.neighbors(a) {
            arcs.push((a, b, 1));
        }
    }
    let mut net = FlowNetwork::new(n, &arcs);
    let mut best = g.min_degree().unwrap_or(0);
    for v in 1..n {
        best = best.min(net.max_flow(0, v, best));
        net.reset();
    }
    Ok(best)
}

/// What happens to pairwise `κ(u, v)` values once computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CachePolicy {
    /// Keep every value and reuse it.
    Store,
    /// Recompute on every request.
    Recompute,
    /// Do not compute values beyond what detection needs.
    Off,
}

impl FromStr for CachePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "store" => Ok(CachePolicy::Store),
            "recompute" => Ok(CachePolicy::Recompute),
            "off" => Ok(CachePolicy::Off),
            other => Err(Error::Config(format!("unknown cache policy `{other}`"))),
        }
    }
}

/// Pairwise connectivity values keyed by unordered node pair. Distinct keys
/// may be inserted concurrently.
#[derive(Debug)]
pub struct PairConnectivityCache {
    policy: CachePolicy,
    values: DashMap<(NodeIndex, NodeIndex), u32>,
}

impl PairConnectivityCache {
    pub fn new(policy: CachePolicy) -> Self {
        PairConnectivityCache { policy, values: DashMap::new() }
    }

    pub fn policy(&self) -> CachePolicy {
        self.policy
    }

    fn key(u: NodeIndex, v: NodeIndex) -> (NodeIndex, NodeIndex) {
        if u < v {
            (u, v)
        } else {
            (v, u)
        }
    }

    pub fn get(&self, u: NodeIndex, v: NodeIndex) -> Option<usize> {
        self.values.get(&Self::key(u, v)).map(|x| *x as usize)
    }

    /// Records a value; a no-op unless the policy is [`CachePolicy::Store`].
    pub fn insert(&self, u: NodeIndex, v: NodeIndex, value: usize) {
        if self.policy == CachePolicy::Store {
            self.values.insert(Self::key(u, v), value as u32);
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn clear(&self) {
        self.values.clear();
    }
}

/// Average node connectivity: `Σ_{u<v} κ(u, v) / C(n, 2)`, exact.
///
/// With a [`CachePolicy::Store`] cache, stored pair values are used and
/// missing ones are computed and stored.
pub fn average_node_connectivity<G: GraphView + Sync>(
    g: &G,
    estimator: Estimator,
    cache: &PairConnectivityCache,
) -> Result<Ratio> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::Domain(format!("average connectivity needs at least 2 nodes, got {n}")));
    }
    let store = cache.policy() == CachePolicy::Store;
    let total: u64 = (0..n)
        .into_par_iter()
        .map_init(
            || LocalSolver::new(g, estimator),
            |solver, u| {
                (u + 1..n)
                    .map(|v| {
                        if store {
                            if let Some(x) = cache.get(u, v) {
                                return x as u64;
                            }
                        }
                        let x = solver.local(u, v, None);
                        cache.insert(u, v, x);
                        x as u64
                    })
                    .sum::<u64>()
            },
        )
        .sum();
    let pairs = (n as u64) * (n as u64 - 1) / 2;
    Ok(Ratio::new(total, pairs))
}

/// Whitney triple plus the average connectivity, all exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectivityReport {
    pub kappa: usize,
    pub lambda: usize,
    pub delta: usize,
    pub average_kappa: Ratio,
}

pub fn connectivity_report<G: GraphView + Sync>(g: &G) -> Result<ConnectivityReport> {
    Ok(ConnectivityReport {
        kappa: node_connectivity(g)?,
        lambda: edge_connectivity(g)?,
        delta: g.min_degree().unwrap_or(0),
        average_kappa: average_node_connectivity(g, Estimator::Exact, &PairConnectivityCache::new(CachePolicy::Off))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, cycle, path, petersen, star};
    use crate::graph::Graph;

    #[test]
    fn exact_examples() {
        let k5 = complete(5);
        assert_eq!(local_node_connectivity_exact(&k5, 0, 3).unwrap(), 4);
        let p = petersen();
        for u in 0..10 {
            for v in u + 1..10 {
                assert_eq!(local_node_connectivity_exact(&p, u, v).unwrap(), 3);
            }
        }
        assert_eq!(local_node_connectivity_exact(&path(3), 0, 2).unwrap(), 1);
        assert!(matches!(local_node_connectivity_exact(&k5, 1, 1), Err(Error::Domain(_))));
        let two = Graph::from_edges(4, [(0, 1), (2, 3)]);
        assert_eq!(local_node_connectivity_exact(&two, 0, 3).unwrap(), 0);
    }

    #[test]
    fn approx_examples() {
        assert_eq!(local_node_connectivity_approx(&cycle(4), 0, 2).unwrap(), 2);
        let k5 = complete(5);
        for u in 0..5 {
            for v in u + 1..5 {
                assert_eq!(local_node_connectivity_approx(&k5, u, v).unwrap(), 4);
            }
        }
        assert!(matches!(local_node_connectivity_approx(&k5, 2, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn approx_misses_paths_a_shortest_path_blocks() {
        // The shortest 0-5 path 0-1-2-5 uses both 1 and 2, which the two
        // longer disjoint paths 0-1-3-5 and 0-4-2-5 need.
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 5), (1, 3), (3, 5), (0, 4), (4, 2)]);
        assert_eq!(local_node_connectivity_exact(&g, 0, 5).unwrap(), 2);
        assert_eq!(local_node_connectivity_approx(&g, 0, 5).unwrap(), 1);
    }

    #[test]
    fn global_connectivity_examples() {
        assert_eq!(node_connectivity(&petersen()).unwrap(), 3);
        assert_eq!(node_connectivity(&star(4)).unwrap(), 1);
        assert_eq!(node_connectivity(&complete(5)).unwrap(), 4);
        assert_eq!(node_connectivity(&Graph::from_edges(4, [(0, 1), (2, 3)])).unwrap(), 0);
        assert!(node_connectivity(&Graph::from_edges(1, [])).is_err());
        assert_eq!(edge_connectivity(&cycle(6)).unwrap(), 2);
        assert_eq!(edge_connectivity(&complete(5)).unwrap(), 4);
        assert_eq!(edge_connectivity(&Graph::from_edges(3, [(0, 1)])).unwrap(), 0);
    }

    #[test]
    fn average_examples() {
        let off = PairConnectivityCache::new(CachePolicy::Off);
        for n in 2..7 {
            assert_eq!(
                average_node_connectivity(&complete(n), Estimator::Exact, &off).unwrap(),
                Ratio::from_integer(n as u64 - 1)
            );
        }
        assert_eq!(average_node_connectivity(&path(3), Estimator::Exact, &off).unwrap(), Ratio::from_integer(1));
        assert_eq!(average_node_connectivity(&cycle(4), Estimator::Approx, &off).unwrap(), Ratio::from_integer(2));
        assert!(average_node_connectivity(&Graph::from_edges(1, []), Estimator::Exact, &off).is_err());
    }

    #[test]
    fn store_policy_reuses_values() {
        let g = cycle(5);
        let cache = PairConnectivityCache::new(CachePolicy::Store);
        let a = average_node_connectivity(&g, Estimator::Exact, &cache).unwrap();
        assert_eq!(cache.len(), 10);
        // poison one entry; the stored value must be consumed
        cache.insert(0, 1, 7);
        let b = average_node_connectivity(&g, Estimator::Exact, &cache).unwrap();
        assert_eq!(b - a, Ratio::new(5, 10));
        let off = PairConnectivityCache::new(CachePolicy::Recompute);
        average_node_connectivity(&g, Estimator::Exact, &off).unwrap();
        assert!(off.is_empty());
    }

    #[test]
    fn report_is_whitney_ordered() {
        let r = connectivity_report(&petersen()).unwrap();
        assert_eq!((r.kappa, r.lambda, r.delta), (3, 3, 3));
        assert_eq!(r.average_kappa, Ratio::from_integer(3));
    }
}
