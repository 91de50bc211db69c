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

//! Exact k-component detection: recursive splitting on minimum node
//! cut-sets, an exhaustive oracle for tiny graphs, and verification of
//! heuristic output.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::budget::Deadline;
use crate::components::{is_sorted_subset, KComponents, Method};
use crate::connectivity::{average_node_connectivity, node_connectivity, CachePolicy, Estimator, PairConnectivityCache};
use crate::decomposition::{biconnected_components, connected_components, is_connected};
use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::{Graph, GraphView, NodeIndex};
use crate::Ratio;

/// Largest graph the exhaustive oracle accepts.
pub const BRUTE_FORCE_LIMIT: usize = 14;

fn is_complete<G: GraphView>(g: &G) -> bool {
    let n = g.node_count();
    g.edge_count() == n * n.saturating_sub(1) / 2
}

/// Strongly connected components of a directed graph given by successor
/// lists; returns the component id of every node.
fn strong_components(succ: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let n = succ.len();
    let mut pred = vec![Vec::new(); n];
    for (a, out) in succ.iter().enumerate() {
        for &b in out {
            pred[b].push(a);
        }
    }
    // Kosaraju: finishing order on succ, then sweep pred.
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some(&mut (x, ref mut i)) = stack.last_mut() {
            if let Some(&y) = succ[x].get(*i) {
                *i += 1;
                if !seen[y] {
                    seen[y] = true;
                    stack.push((y, 0));
                }
            } else {
                order.push(x);
                stack.pop();
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for &root in order.iter().rev() {
        if comp[root] != usize::MAX {
            continue;
        }
        comp[root] = count;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &y in &pred[x] {
                if comp[y] == usize::MAX {
                    comp[y] = count;
                    stack.push(y);
                }
            }
        }
        count += 1;
    }
    (comp, count)
}

const UNDECIDED: u8 = 0;
const INSIDE: u8 = 1;
const OUTSIDE: u8 = 2;

/// Closed source sets of the residual DAG, one per minimum cut.
struct ClosureEnumerator<'a> {
    succ: &'a [Vec<usize>],
    pred: &'a [Vec<usize>],
    free: Vec<usize>,
}

impl ClosureEnumerator<'_> {
    fn spread(adj: &[Vec<usize>], from: usize, value: u8, state: &mut [u8]) {
        let mut stack = vec![from];
        state[from] = value;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if state[y] == UNDECIDED {
                    state[y] = value;
                    stack.push(y);
                }
            }
        }
    }

    fn run(&self, state: &mut Vec<u8>, pos: usize, emit: &mut dyn FnMut(&[u8])) {
        let mut p = pos;
        while p < self.free.len() && state[self.free[p]] != UNDECIDED {
            p += 1;
        }
        let Some(&u) = self.free.get(p) else {
            emit(state);
            return;
        };
        let saved = state.clone();
        Self::spread(self.succ, u, INSIDE, state);
        self.run(state, p + 1, emit);
        state.copy_from_slice(&saved);
        Self::spread(self.pred, u, OUTSIDE, state);
        self.run(state, p + 1, emit);
        state.copy_from_slice(&saved);
    }
}

/// Every minimum `x`-`v` node cut, given a network already carrying a
/// maximum flow from `x_out` to `v_in`.
fn min_cuts_from_residual(net: &FlowNetwork, n: usize, x: NodeIndex, v: NodeIndex, out: &mut BTreeSet<Vec<NodeIndex>>) {
    let mut succ = vec![Vec::new(); 2 * n];
    for (a, b) in net.residual_arcs() {
        succ[a].push(b);
    }
    let (comp, count) = strong_components(&succ);
    let mut dag_succ: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (a, outs) in succ.iter().enumerate() {
        for &b in outs {
            if comp[a] != comp[b] {
                dag_succ[comp[a]].push(comp[b]);
            }
        }
    }
    let mut dag_pred: Vec<Vec<usize>> = vec![Vec::new(); count];
    for list in &mut dag_succ {
        list.sort_unstable();
        list.dedup();
    }
    for (a, outs) in dag_succ.iter().enumerate() {
        for &b in outs {
            dag_pred[b].push(a);
        }
    }
    let mut state = vec![UNDECIDED; count];
    ClosureEnumerator::spread(&dag_succ, comp[2 * x + 1], INSIDE, &mut state);
    debug_assert_eq!(state[comp[2 * v]], UNDECIDED, "sink reachable in the residual graph");
    ClosureEnumerator::spread(&dag_pred, comp[2 * v], OUTSIDE, &mut state);
    let free: Vec<usize> = (0..count).filter(|&c| state[c] == UNDECIDED).collect();
    let en = ClosureEnumerator { succ: &dag_succ, pred: &dag_pred, free };
    en.run(&mut state, 0, &mut |st| {
        let cut: Vec<NodeIndex> = (0..n).filter(|&w| st[comp[2 * w]] == INSIDE && st[comp[2 * w + 1]] != INSIDE).collect();
        out.insert(cut);
    });
}

/// All minimum node cut-sets of a connected, non-complete graph, each
/// sorted, in lexicographic order.
///
/// Let `c = κ(G)` and `X` be `c` nodes of highest degree. A minimum cut
/// either equals `X` or separates some `x ∈ X` from a non-neighbour `v`
/// with `κ(x, v) = c`; all minimum `x`-`v` cuts are read off the residual
/// graph of one maximum flow as its closed source sets.
pub fn all_min_cutsets(g: &Graph) -> Result<Vec<Vec<NodeIndex>>> {
    all_min_cutsets_until(g, &Deadline::none())
}

fn all_min_cutsets_until(g: &Graph, deadline: &Deadline) -> Result<Vec<Vec<NodeIndex>>> {
    let n = g.node_count();
    if n < 2 || is_complete(g) {
        return Err(Error::Domain("a complete graph has no node cut-set".into()));
    }
    if !is_connected(g) {
        return Err(Error::Domain("node cut-sets are enumerated for connected graphs only".into()));
    }
    let c = node_connectivity(g)?;
    let mut by_degree: Vec<NodeIndex> = (0..n).collect();
    by_degree.sort_by_key(|&u| (std::cmp::Reverse(g.degree(u)), u));
    let mut x_set: Vec<NodeIndex> = by_degree[..c].to_vec();
    x_set.sort_unstable();

    let mut cuts = BTreeSet::new();
    let rest: Vec<NodeIndex> = (0..n).filter(|u| x_set.binary_search(u).is_err()).collect();
    if !is_connected(&g.induced_subgraph(&rest)) {
        cuts.insert(x_set.clone());
    }
    let inf = (n + 1) as u32;
    let mut arcs = Vec::with_capacity(n + 2 * g.edge_count());
    for w in 0..n {
        arcs.push((2 * w, 2 * w + 1, 1));
    }
    for (a, b) in g.edges() {
        arcs.push((2 * a + 1, 2 * b, inf));
        arcs.push((2 * b + 1, 2 * a, inf));
    }
    let mut net = FlowNetwork::new(2 * n, &arcs);
    for &x in &x_set {
        for v in 0..n {
            if v == x || g.has_edge(x, v) {
                continue;
            }
            deadline.check()?;
            let flow = net.max_flow(2 * x + 1, 2 * v, c + 1);
            if flow == c {
                min_cuts_from_residual(&net, n, x, v, &mut cuts);
            }
            net.reset();
        }
    }
    Ok(cuts.into_iter().collect())
}

/// Splits `nodes` (local indices of `sub`) by each cut in turn; every part
/// keeps the cut nodes it contains on all sides.
fn refine_by_cuts(sub: &Graph, cuts: &[Vec<NodeIndex>]) -> Vec<Vec<NodeIndex>> {
    let n = sub.node_count();
    let mut parts: Vec<Vec<NodeIndex>> = vec![(0..n).collect()];
    let mut in_cut = vec![false; n];
    for cut in cuts {
        for &t in cut {
            in_cut[t] = true;
        }
        let mut next = BTreeSet::new();
        for part in &parts {
            let (tp, rest): (Vec<NodeIndex>, Vec<NodeIndex>) = part.iter().partition(|&&u| in_cut[u]);
            let pieces =
                if tp.is_empty() { Vec::new() } else { connected_components(&sub.induced_subgraph(&rest)) };
            if pieces.len() <= 1 {
                next.insert(part.clone());
                continue;
            }
            for piece in pieces {
                let mut p: Vec<NodeIndex> = piece.into_iter().map(|i| rest[i]).chain(tp.iter().copied()).collect();
                p.sort_unstable();
                next.insert(p);
            }
        }
        for &t in cut {
            in_cut[t] = false;
        }
        parts = drop_subsets(next.into_iter().collect());
    }
    parts
}

/// Removes sets contained in another set of the list.
fn drop_subsets(mut sets: Vec<Vec<NodeIndex>>) -> Vec<Vec<NodeIndex>> {
    sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    sets.dedup();
    let mut kept: Vec<Vec<NodeIndex>> = Vec::new();
    for s in sets {
        if !kept.iter().any(|k| is_sorted_subset(&s, k)) {
            kept.push(s);
        }
    }
    kept.sort();
    kept
}

/// Builds the per-level maximal sets from `(set, κ(set))` records.
fn aggregate(g: &Graph, records: &[(Vec<NodeIndex>, usize)], method: Method) -> KComponents {
    let mut raw: BTreeMap<usize, Vec<(Vec<NodeIndex>, Option<Ratio>)>> = BTreeMap::new();
    raw.insert(1, connected_components(g).into_iter().filter(|c| c.len() >= 2).map(|c| (c, None)).collect());
    let top = records.iter().map(|r| r.1).max().unwrap_or(0);
    for k in 2..=top {
        let sets: Vec<Vec<NodeIndex>> =
            records.iter().filter(|(s, c)| *c >= k && s.len() > k).map(|(s, _)| s.clone()).collect();
        raw.insert(k, drop_subsets(sets).into_iter().map(|s| (s, None)).collect());
    }
    KComponents::from_raw(method, raw)
}

/// Exact k-components of `g` at every level.
///
/// Starting from the biconnected components, each piece `P` is recorded
/// with `κ(P) = c` and, unless complete, split along all its minimum
/// cut-sets, the cut nodes going to every side; connected parts with more
/// than `c + 1` nodes are processed the same way. Every `k`-connected set with `k > c` inside `P`
/// survives whole in one part, so the maximal recorded sets with `κ >= k`
/// are exactly the k-components.
pub fn k_components_exact(g: &Graph) -> Result<KComponents> {
    k_components_exact_until(g, &Deadline::none())
}

pub fn k_components_exact_until(g: &Graph, deadline: &Deadline) -> Result<KComponents> {
    let mut records: Vec<(Vec<NodeIndex>, usize)> = Vec::new();
    let mut visited: HashSet<Vec<NodeIndex>> = HashSet::new();
    let mut stack: Vec<Vec<NodeIndex>> =
        biconnected_components(g).node_sets().into_iter().filter(|s| s.len() > 2).collect();
    while let Some(piece) = stack.pop() {
        deadline.check()?;
        if !visited.insert(piece.clone()) {
            continue;
        }
        let sub = g.induced_subgraph(&piece);
        let c = node_connectivity(&sub)?;
        if c >= 1 {
            records.push((piece.clone(), c));
        }
        if is_complete(&sub) {
            continue;
        }
        let lift = |local: Vec<NodeIndex>| -> Vec<NodeIndex> { local.into_iter().map(|i| piece[i]).collect() };
        let cuts = all_min_cutsets_until(&sub, deadline)?;
        for part in refine_by_cuts(&sub, &cuts) {
            let part_graph = sub.induced_subgraph(&part);
            for cc in connected_components(&part_graph) {
                if cc.len() >= c + 2 {
                    stack.push(lift(cc.into_iter().map(|i| part[i]).collect()));
                }
            }
        }
    }
    Ok(aggregate(g, &records, Method::MoodyWhite))
}

/// Exhaustive k-components for graphs of at most [`BRUTE_FORCE_LIMIT`]
/// nodes: `κ` of every node subset from the largest disconnected subset it
/// contains, then the maximal subsets per level.
pub fn k_components_bruteforce(g: &Graph) -> Result<KComponents> {
    let n = g.node_count();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { nodes: n, limit: BRUTE_FORCE_LIMIT });
    }
    let full = 1usize << n;
    let adj: Vec<usize> = (0..n).map(|u| g.neighbors(u).fold(0, |m, v| m | (1 << v))).collect();
    let connected = |s: usize| -> bool {
        if s == 0 {
            return true;
        }
        let mut reach = s & s.wrapping_neg();
        loop {
            let mut grow = reach;
            let mut bits = reach;
            while bits != 0 {
                let u = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                grow |= adj[u] & s;
            }
            if grow == reach {
                return reach == s;
            }
            reach = grow;
        }
    };
    // largest[s]: size of the largest disconnected subset of s (0 if none)
    let mut largest = vec![0u8; full];
    let mut kappa = vec![0u8; full];
    for s in 1..full {
        let size = s.count_ones() as u8;
        largest[s] = if size >= 2 && !connected(s) {
            size
        } else {
            let mut best = 0;
            let mut bits = s;
            while bits != 0 {
                let b = bits & bits.wrapping_neg();
                bits &= bits - 1;
                best = best.max(largest[s ^ b]);
            }
            best
        };
        kappa[s] = if largest[s] >= 2 { size - largest[s] } else { size - 1 };
    }
    let records: Vec<(Vec<NodeIndex>, usize)> = (1..full)
        .filter(|&s| s.count_ones() >= 3 && kappa[s] >= 2)
        .map(|s| ((0..n).filter(|&u| s >> u & 1 == 1).collect(), kappa[s] as usize))
        .collect();
    Ok(aggregate(g, &records, Method::BruteForce))
}

/// Fills in the average connectivity of every component, computed inside
/// the component's induced subgraph.
pub fn annotate_averages(g: &Graph, comps: &KComponents, estimator: Estimator) -> Result<KComponents> {
    let mut raw: BTreeMap<usize, Vec<(Vec<NodeIndex>, Option<Ratio>)>> = BTreeMap::new();
    let mut method = None;
    for c in comps.iter() {
        method = Some(c.method);
        let cache = PairConnectivityCache::new(CachePolicy::Off);
        let avg = average_node_connectivity(&g.induced_subgraph(&c.nodes), estimator, &cache)?;
        raw.entry(c.k).or_default().push((c.nodes.clone(), Some(avg)));
    }
    Ok(KComponents::from_raw(method.unwrap_or(Method::MoodyWhite), raw))
}

/// Outcome for one checked component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentCheck {
    pub id: usize,
    pub k: usize,
    pub order: usize,
    /// Exact `κ` of the induced subgraph.
    pub kappa: usize,
    pub confirmed: bool,
    /// For unconfirmed components, the exact `k`-components inside it.
    pub refinement: Vec<Vec<NodeIndex>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<ComponentCheck>,
}

impl VerificationReport {
    pub fn confirmed(&self) -> usize {
        self.checks.iter().filter(|c| c.confirmed).count()
    }

    pub fn total(&self) -> usize {
        self.checks.len()
    }

    /// Confirmed share; 1 when nothing was checked.
    pub fn confirmed_fraction(&self) -> f64 {
        if self.checks.is_empty() {
            1.0
        } else {
            self.confirmed() as f64 / self.total() as f64
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &ComponentCheck> {
        self.checks.iter().filter(|c| !c.confirmed)
    }
}

/// Checks that every component at level `>= min_level` induces a
/// `k`-connected subgraph, refining those that do not.
pub fn verify_components(g: &Graph, comps: &KComponents, min_level: usize) -> Result<VerificationReport> {
    let mut checks = Vec::new();
    for c in comps.iter().filter(|c| c.k >= min_level) {
        let sub = g.induced_subgraph(&c.nodes);
        let kappa = node_connectivity(&sub)?;
        let confirmed = kappa >= c.k;
        let refinement = if confirmed {
            Vec::new()
        } else {
            k_components_exact(&sub)?.level(c.k).iter().map(|r| r.nodes.iter().map(|&i| c.nodes[i]).collect()).collect()
        };
        checks.push(ComponentCheck { id: c.id, k: c.k, order: c.order(), kappa, confirmed, refinement });
    }
    Ok(VerificationReport { checks })
}
