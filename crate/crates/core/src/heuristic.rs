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

//! Auxiliary-graph heuristic for k-component detection.
//!
//! For each level `k >= 3` the k-core is split into biconnected pieces. In
//! each piece `SG` every pair gets a local connectivity estimate, and the
//! auxiliary graph `H` joins the pairs estimated at `k` or more. `H` is
//! dense, so it is held as a [`ComplementView`] storing only the pairs
//! below `k`. Dense cores of `H` are taken as candidates, pruned inside `SG`
//! by k-core peeling, and the biconnected pieces of the result are reported.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Deadline;
use crate::complement::ComplementView;
use crate::components::{KComponents, Method};
use crate::connectivity::{average_node_connectivity, CachePolicy, Estimator, LocalSolver, PairConnectivityCache};
use crate::decomposition::{biconnected_components, connected_components, core_numbers, k_core_by_peeling, k_core_nodes};
use crate::error::{Error, Result};
use crate::graph::{density, local_positions, Graph, GraphView, NodeIndex};
use crate::Ratio;

/// Test deciding when a shrinking candidate in `H` is dense enough.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum Relaxation {
    /// Accept at density `>=` the threshold.
    Density(f64),
    /// Accept when max degree minus min degree is at most this.
    DegreeSpread(usize),
}

impl Default for Relaxation {
    fn default() -> Self {
        Relaxation::Density(0.95)
    }
}

impl Relaxation {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Relaxation::Density(t) if !(t > 0.0 && t <= 1.0) => {
                Err(Error::Config(format!("density threshold must lie in (0, 1], got {t}")))
            }
            _ => Ok(()),
        }
    }

    fn accepts<G: GraphView>(&self, h: &G) -> bool {
        match *self {
            Relaxation::Density(t) => match density(h) {
                Ok(d) => (*d.numer() as f64) >= t * (*d.denom() as f64),
                Err(_) => false,
            },
            Relaxation::DegreeSpread(s) => match (h.min_degree(), h.max_degree()) {
                (Some(lo), Some(hi)) => hi - lo <= s,
                _ => false,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeuristicConfig {
    pub estimator: Estimator,
    pub relaxation: Relaxation,
    /// Store: reuse the pairwise values from auxiliary-graph construction.
    /// Recompute: recompute inside each component's induced subgraph.
    /// Off: report no averages, which lets the pairwise pass stop at `k`.
    pub average: CachePolicy,
    /// Re-run the auxiliary-graph step inside every detected component
    /// until it reproduces itself. Slower, more precise.
    pub rebuild_aux: bool,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            estimator: Estimator::Approx,
            relaxation: Relaxation::default(),
            average: CachePolicy::Store,
            rebuild_aux: false,
        }
    }
}

impl HeuristicConfig {
    pub fn method(&self) -> Method {
        match self.estimator {
            Estimator::Approx => Method::Approx,
            Estimator::Exact => Method::ExactFlow,
        }
    }
}

type Found = Vec<(Vec<NodeIndex>, Option<Ratio>)>;

/// Auxiliary graph of `sg` at level `k`: `u -- v` present iff the estimated
/// `κ(u, v) >= k`. Values are recorded in `cache` (according to its policy);
/// estimates are clipped at `k` unless the cache stores them.
pub fn build_auxiliary_graph<G: GraphView + Sync>(
    sg: &G,
    k: usize,
    estimator: Estimator,
    cache: &PairConnectivityCache,
) -> ComplementView {
    build_auxiliary_graph_until(sg, k, estimator, cache, &Deadline::none()).expect("no deadline")
}

fn build_auxiliary_graph_until<G: GraphView + Sync>(
    sg: &G,
    k: usize,
    estimator: Estimator,
    cache: &PairConnectivityCache,
    deadline: &Deadline,
) -> Result<ComplementView> {
    let n = sg.node_count();
    let cutoff = (cache.policy() != CachePolicy::Store).then_some(k);
    let rows: Vec<Option<Vec<NodeIndex>>> = (0..n)
        .into_par_iter()
        .map_init(
            || LocalSolver::new(sg, estimator),
            |solver, u| {
                if deadline.expired() {
                    return None;
                }
                let mut absent = Vec::new();
                for v in u + 1..n {
                    let x = solver.local(u, v, cutoff);
                    cache.insert(u, v, x);
                    if x < k {
                        absent.push(v);
                    }
                }
                Some(absent)
            },
        )
        .collect();
    let rows: Option<Vec<Vec<NodeIndex>>> = rows.into_iter().collect();
    rows.map(ComplementView::from_absent_rows).ok_or(Error::TimedOut)
}

fn uniform_core<G: GraphView>(h: &G) -> bool {
    let cores = core_numbers(h);
    cores.windows(2).all(|w| w[0] == w[1])
}

fn is_clique<G: GraphView>(h: &G) -> bool {
    let n = h.node_count();
    n >= 2 && h.edge_count() == n * (n - 1) / 2
}

/// The k-core of `sg[nodes]`, in `sg` indices.
fn k_core_within(sg: &Graph, nodes: &[NodeIndex], k: usize) -> Vec<NodeIndex> {
    let sub = sg.induced_subgraph(nodes);
    k_core_by_peeling(&sub, k).into_iter().map(|i| nodes[i]).collect()
}

/// Candidate node sets (in `sg` indices) from one biconnected piece `hs` of
/// the auxiliary graph; `hs` local index `i` is `sg` node `h_nodes[i]`.
///
/// Core values of `hs` are visited from the highest down. Each value's
/// nodes may be joined by the overlap — nodes outside the candidate adjacent
/// (in `hs`) to all of it — when that overlap is smaller than `k`; the
/// first candidate never takes an overlap. A candidate that is a clique in
/// `hs` is accepted at once; otherwise it is alternately k-cored in `sg` and
/// stripped of its minimum-degree nodes in `hs` until it is uniform-core
/// and passes the relaxation test.
pub fn extract_candidates(
    sg: &Graph,
    hs: &ComplementView,
    h_nodes: &[NodeIndex],
    k: usize,
    relaxation: Relaxation,
) -> Vec<Vec<NodeIndex>> {
    let cores = core_numbers(hs);
    let mut values: Vec<usize> = cores.clone();
    values.sort_unstable_by(|a, b| b.cmp(a));
    values.dedup();
    let to_sg = |set: &[NodeIndex]| -> Vec<NodeIndex> { set.iter().map(|&i| h_nodes[i]).collect() };
    let h_pos = local_positions(sg.node_count(), h_nodes);
    let mut out = Vec::new();
    for (rank, &c) in values.iter().enumerate() {
        let cands: Vec<NodeIndex> = (0..cores.len()).filter(|&i| cores[i] == c).collect();
        let mut members = cands.clone();
        if rank > 0 {
            let mut in_cands = vec![false; cores.len()];
            for &i in &cands {
                in_cands[i] = true;
            }
            let overlap: Vec<NodeIndex> = (0..cores.len())
                .filter(|&x| !in_cands[x] && hs.degree(x) >= cands.len() && cands.iter().all(|&y| hs.has_edge(x, y)))
                .collect();
            if !overlap.is_empty() && overlap.len() < k {
                members.extend(overlap);
                members.sort_unstable();
            }
        }
        if members.len() <= k {
            continue;
        }
        let hc = hs.induced(&members);
        let gc = if uniform_core(&hc) && is_clique(&hc) {
            k_core_within(sg, &to_sg(&members), k)
        } else {
            let mut current = members;
            loop {
                let gc = k_core_within(sg, &to_sg(&current), k);
                current = gc.iter().map(|&u| h_pos[u]).filter(|&i| i != usize::MAX).collect();
                if current.is_empty() {
                    break Vec::new();
                }
                let hc = hs.induced(&current);
                if uniform_core(&hc) && relaxation.accepts(&hc) {
                    break gc;
                }
                let lo = hc.min_degree().unwrap_or(0);
                current = current.iter().enumerate().filter(|&(i, _)| hc.degree(i) > lo).map(|(_, &x)| x).collect();
                if current.is_empty() {
                    break Vec::new();
                }
            }
        };
        if gc.len() > k {
            out.push(gc);
        }
    }
    out
}

/// Components of one biconnected piece `sg` of the k-core at level `k`, in
/// `sg` indices.
fn process_unit(sg: &Graph, k: usize, cfg: &HeuristicConfig, deadline: &Deadline) -> Result<Found> {
    let cache = PairConnectivityCache::new(cfg.average);
    let h = build_auxiliary_graph_until(sg, k, cfg.estimator, &cache, deadline)?;
    let mut found = Vec::new();
    for h_nodes in biconnected_components(&h).node_sets() {
        if h_nodes.len() <= k {
            continue;
        }
        deadline.check()?;
        let hs = h.induced(&h_nodes);
        for gc in extract_candidates(sg, &hs, &h_nodes, k, cfg.relaxation) {
            let gc_graph = sg.induced_subgraph(&gc);
            for piece in biconnected_components(&gc_graph).node_sets() {
                if piece.len() <= k {
                    continue;
                }
                let piece: Vec<NodeIndex> = piece.into_iter().map(|i| gc[i]).collect();
                let gk = k_core_within(sg, &piece, k);
                if gk.len() <= k {
                    continue;
                }
                let avg = match cfg.average {
                    CachePolicy::Store => Some(average_from_cache(sg, &gk, cfg.estimator, &cache)),
                    CachePolicy::Recompute => Some(average_node_connectivity(
                        &sg.induced_subgraph(&gk),
                        cfg.estimator,
                        &PairConnectivityCache::new(CachePolicy::Recompute),
                    )?),
                    CachePolicy::Off => None,
                };
                found.push((gk, avg));
            }
        }
    }
    Ok(found)
}

fn average_from_cache(sg: &Graph, nodes: &[NodeIndex], estimator: Estimator, cache: &PairConnectivityCache) -> Ratio {
    let mut total = 0u64;
    let mut solver = None;
    for (i, &u) in nodes.iter().enumerate() {
        for &v in &nodes[i + 1..] {
            let x = match cache.get(u, v) {
                Some(x) => x,
                None => solver.get_or_insert_with(|| LocalSolver::new(sg, estimator)).local(u, v, None),
            };
            total += x as u64;
        }
    }
    let n = nodes.len() as u64;
    Ratio::new(total, n * (n - 1) / 2)
}

/// Re-runs the unit step on each detected set until the output is the set
/// itself.
fn rebuild(sg: &Graph, k: usize, cfg: &HeuristicConfig, deadline: &Deadline, found: Found) -> Result<Found> {
    let mut done = Vec::new();
    let mut stack = found;
    while let Some((nodes, avg)) = stack.pop() {
        deadline.check()?;
        let sub = sg.induced_subgraph(&nodes);
        let again = process_unit(&sub, k, cfg, deadline)?;
        if again.is_empty() || again.iter().any(|(s, _)| s.len() == nodes.len()) {
            done.push((nodes, avg));
            continue;
        }
        stack.extend(again.into_iter().map(|(s, a)| (s.into_iter().map(|i| nodes[i]).collect(), a)));
    }
    Ok(done)
}

/// Heuristic k-components of `g` at every level.
///
/// Level 1 holds the connected components with at least two nodes and
/// level 2 the biconnected components with more than two nodes; their
/// averages are reported as 1 and 2. Levels from 3 up to the maximum core
/// number come from the auxiliary-graph procedure.
pub fn k_components_heuristic(g: &Graph, cfg: &HeuristicConfig) -> Result<KComponents> {
    k_components_heuristic_until(g, cfg, &Deadline::none())
}

pub fn k_components_heuristic_until(g: &Graph, cfg: &HeuristicConfig, deadline: &Deadline) -> Result<KComponents> {
    cfg.relaxation.validate()?;
    let with_avg = |x: u64| (cfg.average != CachePolicy::Off).then(|| Ratio::from_integer(x));
    let mut raw: BTreeMap<usize, Found> = BTreeMap::new();
    let level1: Found = connected_components(g).into_iter().filter(|c| c.len() >= 2).map(|c| (c, with_avg(1))).collect();
    raw.insert(1, level1);
    let level2: Found = biconnected_components(g)
        .node_sets()
        .into_iter()
        .filter(|c| c.len() > 2)
        .map(|c| (c, with_avg(2)))
        .collect();
    raw.insert(2, level2);

    let cores = core_numbers(g);
    let max_core = cores.iter().copied().max().unwrap_or(0);
    for k in 3..=max_core {
        let core = k_core_nodes(&cores, k);
        let c = g.induced_subgraph(&core);
        let mut level = Vec::new();
        for piece in biconnected_components(&c).node_sets() {
            if piece.len() <= k {
                continue;
            }
            deadline.check()?;
            let sg_nodes: Vec<NodeIndex> = piece.into_iter().map(|i| core[i]).collect();
            let sg = g.induced_subgraph(&sg_nodes);
            let mut found = process_unit(&sg, k, cfg, deadline)?;
            if cfg.rebuild_aux {
                found = rebuild(&sg, k, cfg, deadline, found)?;
            }
            level.extend(found.into_iter().map(|(s, a)| (s.into_iter().map(|i| sg_nodes[i]).collect(), a)));
        }
        raw.insert(k, level);
    }
    Ok(KComponents::from_raw(cfg.method(), raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, cycle, petersen};

    fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
        let off = a.node_count();
        let edges: Vec<(usize, usize)> = a.edges().chain(b.edges().map(|(u, v)| (u + off, v + off))).collect();
        Graph::from_edges(off + b.node_count(), edges)
    }

    #[test]
    fn complete_graph_is_one_component_per_level() {
        let comps = k_components_heuristic(&complete(5), &HeuristicConfig::default()).unwrap();
        assert_eq!(comps.max_level(), 4);
        for k in 1..=4 {
            assert_eq!(comps.level(k).len(), 1);
            assert_eq!(comps.level(k)[0].nodes, vec![0, 1, 2, 3, 4]);
        }
        assert_eq!(comps.level(4)[0].average_connectivity, Some(Ratio::from_integer(4)));
    }

    #[test]
    fn petersen_is_three_connected() {
        let cfg = HeuristicConfig { estimator: Estimator::Exact, ..HeuristicConfig::default() };
        let comps = k_components_heuristic(&petersen(), &cfg).unwrap();
        assert_eq!(comps.max_level(), 3);
        assert_eq!(comps.level(3)[0].order(), 10);
        assert_eq!(comps.level(3)[0].average_connectivity, Some(Ratio::from_integer(3)));
    }

    #[test]
    fn averages_off_and_recompute() {
        let g = disjoint_union(&complete(5), &cycle(4));
        let off = HeuristicConfig { average: CachePolicy::Off, ..HeuristicConfig::default() };
        let comps = k_components_heuristic(&g, &off).unwrap();
        assert!(comps.iter().all(|c| c.average_connectivity.is_none()));
        assert_eq!(comps.level(1).len(), 2);
        let re = HeuristicConfig { average: CachePolicy::Recompute, ..HeuristicConfig::default() };
        let comps = k_components_heuristic(&g, &re).unwrap();
        assert_eq!(comps.level(3)[0].average_connectivity, Some(Ratio::from_integer(4)));
    }

    #[test]
    fn auxiliary_graph_of_cycle() {
        let g = cycle(6);
        let h = build_auxiliary_graph(&g, 2, Estimator::Exact, &PairConnectivityCache::new(CachePolicy::Off));
        assert_eq!(h.absent_pair_count(), 0);
        let cache = PairConnectivityCache::new(CachePolicy::Store);
        let h = build_auxiliary_graph(&g, 3, Estimator::Exact, &cache);
        assert_eq!(h.edge_count(), 0);
        assert_eq!(cache.len(), 15);
    }

    #[test]
    fn bad_threshold_is_rejected() {
        let cfg = HeuristicConfig { relaxation: Relaxation::Density(1.5), ..HeuristicConfig::default() };
        assert!(matches!(k_components_heuristic(&complete(3), &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn expired_deadline_times_out() {
        let d = Deadline::after(std::time::Duration::ZERO);
        let r = k_components_heuristic_until(&petersen(), &HeuristicConfig::default(), &d);
        assert!(matches!(r, Err(Error::TimedOut)));
    }
}
