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

//! Independent oracles and the shared graph matrix for integration tests.
#![allow(dead_code)]

use kcohesion::generators::{
    appendix_a_fixture, barbell, complete, cycle, erdos_renyi, grid, path, petersen, powerlaw_configuration,
    random_bipartite, star,
};
use kcohesion::{Graph, GraphView};

/// Whether `u` reaches `v` in `g` without passing through nodes in `removed`
/// (a bitmask) and, when `skip_edge`, without the direct edge.
fn reaches(g: &Graph, u: usize, v: usize, removed: u64, skip_edge: bool) -> bool {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut stack = vec![u];
    seen[u] = true;
    while let Some(x) = stack.pop() {
        for y in g.neighbors(x) {
            if seen[y] || removed >> y & 1 == 1 || (skip_edge && x == u && y == v) {
                continue;
            }
            if y == v {
                return true;
            }
            seen[y] = true;
            stack.push(y);
        }
    }
    false
}

/// `κ(u, v)` by Menger: the smallest node set separating `u` from `v`,
/// plus one for a direct edge. Exponential; n ≤ 16.
pub fn brute_local_kappa(g: &Graph, u: usize, v: usize) -> usize {
    let n = g.node_count();
    assert!(n <= 16);
    let adjacent = g.has_edge(u, v);
    let others: Vec<usize> = (0..n).filter(|&w| w != u && w != v).collect();
    let mut best = others.len();
    for mask in 0u64..(1 << others.len()) {
        let size = mask.count_ones() as usize;
        if size >= best {
            continue;
        }
        let removed = others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(0u64, |m, (_, &w)| m | 1 << w);
        if !reaches(g, u, v, removed, adjacent) {
            best = size;
        }
    }
    best + usize::from(adjacent)
}

/// Every node subset of size `size` whose removal disconnects `g`.
pub fn brute_cuts(g: &Graph, size: usize) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut out = Vec::new();
    for mask in 0u64..(1 << n) {
        if mask.count_ones() as usize != size {
            continue;
        }
        let rest: Vec<usize> = (0..n).filter(|&w| mask >> w & 1 == 0).collect();
        if rest.len() >= 2 && !kcohesion::decomposition::is_connected(&g.induced_subgraph(&rest)) {
            out.push((0..n).filter(|&w| mask >> w & 1 == 1).collect());
        }
    }
    out
}

/// Random graph with `n` nodes where each pair is an edge with probability
/// `p`, made connected by a random spanning path when `connect`.
pub fn random_graph(n: usize, p: f64, seed: u64, connect: bool) -> Graph {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    if connect {
        let mut order: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        edges.extend(order.windows(2).map(|w| (w[0], w[1])));
    }
    Graph::from_edges(n, edges)
}

/// The generator test matrix: fixed families plus seeded random models.
pub fn matrix() -> Vec<(String, Graph)> {
    let mut m: Vec<(String, Graph)> = Vec::new();
    for n in 2..=8 {
        m.push((format!("complete-{n}"), complete(n)));
    }
    for n in [3, 4, 5, 7, 10] {
        m.push((format!("cycle-{n}"), cycle(n)));
    }
    for n in [2, 3, 6] {
        m.push((format!("path-{n}"), path(n)));
    }
    m.push(("star-5".into(), star(5)));
    m.push(("petersen".into(), petersen()));
    m.push(("grid-3x3".into(), grid(3, 3)));
    m.push(("grid-3x4".into(), grid(3, 4)));
    m.push(("barbell-4-1".into(), barbell(4, 1)));
    m.push(("barbell-5-2".into(), barbell(5, 2)));
    m.push(("appendix-a".into(), appendix_a_fixture()));
    for seed in 0..4 {
        m.push((format!("er-10-s{seed}"), erdos_renyi(10, 4.0, seed).unwrap()));
        m.push((format!("er-12-s{seed}"), erdos_renyi(12, 6.0, seed).unwrap()));
        m.push((format!("er-60-s{seed}"), erdos_renyi(60, 6.0, seed).unwrap()));
        m.push((format!("powerlaw-150-s{seed}"), powerlaw_configuration(150, 2.0, seed).unwrap()));
        m.push((format!("bipartite-8x8-s{seed}"), random_bipartite(8, 8, 0.3, seed).unwrap()));
    }
    m
}
