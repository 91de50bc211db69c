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

//! Seeded graph generators: small fixtures, the 99-node illustration graph,
//! random models and the bipartite configuration null model.
//!
//! All random generators draw from a ChaCha8 stream seeded with the given
//! 64-bit seed, so a (generator, parameters, seed) triple always produces
//! the same graph.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder, GraphView, NodeIndex, Part};

pub type Seed = u64;

pub(crate) fn rng(seed: Seed) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "a cycle needs at least 3 nodes");
    Graph::from_edges(n, (0..n).map(|u| (u, (u + 1) % n)))
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|u| (u - 1, u)))
}

/// `K_{1,leaves}` with the centre at index 0.
pub fn star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|u| (0, u)))
}

/// Outer 5-cycle `0..5`, inner pentagram `5..10`, spokes `i -- i+5`.
pub fn petersen() -> Graph {
    Graph::from_edges(10, petersen_edges(0))
}

fn petersen_edges(offset: usize) -> impl Iterator<Item = (NodeIndex, NodeIndex)> {
    (0..5).flat_map(move |i| {
        [
            (offset + i, offset + (i + 1) % 5),
            (offset + 5 + i, offset + 5 + (i + 2) % 5),
            (offset + i, offset + 5 + i),
        ]
    })
}

/// `rows x cols` lattice, node `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> Graph {
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let u = r * cols + c;
            if c + 1 < cols {
                edges.push((u, u + 1));
            }
            if r + 1 < rows {
                edges.push((u, u + cols));
            }
        }
    }
    Graph::from_edges(rows * cols, edges)
}

/// Two cliques of `clique` nodes joined by a path through `bridge` extra nodes.
pub fn barbell(clique: usize, bridge: usize) -> Graph {
    let mut edges: Vec<(NodeIndex, NodeIndex)> = Vec::new();
    let second = clique + bridge;
    for u in 0..clique {
        for v in u + 1..clique {
            edges.push((u, v));
            edges.push((second + u, second + v));
        }
    }
    let chain: Vec<NodeIndex> = std::iter::once(clique - 1).chain(clique..second).chain([second]).collect();
    edges.extend(chain.windows(2).map(|w| (w[0], w[1])));
    Graph::from_edges(2 * clique + bridge, edges)
}

/// The 99-node, 200-edge illustration graph.
///
/// A 5x5 grid (`g<r>_<c>`) has a Petersen graph (`p<q>_<i>`) hanging off
/// each corner: one edge from the corner and one from its row neighbour.
/// Each Petersen graph is joined by three disjoint edges to an inner `K5`
/// (`k<q>_<i>`), and an outer `K5` overlaps the inner one. For corners 0 and
/// 2 the overlap is one node and the outer `K5` has one extra edge into the
/// Petersen graph; for corners 1 and 3 the overlap is two nodes. Outer-only
/// nodes are `o<q>_<j>`.
///
/// The result is biconnected, a 3-core with maximum core number 4, and has
/// node connectivity 2 (grid), 3 (Petersen plus inner `K5`) and 4 (each `K5`).
pub fn appendix_a_fixture() -> Graph {
    let mut b = GraphBuilder::new();
    let edge = |b: &mut GraphBuilder, x: String, y: String| {
        let u = b.add_node(&x);
        let v = b.add_node(&y);
        b.add_edge(u, v);
    };
    let g = |r: usize, c: usize| format!("g{r}_{c}");
    for r in 0..5 {
        for c in 0..5 {
            if c + 1 < 5 {
                edge(&mut b, g(r, c), g(r, c + 1));
            }
            if r + 1 < 5 {
                edge(&mut b, g(r, c), g(r + 1, c));
            }
        }
    }
    let corners = [((0, 0), (0, 1)), ((0, 4), (0, 3)), ((4, 4), (4, 3)), ((4, 0), (4, 1))];
    for (q, &(corner, next)) in corners.iter().enumerate() {
        let p = |i: usize| format!("p{q}_{i}");
        let k = |i: usize| format!("k{q}_{i}");
        let o = |j: usize| format!("o{q}_{j}");
        for (x, y) in petersen_edges(0) {
            edge(&mut b, p(x), p(y));
        }
        edge(&mut b, g(corner.0, corner.1), p(0));
        edge(&mut b, g(next.0, next.1), p(2));
        for x in 0..5 {
            for y in x + 1..5 {
                edge(&mut b, k(x), k(y));
            }
        }
        // Which Petersen nodes carry these links decides how many pairs the
        // shortest-path estimator undercounts: with 5, 6, 7 the two-overlap
        // clusters lose four auxiliary edges, the illustration's numbers.
        for (pi, ki) in [(5, 0), (6, 1), (7, 2)] {
            edge(&mut b, p(pi), k(ki));
        }
        let one_node_overlap = q % 2 == 0;
        let outer: Vec<String> = if one_node_overlap {
            std::iter::once(k(4)).chain((0..4).map(o)).collect()
        } else {
            [k(3), k(4)].into_iter().chain((0..3).map(o)).collect()
        };
        for x in 0..5 {
            for y in x + 1..5 {
                edge(&mut b, outer[x].clone(), outer[y].clone());
            }
        }
        if one_node_overlap {
            edge(&mut b, o(0), p(3));
        }
    }
    b.build()
}

/// `G(n, p)` with `p = avg_degree / (n - 1)`.
pub fn erdos_renyi(n: usize, avg_degree: f64, seed: Seed) -> Result<Graph> {
    if n < 2 {
        return Err(Error::Domain(format!("erdos_renyi needs n >= 2, got {n}")));
    }
    if !(avg_degree > 0.0 && avg_degree < (n - 1) as f64) {
        return Err(Error::Domain(format!("average degree must lie in (0, {}), got {avg_degree}", n - 1)));
    }
    let p = avg_degree / (n - 1) as f64;
    let mut rng = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_edges(n, edges))
}

/// Degree sequence drawn from `P(d) ∝ d^-alpha` on `[1, n - 1]` by inverse
/// CDF. An odd total is fixed by raising the first degree below `n - 1`.
pub fn powerlaw_degree_sequence(n: usize, alpha: f64, seed: Seed) -> Result<Vec<usize>> {
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("power-law exponent must exceed 1, got {alpha}")));
    }
    if n < 2 {
        return Err(Error::Domain(format!("power-law graph needs n >= 2, got {n}")));
    }
    let mut cdf = Vec::with_capacity(n - 1);
    let mut acc = 0.0;
    for d in 1..n {
        acc += (d as f64).powf(-alpha);
        cdf.push(acc);
    }
    let mut rng = rng(seed);
    let mut degrees: Vec<usize> = (0..n)
        .map(|_| {
            let x = rng.random::<f64>() * acc;
            1 + cdf.partition_point(|&c| c <= x).min(n - 2)
        })
        .collect();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        match degrees.iter_mut().find(|d| **d < n - 1) {
            Some(d) => *d += 1,
            None => degrees[0] -= 1,
        }
    }
    Ok(degrees)
}

/// Configuration model: uniform stub matching of `degrees`, returned as the
/// list of stub pairs (self-loops and repeats included).
pub fn stub_matching(degrees: &[usize], seed: Seed) -> Vec<(NodeIndex, NodeIndex)> {
    let mut stubs: Vec<NodeIndex> = degrees.iter().enumerate().flat_map(|(u, &d)| std::iter::repeat_n(u, d)).collect();
    stubs.shuffle(&mut rng(seed));
    stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// Power-law configuration graph: stub-matched, then self-loops and
/// multi-edges removed.
pub fn powerlaw_configuration(n: usize, alpha: f64, seed: Seed) -> Result<Graph> {
    let degrees = powerlaw_degree_sequence(n, alpha, seed)?;
    let pairs = stub_matching(&degrees, seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    Ok(Graph::from_edges(n, pairs.into_iter().filter(|&(u, v)| u != v)))
}

/// Random two-mode graph: every (A, B) pair is linked with probability `p`.
/// Labels are `a<i>` and `b<j>`; nodes without edges are dropped.
pub fn random_bipartite(a: usize, b: usize, p: f64, seed: Seed) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("edge probability must lie in [0, 1], got {p}")));
    }
    let mut rng = rng(seed);
    let mut edges = Vec::new();
    for i in 0..a {
        for j in 0..b {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    let mut builder = GraphBuilder::bipartite();
    for (i, j) in edges {
        let u = builder.add_part_node(&format!("a{i}"), Part::A).expect("distinct label spaces");
        let v = builder.add_part_node(&format!("b{j}"), Part::B).expect("distinct label spaces");
        builder.add_edge(u, v);
    }
    Ok(builder.build())
}

/// One replicate of the bipartite configuration null model.
#[derive(Clone, Debug)]
pub struct NullReplicate {
    /// Cleaned simple graph on the input's labels and parts.
    pub graph: Graph,
    /// Degree of every node in the stub-matched multigraph (before
    /// multi-edges are collapsed); equals the input degrees.
    pub stub_degrees: Vec<usize>,
    pub stub_edges: usize,
    /// Parallel edges dropped by the cleanup.
    pub removed_edges: usize,
}

impl NullReplicate {
    pub fn removed_fraction(&self) -> f64 {
        if self.stub_edges == 0 {
            0.0
        } else {
            self.removed_edges as f64 / self.stub_edges as f64
        }
    }
}

/// Randomly re-assigns the B-side stubs of `g` to its A-side stubs, keeping
/// both degree sequences, then collapses parallel edges.
pub fn bipartite_configuration_null(g: &Graph, seed: Seed) -> Result<NullReplicate> {
    let parts = g
        .parts()
        .ok_or_else(|| Error::NotBipartite("null model needs a part assignment".into()))?;
    let n = g.node_count();
    let stubs_of = |side: Part| -> Vec<NodeIndex> {
        (0..n).filter(|&u| parts[u] == side).flat_map(|u| std::iter::repeat_n(u, g.degree(u))).collect()
    };
    let a_stubs = stubs_of(Part::A);
    let mut b_stubs = stubs_of(Part::B);
    b_stubs.shuffle(&mut rng(seed));
    let mut stub_degrees = vec![0; n];
    let mut builder = GraphBuilder::bipartite();
    for u in 0..n {
        builder.add_part_node(g.label(u), parts[u]).expect("labels of a valid graph");
    }
    for (&u, &v) in a_stubs.iter().zip(&b_stubs) {
        stub_degrees[u] += 1;
        stub_degrees[v] += 1;
        builder.add_edge(u, v);
    }
    let graph = builder.build();
    let stub_edges = a_stubs.len();
    Ok(NullReplicate { removed_edges: stub_edges - graph.edge_count(), graph, stub_degrees, stub_edges })
}
