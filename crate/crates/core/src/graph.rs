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

//! Undirected simple graphs over dense node indices with an external label map.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Ratio;

/// Dense node index. Algorithms work on these; labels live in [`Graph`].
pub type NodeIndex = usize;

/// Read-only adjacency interface shared by [`Graph`] and
/// [`ComplementView`](crate::complement::ComplementView).
///
/// Neighbours are always yielded in ascending index order, which is what
/// makes the traversal-based algorithms reproducible.
pub trait GraphView {
    type Neighbors<'a>: Iterator<Item = NodeIndex>
    where
        Self: 'a;

    fn node_count(&self) -> usize;

    fn neighbors(&self, u: NodeIndex) -> Self::Neighbors<'_>;

    fn degree(&self, u: NodeIndex) -> usize;

    fn has_edge(&self, u: NodeIndex, v: NodeIndex) -> bool;

    /// Subgraph induced by `nodes`; local index `i` corresponds to `nodes[i]`.
    fn induced(&self, nodes: &[NodeIndex]) -> Self
    where
        Self: Sized;

    fn edge_count(&self) -> usize {
        (0..self.node_count()).map(|u| self.degree(u)).sum::<usize>() / 2
    }

    fn min_degree(&self) -> Option<usize> {
        (0..self.node_count()).map(|u| self.degree(u)).min()
    }

    fn max_degree(&self) -> Option<usize> {
        (0..self.node_count()).map(|u| self.degree(u)).max()
    }
}

/// Side of a two-mode network. In the two-column input format the left
/// column is part `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Part {
    A,
    B,
}

impl Part {
    pub fn other(self) -> Part {
        match self {
            Part::A => Part::B,
            Part::B => Part::A,
        }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::A => "A",
            Part::B => "B",
        })
    }
}

impl std::str::FromStr for Part {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" | "left" => Ok(Part::A),
            "B" | "b" | "right" => Ok(Part::B),
            other => Err(Error::Config(format!("unknown part `{other}`, expected A or B"))),
        }
    }
}

/// Undirected simple graph. Immutable once built.
#[derive(Clone, Debug)]
pub struct Graph {
    labels: Vec<Arc<str>>,
    index: HashMap<Arc<str>, NodeIndex>,
    adj: Vec<Vec<NodeIndex>>,
    parts: Option<Vec<Part>>,
    edges: usize,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.adj == other.adj && self.parts == other.parts
    }
}

impl Eq for Graph {}

impl GraphView for Graph {
    type Neighbors<'a> = std::iter::Copied<std::slice::Iter<'a, NodeIndex>>;

    fn node_count(&self) -> usize {
        self.adj.len()
    }

    fn neighbors(&self, u: NodeIndex) -> Self::Neighbors<'_> {
        self.adj[u].iter().copied()
    }

    fn degree(&self, u: NodeIndex) -> usize {
        self.adj[u].len()
    }

    fn has_edge(&self, u: NodeIndex, v: NodeIndex) -> bool {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() { (u, v) } else { (v, u) };
        self.adj[a].binary_search(&b).is_ok()
    }

    fn induced(&self, nodes: &[NodeIndex]) -> Self {
        let local = local_positions(self.node_count(), nodes);
        let monotone = nodes.windows(2).all(|w| w[0] < w[1]);
        let mut edges = 0;
        let adj: Vec<Vec<NodeIndex>> = nodes
            .iter()
            .map(|&u| {
                let mut row: Vec<NodeIndex> = self.adj[u]
                    .iter()
                    .filter_map(|&v| match local[v] {
                        usize::MAX => None,
                        i => Some(i),
                    })
                    .collect();
                if !monotone {
                    row.sort_unstable();
                }
                edges += row.len();
                row
            })
            .collect();
        let labels: Vec<Arc<str>> = nodes.iter().map(|&u| self.labels[u].clone()).collect();
        let index = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        Graph {
            labels,
            index,
            adj,
            parts: self.parts.as_ref().map(|p| nodes.iter().map(|&u| p[u]).collect()),
            edges: edges / 2,
        }
    }

    fn edge_count(&self) -> usize {
        self.edges
    }
}

/// Position of each parent node inside `nodes`, `usize::MAX` when absent.
pub(crate) fn local_positions(n: usize, nodes: &[NodeIndex]) -> Vec<usize> {
    let mut local = vec![usize::MAX; n];
    for (i, &u) in nodes.iter().enumerate() {
        local[u] = i;
    }
    local
}

/// Incremental builder collapsing duplicate edges.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<Arc<str>>,
    index: HashMap<Arc<str>, NodeIndex>,
    adj: Vec<Vec<NodeIndex>>,
    parts: Option<Vec<Part>>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder whose nodes carry a bipartite part.
    pub fn bipartite() -> Self {
        GraphBuilder { parts: Some(Vec::new()), ..Self::default() }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Index of `label`, inserting it if unseen.
    pub fn add_node(&mut self, label: &str) -> NodeIndex {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        let label: Arc<str> = Arc::from(label);
        self.labels.push(label.clone());
        self.index.insert(label, i);
        self.adj.push(Vec::new());
        if let Some(parts) = self.parts.as_mut() {
            parts.push(Part::A);
        }
        i
    }

    /// Inserts a labelled node of a bipartite builder, failing if the label
    /// was already seen on the other side.
    pub fn add_part_node(&mut self, label: &str, part: Part) -> Result<NodeIndex, String> {
        let known = self.index.contains_key(label);
        let i = self.add_node(label);
        let parts = self.parts.as_mut().ok_or("builder is not bipartite")?;
        if known && parts[i] != part {
            return Err(format!("label `{label}` appears in both columns"));
        }
        parts[i] = part;
        Ok(i)
    }

    /// Adds `u -- v`. Self-loops are ignored; callers decide whether they are errors.
    pub fn add_edge(&mut self, u: NodeIndex, v: NodeIndex) {
        if u != v {
            self.adj[u].push(v);
            self.adj[v].push(u);
        }
    }

    pub fn build(mut self) -> Graph {
        let mut twice = 0;
        for row in &mut self.adj {
            row.sort_unstable();
            row.dedup();
            twice += row.len();
        }
        Graph { labels: self.labels, index: self.index, adj: self.adj, parts: self.parts, edges: twice / 2 }
    }
}

/// Options for reading the whitespace-separated edge-list format.
#[derive(Clone, Copy, Debug)]
pub struct ParseOptions {
    /// Column position defines the part (left = A).
    pub bipartite: bool,
    /// Reject self-loops instead of dropping them.
    pub strict: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { bipartite: false, strict: true }
    }
}

/// Builds a simple graph from labelled pairs. Duplicate edges collapse.
/// With `strict`, a self-loop is an input error naming its (1-based) position.
pub fn build_graph<S: AsRef<str>>(edges: &[(S, S)], strict: bool) -> Result<Graph> {
    let mut builder = GraphBuilder::new();
    for (pos, (a, b)) in edges.iter().enumerate() {
        let (a, b) = (a.as_ref(), b.as_ref());
        if a.is_empty() || b.is_empty() {
            return Err(Error::Input { line: pos + 1, message: "empty node label".into() });
        }
        if a == b {
            if strict {
                return Err(Error::Input { line: pos + 1, message: format!("self-loop on `{a}`") });
            }
            builder.add_node(a);
            continue;
        }
        let u = builder.add_node(a);
        let v = builder.add_node(b);
        builder.add_edge(u, v);
    }
    Ok(builder.build())
}

/// Parses the edge-list text format: one edge per line, two whitespace
/// separated tokens, `#` starts a comment line, blank lines are skipped.
pub fn parse_edge_list<R: BufRead>(reader: R, opts: ParseOptions) -> Result<Graph> {
    let mut builder = if opts.bipartite { GraphBuilder::bipartite() } else { GraphBuilder::new() };
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Input {
                    line: lineno,
                    message: format!("expected two whitespace-separated tokens, got `{trimmed}`"),
                })
            }
        };
        if a == b {
            if opts.strict || opts.bipartite {
                return Err(Error::Input { line: lineno, message: format!("self-loop on `{a}`") });
            }
            builder.add_node(a);
            continue;
        }
        let (u, v) = if opts.bipartite {
            let u = builder
                .add_part_node(a, Part::A)
                .map_err(|message| Error::Input { line: lineno, message })?;
            let v = builder
                .add_part_node(b, Part::B)
                .map_err(|message| Error::Input { line: lineno, message })?;
            (u, v)
        } else {
            (builder.add_node(a), builder.add_node(b))
        };
        builder.add_edge(u, v);
    }
    Ok(builder.build())
}

pub fn read_edge_list(path: &Path, opts: ParseOptions) -> Result<Graph> {
    let file = std::fs::File::open(path)?;
    parse_edge_list(io::BufReader::new(file), opts)
}

impl Graph {
    /// Graph on nodes labelled `0..n` with the given index pairs.
    /// Self-loops and repeated pairs are dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Graph
    where
        I: IntoIterator<Item = (NodeIndex, NodeIndex)>,
    {
        let mut builder = GraphBuilder::new();
        for i in 0..n {
            builder.add_node(&i.to_string());
        }
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
            builder.add_edge(u, v);
        }
        builder.build()
    }

    /// Same as [`Graph::from_edges`] with explicit labels.
    pub fn from_labelled_edges<I>(labels: &[String], edges: I) -> Graph
    where
        I: IntoIterator<Item = (NodeIndex, NodeIndex)>,
    {
        let mut builder = GraphBuilder::new();
        for l in labels {
            builder.add_node(l);
        }
        assert_eq!(builder.node_count(), labels.len(), "labels must be unique");
        for (u, v) in edges {
            builder.add_edge(u, v);
        }
        builder.build()
    }

    /// Attaches a part assignment. Every edge must cross parts.
    pub fn with_parts(mut self, parts: Vec<Part>) -> Result<Graph> {
        if parts.len() != self.node_count() {
            return Err(Error::Domain("part vector length differs from node count".into()));
        }
        for (u, v) in self.edges() {
            if parts[u] == parts[v] {
                return Err(Error::NotBipartite(format!(
                    "edge {} -- {} joins two part-{} nodes",
                    self.labels[u], self.labels[v], parts[u]
                )));
            }
        }
        self.parts = Some(parts);
        Ok(self)
    }

    /// Infers a part assignment by breadth-first 2-colouring. The lowest
    /// index of every connected component is put in part A.
    pub fn infer_parts(self) -> Result<Graph> {
        let n = self.node_count();
        let mut color: Vec<Option<Part>> = vec![None; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(Part::A);
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].unwrap();
                for &v in &self.adj[u] {
                    match color[v] {
                        None => {
                            color[v] = Some(cu.other());
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => {
                            return Err(Error::NotBipartite(format!(
                                "odd cycle through {} -- {}",
                                self.labels[u], self.labels[v]
                            )))
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        let parts = color.into_iter().map(Option::unwrap).collect();
        self.with_parts(parts)
    }

    pub fn label(&self, u: NodeIndex) -> &str {
        &self.labels[u]
    }

    pub fn labels(&self) -> &[Arc<str>] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<NodeIndex> {
        self.index.get(label).copied()
    }

    pub fn neighbor_slice(&self, u: NodeIndex) -> &[NodeIndex] {
        &self.adj[u]
    }

    pub fn parts(&self) -> Option<&[Part]> {
        self.parts.as_deref()
    }

    pub fn is_bipartite(&self) -> bool {
        self.parts.is_some()
    }

    /// Edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeIndex, NodeIndex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    /// Subgraph induced by `nodes` (parent indices).
    pub fn induced_subgraph(&self, nodes: &[NodeIndex]) -> Graph {
        self.induced(nodes)
    }

    /// Explicit complement on the same labels.
    pub fn complement(&self) -> Graph {
        let n = self.node_count();
        let mut edges = 0;
        let adj: Vec<Vec<NodeIndex>> = (0..n)
            .map(|u| {
                let row = &self.adj[u];
                let mut j = 0;
                let mut out = Vec::with_capacity(n.saturating_sub(1 + row.len()));
                for v in 0..n {
                    if j < row.len() && row[j] == v {
                        j += 1;
                    } else if v != u {
                        out.push(v);
                    }
                }
                edges += out.len();
                out
            })
            .collect();
        Graph { labels: self.labels.clone(), index: self.index.clone(), adj, parts: None, edges: edges / 2 }
    }

    /// One-mode projection onto `side`: two nodes of that side are adjacent
    /// iff they share at least one neighbour. Multiplicity is discarded.
    pub fn one_mode_projection(&self, side: Part) -> Result<Graph> {
        let parts = self
            .parts
            .as_ref()
            .ok_or_else(|| Error::NotBipartite("projection needs a part assignment".into()))?;
        let keep: Vec<NodeIndex> = (0..self.node_count()).filter(|&u| parts[u] == side).collect();
        let local = local_positions(self.node_count(), &keep);
        let mut builder = GraphBuilder::new();
        for &u in &keep {
            builder.add_node(&self.labels[u]);
        }
        for (e, row) in self.adj.iter().enumerate() {
            if parts[e] == side {
                continue;
            }
            for (i, &a) in row.iter().enumerate() {
                for &b in &row[i + 1..] {
                    builder.add_edge(local[a], local[b]);
                }
            }
        }
        Ok(builder.build())
    }

    /// Writes the edge-list format. For bipartite graphs the part-A endpoint
    /// is written in the left column.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# nodes={} edges={}", self.node_count(), self.edge_count())?;
        for (u, v) in self.edges() {
            let (a, b) = match &self.parts {
                Some(p) if p[u] == Part::B => (v, u),
                _ => (u, v),
            };
            writeln!(w, "{}\t{}", self.labels[a], self.labels[b])?;
        }
        Ok(())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("labels are UTF-8")
    }
}

/// `2m / (n (n - 1))`, exact.
pub fn density<G: GraphView>(g: &G) -> Result<Ratio> {
    let n = g.node_count() as u64;
    if n < 2 {
        return Err(Error::Domain(format!("density needs at least 2 nodes, got {n}")));
    }
    Ok(Ratio::new(2 * g.edge_count() as u64, n * (n - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Graph> {
        parse_edge_list(text.as_bytes(), ParseOptions::default())
    }

    #[test]
    fn path_and_duplicates() {
        let g = build_graph(&[("a", "b"), ("b", "c")], true).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
        let g = build_graph(&[("a", "b"), ("a", "b"), ("b", "a")], true).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
    }

    #[test]
    fn self_loop_strictness() {
        let err = build_graph(&[("a", "b"), ("c", "c")], true).unwrap_err();
        assert!(matches!(err, Error::Input { line: 2, .. }), "{err}");
        let g = build_graph(&[("a", "b"), ("c", "c")], false).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 1));
    }

    #[test]
    fn parser_reports_line_numbers() {
        let g = parse("# comment\na b\n\nb\tc\n").unwrap();
        assert_eq!(g.edge_count(), 2);
        match parse("a b\nb c d\n").unwrap_err() {
            Error::Input { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
        match parse("a b\nx x\n").unwrap_err() {
            Error::Input { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn bipartite_columns() {
        let opts = ParseOptions { bipartite: true, strict: true };
        let g = parse_edge_list("u1 p1\nu2 p1\nu2 p2\n".as_bytes(), opts).unwrap();
        let parts = g.parts().unwrap();
        assert_eq!(parts[g.index_of("u2").unwrap()], Part::A);
        assert_eq!(parts[g.index_of("p2").unwrap()], Part::B);
        let err = parse_edge_list("u1 p1\np1 u2\n".as_bytes(), opts).unwrap_err();
        assert!(matches!(err, Error::Input { line: 2, .. }));
    }

    #[test]
    fn projection_examples() {
        // star K_{1,3}, centre in B
        let g = parse_edge_list("a c\nb c\nd c\n".as_bytes(), ParseOptions { bipartite: true, strict: true }).unwrap();
        let p = g.one_mode_projection(Part::A).unwrap();
        assert_eq!((p.node_count(), p.edge_count()), (3, 3));
        // two papers with the same two authors
        let g = parse_edge_list("x p\ny p\nx q\ny q\n".as_bytes(), ParseOptions { bipartite: true, strict: true })
            .unwrap();
        let p = g.one_mode_projection(Part::A).unwrap();
        assert_eq!((p.node_count(), p.edge_count()), (2, 1));
        assert!(matches!(
            Graph::from_edges(2, [(0, 1)]).one_mode_projection(Part::A),
            Err(Error::NotBipartite(_))
        ));
    }

    #[test]
    fn infer_parts_detects_odd_cycles() {
        let square = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).infer_parts().unwrap();
        assert_eq!(square.parts().unwrap(), &[Part::A, Part::B, Part::A, Part::B]);
        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]);
        assert!(matches!(tri.infer_parts(), Err(Error::NotBipartite(_))));
    }

    #[test]
    fn density_values() {
        let k5 = Graph::from_edges(5, (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))));
        assert_eq!(density(&k5).unwrap(), Ratio::from_integer(1));
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]);
        assert_eq!(density(&path).unwrap(), Ratio::new(2, 3));
        assert!(matches!(density(&Graph::from_edges(1, [])), Err(Error::Domain(_))));
    }

    #[test]
    fn induced_keeps_order_and_labels() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]);
        let sub = g.induced_subgraph(&[3, 2, 1]);
        assert_eq!(sub.label(0), "3");
        assert_eq!(sub.neighbor_slice(1), &[0, 2]);
        assert_eq!(sub.edge_count(), 2);
    }

    #[test]
    fn complement_is_involutive() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]);
        assert_eq!(g.complement().edge_count(), 10 - 3);
        assert_eq!(g.complement().complement(), g);
    }
}
