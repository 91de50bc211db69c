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

//! Nesting of components across levels and the per-node k-number summary.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::components::{KComponent, KComponents};
use crate::decomposition::connected_components;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphView, NodeIndex};
use crate::Ratio;

/// Components arranged as a forest: each component points at the component
/// containing it on the nearest lower level.
#[derive(Clone, Debug)]
pub struct CohesiveBlockTree {
    pub components: Vec<KComponent>,
    /// `parent[i]` is the position in `components` of the parent of
    /// `components[i]`.
    pub parent: Vec<Option<usize>>,
    /// Containment violations (a component with no container one level
    /// down). Only the heuristic can produce them.
    pub warnings: Vec<String>,
}

impl CohesiveBlockTree {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.parent[j] == Some(i)).collect()
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.parent[j].is_none()).collect()
    }

    pub fn depth(&self, mut i: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent[i] {
            d += 1;
            i = p;
        }
        d
    }
}

pub fn build_block_tree(comps: &KComponents) -> CohesiveBlockTree {
    let components: Vec<KComponent> = comps.iter().cloned().collect();
    // level -> node -> positions of components containing it
    let mut by_level: HashMap<usize, HashMap<NodeIndex, Vec<usize>>> = HashMap::new();
    for (i, c) in components.iter().enumerate() {
        let m = by_level.entry(c.k).or_default();
        for &u in &c.nodes {
            m.entry(u).or_default().push(i);
        }
    }
    let levels: Vec<usize> = comps.levels().keys().copied().collect();
    let mut parent = vec![None; components.len()];
    let mut warnings = Vec::new();
    for (i, c) in components.iter().enumerate() {
        let lower = levels.iter().rev().filter(|&&j| j < c.k);
        let mut found = None;
        for &j in lower {
            let Some(m) = by_level.get(&j) else { continue };
            let Some(cands) = m.get(&c.nodes[0]) else { continue };
            if let Some(&p) = cands.iter().find(|&&p| c.is_subset_of(&components[p])) {
                found = Some((j, p));
                break;
            }
        }
        match found {
            Some((j, p)) => {
                if j + 1 != c.k && levels.contains(&(c.k - 1)) {
                    warnings.push(format!(
                        "component {} (k={}) is not contained in any k={} component; attached to component {} (k={j})",
                        c.id,
                        c.k,
                        c.k - 1,
                        components[p].id
                    ));
                }
                parent[i] = Some(p);
            }
            None if c.k > levels[0] => {
                warnings.push(format!("component {} (k={}) is not contained in any lower-level component", c.id, c.k));
            }
            None => {}
        }
    }
    CohesiveBlockTree { components, parent, warnings }
}

/// Deepest level reached by a node and the average connectivity there.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KNumber {
    pub k: usize,
    pub average: Option<Ratio>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KNumberMap {
    entries: Vec<KNumber>,
}

impl KNumberMap {
    pub fn from_entries(entries: Vec<KNumber>) -> Self {
        KNumberMap { entries }
    }

    /// `node,k,avg_k`; `avg_k` is an exact fraction such as `17/5`, empty
    /// when averages were not computed.
    pub fn write_csv<W: Write>(&self, g: &Graph, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["node", "k", "avg_k"])?;
        for (u, e) in self.entries.iter().enumerate() {
            let avg = e.average.map_or_else(String::new, |a| a.to_string());
            out.write_record([g.label(u).to_string(), e.k.to_string(), avg])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the format of [`KNumberMap::write_csv`]; every node of `g`
    /// must appear.
    pub fn read_csv<R: Read>(g: &Graph, r: R) -> Result<Self> {
        let mut entries: Vec<Option<KNumber>> = vec![None; g.node_count()];
        let mut rdr = csv::Reader::from_reader(r);
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec?;
            let bad = |message: String| Error::Input { line, message };
            if rec.len() != 3 {
                return Err(bad(format!("expected 3 fields, found {}", rec.len())));
            }
            let u = g.index_of(&rec[0]).ok_or_else(|| Error::UnknownNode(rec[0].to_string()))?;
            let k = rec[1].parse().map_err(|_| bad(format!("bad k `{}`", &rec[1])))?;
            let average = if rec[2].is_empty() {
                None
            } else {
                Some(rec[2].parse::<Ratio>().map_err(|_| bad(format!("bad average `{}`", &rec[2])))?)
            };
            entries[u] = Some(KNumber { k, average });
        }
        let entries = entries
            .into_iter()
            .enumerate()
            .map(|(u, e)| e.ok_or_else(|| Error::UnknownNode(format!("{} (missing from k-number table)", g.label(u)))))
            .collect::<Result<Vec<_>>>()?;
        Ok(KNumberMap { entries })
    }

    pub fn get(&self, u: NodeIndex) -> KNumber {
        self.entries[u]
    }

    pub fn entries(&self) -> &[KNumber] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Nodes outside every component get k = 1 (average 1) when they have a
/// neighbour and k = 0 otherwise. When several deepest components share a
/// node, the largest average wins.
pub fn k_number_map(g: &Graph, comps: &KComponents) -> KNumberMap {
    let mut entries = vec![KNumber { k: 0, average: Some(Ratio::from_integer(0)) }; g.node_count()];
    for comp in connected_components(g) {
        if comp.len() >= 2 {
            for u in comp {
                entries[u] = KNumber { k: 1, average: Some(Ratio::from_integer(1)) };
            }
        }
    }
    let mut covered = vec![false; g.node_count()];
    for c in comps.iter() {
        for &u in &c.nodes {
            let e = &mut entries[u];
            if !covered[u] || c.k > e.k {
                *e = KNumber { k: c.k, average: c.average_connectivity };
                covered[u] = true;
            } else if c.k == e.k && c.average_connectivity > e.average {
                e.average = c.average_connectivity;
            }
        }
    }
    KNumberMap { entries }
}
