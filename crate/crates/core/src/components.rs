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

//! Detected k-components and the per-level collection returned by every
//! detector.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeIndex;
use crate::Ratio;

/// Which detector produced a component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Auxiliary-graph heuristic with the shortest-path estimator.
    #[serde(rename = "heuristic-approx", alias = "approx")]
    Approx,
    /// Auxiliary-graph heuristic with max-flow local connectivity.
    #[serde(rename = "heuristic-exact-flow", alias = "exact-flow")]
    ExactFlow,
    /// Recursive minimum cut-set splitting.
    MoodyWhite,
    /// Exhaustive subset enumeration (tiny graphs only).
    BruteForce,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Approx => "heuristic-approx",
            Method::ExactFlow => "heuristic-exact-flow",
            Method::MoodyWhite => "moody-white",
            Method::BruteForce => "brute-force",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "approx" | "heuristic-approx" => Ok(Method::Approx),
            "exact-flow" | "heuristic-exact-flow" => Ok(Method::ExactFlow),
            "moody-white" | "exact" => Ok(Method::MoodyWhite),
            "brute-force" => Ok(Method::BruteForce),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

/// A node set reported at connectivity level `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KComponent {
    pub id: usize,
    pub k: usize,
    /// Ascending node indices; always more than `k` of them.
    pub nodes: Vec<NodeIndex>,
    pub average_connectivity: Option<Ratio>,
    pub method: Method,
}

impl KComponent {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, u: NodeIndex) -> bool {
        self.nodes.binary_search(&u).is_ok()
    }

    pub fn is_subset_of(&self, other: &KComponent) -> bool {
        is_sorted_subset(&self.nodes, &other.nodes)
    }

    /// Number of nodes shared with `other`.
    pub fn overlap(&self, other: &KComponent) -> usize {
        sorted_intersection_len(&self.nodes, &other.nodes)
    }
}

pub(crate) fn is_sorted_subset(a: &[NodeIndex], b: &[NodeIndex]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

fn sorted_intersection_len(a: &[NodeIndex], b: &[NodeIndex]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Components grouped by level. Ids run from 0 in (level, node set) order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KComponents {
    levels: BTreeMap<usize, Vec<KComponent>>,
}

impl KComponents {
    /// Normalises raw detector output: node sets are sorted, identical sets
    /// on one level are merged (keeping the larger average), sets of `k` or
    /// fewer nodes are dropped, and ids are assigned.
    pub fn from_raw(method: Method, raw: BTreeMap<usize, Vec<(Vec<NodeIndex>, Option<Ratio>)>>) -> Self {
        let mut levels = BTreeMap::new();
        let mut next_id = 0;
        for (k, sets) in raw {
            let mut merged: BTreeMap<Vec<NodeIndex>, Option<Ratio>> = BTreeMap::new();
            for (mut nodes, avg) in sets {
                nodes.sort_unstable();
                nodes.dedup();
                if k == 0 || nodes.len() <= k {
                    continue;
                }
                let slot = merged.entry(nodes).or_insert(avg);
                if avg > *slot {
                    *slot = avg;
                }
            }
            if merged.is_empty() {
                continue;
            }
            let comps: Vec<KComponent> = merged
                .into_iter()
                .map(|(nodes, average_connectivity)| {
                    let c = KComponent { id: next_id, k, nodes, average_connectivity, method };
                    next_id += 1;
                    c
                })
                .collect();
            levels.insert(k, comps);
        }
        KComponents { levels }
    }

    pub fn levels(&self) -> &BTreeMap<usize, Vec<KComponent>> {
        &self.levels
    }

    pub fn level(&self, k: usize) -> &[KComponent] {
        self.levels.get(&k).map_or(&[], Vec::as_slice)
    }

    pub fn max_level(&self) -> usize {
        self.levels.keys().next_back().copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = &KComponent> {
        self.levels.values().flatten()
    }

    pub fn len(&self) -> usize {
        self.levels.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&KComponent> {
        self.iter().find(|c| c.id == id)
    }

    /// Level -> set of node sets; the shape used to compare detectors.
    pub fn node_sets(&self) -> BTreeMap<usize, BTreeSet<Vec<NodeIndex>>> {
        self.levels.iter().map(|(&k, comps)| (k, comps.iter().map(|c| c.nodes.clone()).collect())).collect()
    }

    /// Number of components per level.
    pub fn level_histogram(&self) -> BTreeMap<usize, usize> {
        self.levels.iter().map(|(&k, c)| (k, c.len())).collect()
    }

    /// Components mapped into a parent graph through `origin` (local index
    /// `i` is parent node `origin[i]`).
    pub fn remap(&self, origin: &[NodeIndex]) -> KComponents {
        let raw = self
            .levels
            .iter()
            .map(|(&k, comps)| {
                (k, comps.iter().map(|c| (c.nodes.iter().map(|&u| origin[u]).collect(), c.average_connectivity)).collect())
            })
            .collect();
        let method = self.iter().next().map_or(Method::MoodyWhite, |c| c.method);
        KComponents::from_raw(method, raw)
    }
}
