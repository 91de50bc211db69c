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

//! The empirical apparatus around the detectors: k-number frequencies
//! against configuration-model replicates, block-tree export and runtime
//! benchmarks.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Deadline;
use crate::components::{KComponents, Method};
use crate::connectivity::{CachePolicy, Estimator};
use crate::error::{Error, Result};
use crate::exact::{annotate_averages, k_components_bruteforce, k_components_exact_until};
use crate::generators::{self, bipartite_configuration_null, Seed};
use crate::graph::{Graph, GraphView, Part};
use crate::heuristic::{k_components_heuristic_until, HeuristicConfig};
use crate::hierarchy::{k_number_map, CohesiveBlockTree, KNumberMap};
use crate::Ratio;

/// Replicate count used when none is given.
pub const DEFAULT_REPLICATES: usize = 64;

/// Which detector to run and how.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub method: Method,
    /// Relaxation, averaging and rebuild settings for the heuristic; the
    /// averaging policy also decides whether exact methods report averages.
    pub heuristic: HeuristicConfig,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig { method: Method::Approx, heuristic: HeuristicConfig::default() }
    }
}

impl DetectorConfig {
    pub fn new(method: Method) -> Self {
        DetectorConfig { method, ..DetectorConfig::default() }
    }

    pub fn detect(&self, g: &Graph) -> Result<KComponents> {
        self.detect_until(g, &Deadline::none())
    }

    pub fn detect_until(&self, g: &Graph, deadline: &Deadline) -> Result<KComponents> {
        let averages = self.heuristic.average != CachePolicy::Off;
        match self.method {
            Method::Approx | Method::ExactFlow => {
                let estimator = if self.method == Method::Approx { Estimator::Approx } else { Estimator::Exact };
                k_components_heuristic_until(g, &HeuristicConfig { estimator, ..self.heuristic }, deadline)
            }
            Method::MoodyWhite => {
                let comps = k_components_exact_until(g, deadline)?;
                if averages {
                    annotate_averages(g, &comps, Estimator::Exact)
                } else {
                    Ok(comps)
                }
            }
            Method::BruteForce => {
                let comps = k_components_bruteforce(g)?;
                if averages {
                    annotate_averages(g, &comps, Estimator::Exact)
                } else {
                    Ok(comps)
                }
            }
        }
    }
}

/// Nodes per k-number, `k >= 1`.
pub fn knumber_histogram(knumbers: &KNumberMap) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for e in knumbers.entries() {
        if e.k >= 1 {
            *h.entry(e.k).or_insert(0) += 1;
        }
    }
    h
}

/// One null-model replicate.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicateSummary {
    pub index: usize,
    pub seed: Seed,
    /// Share of matched stub pairs dropped as parallel edges.
    pub removed_fraction: f64,
    /// Degrees of the stub-matched multigraph, before cleanup.
    pub stub_degrees: Vec<usize>,
    pub frequencies: BTreeMap<usize, usize>,
}

/// k-number frequencies of a graph and of its null replicates.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyTable {
    pub actual: BTreeMap<usize, usize>,
    pub replicates: Vec<ReplicateSummary>,
}

impl FrequencyTable {
    /// Every level seen in the actual graph or any replicate.
    pub fn levels(&self) -> Vec<usize> {
        let mut ks: Vec<usize> = self.actual.keys().copied().collect();
        for r in &self.replicates {
            ks.extend(r.frequencies.keys().copied());
        }
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    /// Mean and population standard deviation of the count at `k` over the
    /// replicates (absent levels count as 0). `None` without replicates.
    pub fn null_stats(&self, k: usize) -> Option<(f64, f64)> {
        if self.replicates.is_empty() {
            return None;
        }
        let xs: Vec<f64> = self.replicates.iter().map(|r| *r.frequencies.get(&k).unwrap_or(&0) as f64).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / xs.len() as f64;
        Some((mean, var.sqrt()))
    }

    /// Mean stub-matched degree of every node over the replicates.
    pub fn null_stub_degree_mean(&self) -> Vec<Ratio> {
        let r = self.replicates.len() as u64;
        let Some(first) = self.replicates.first() else { return Vec::new() };
        (0..first.stub_degrees.len())
            .map(|u| Ratio::new(self.replicates.iter().map(|s| s.stub_degrees[u] as u64).sum(), r))
            .collect()
    }

    /// `k,actual,null_mean,null_std`, or `k,actual` without replicates.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let with_null = !self.replicates.is_empty();
        if with_null {
            out.write_record(["k", "actual", "null_mean", "null_std"])?;
        } else {
            out.write_record(["k", "actual"])?;
        }
        for k in self.levels() {
            let actual = self.actual.get(&k).copied().unwrap_or(0).to_string();
            match self.null_stats(k) {
                Some((m, s)) => out.write_record([k.to_string(), actual, format!("{m:.6}"), format!("{s:.6}")])?,
                None => out.write_record([k.to_string(), actual])?,
            }
        }
        out.flush()?;
        Ok(())
    }

    /// `replicate,seed,removed_fraction` followed by the per-level counts.
    pub fn write_replicates_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let levels = self.levels();
        let mut header = vec!["replicate".to_string(), "seed".into(), "removed_fraction".into()];
        header.extend(levels.iter().map(|k| format!("k{k}")));
        out.write_record(&header)?;
        for r in &self.replicates {
            let mut row = vec![r.index.to_string(), r.seed.to_string(), format!("{:.6}", r.removed_fraction)];
            row.extend(levels.iter().map(|k| r.frequencies.get(k).copied().unwrap_or(0).to_string()));
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn analysed(g: &Graph, projection: Option<Part>) -> Result<Graph> {
    match projection {
        Some(side) => g.one_mode_projection(side),
        None => Ok(g.clone()),
    }
}

/// Replicate `index` alone: bipartite configuration null with seed
/// `seed + index`, optionally projected, then detected.
pub fn null_replicate(
    g: &Graph,
    index: usize,
    seed: Seed,
    detector: &DetectorConfig,
    projection: Option<Part>,
) -> Result<(ReplicateSummary, Graph, KComponents)> {
    let wrap = |e: Error| Error::Replicate { index, source: Box::new(e) };
    let rep_seed = seed.wrapping_add(index as u64);
    let null = bipartite_configuration_null(g, rep_seed).map_err(wrap)?;
    let h = analysed(&null.graph, projection).map_err(wrap)?;
    let comps = detector.detect(&h).map_err(wrap)?;
    let summary = ReplicateSummary {
        index,
        seed: rep_seed,
        removed_fraction: null.removed_fraction(),
        frequencies: knumber_histogram(&k_number_map(&h, &comps)),
        stub_degrees: null.stub_degrees,
    };
    Ok((summary, h, comps))
}

/// k-number frequencies of `g` (or its projection) against `replicates`
/// bipartite configuration-model replicates. Replicates run in parallel;
/// the result does not depend on the thread count.
pub fn knumber_frequencies(
    g: &Graph,
    replicates: usize,
    seed: Seed,
    detector: &DetectorConfig,
    projection: Option<Part>,
) -> Result<FrequencyTable> {
    if !g.is_bipartite() {
        return Err(Error::NotBipartite("the null model needs a two-mode graph".into()));
    }
    let h = analysed(g, projection)?;
    let actual = knumber_histogram(&k_number_map(&h, &detector.detect(&h)?));
    let replicates = (0..replicates)
        .into_par_iter()
        .map(|i| null_replicate(g, i, seed, detector, projection).map(|r| r.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrequencyTable { actual, replicates })
}

/// Block-tree serialisation formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeFormat {
    Dot,
    Json,
}

impl FromStr for TreeFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(TreeFormat::Dot),
            "json" => Ok(TreeFormat::Json),
            other => Err(Error::Config(format!("unknown tree format `{other}`"))),
        }
    }
}

/// Minimum component order per level; components below it are hidden and
/// their children re-attached to the nearest shown ancestor.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeFilters {
    pub min_order: BTreeMap<usize, usize>,
}

impl TreeFilters {
    pub fn none() -> Self {
        TreeFilters::default()
    }

    /// 1-components below 20 nodes, 2-components below 15 and
    /// 3-components below 10 are hidden.
    pub fn presentation() -> Self {
        TreeFilters { min_order: BTreeMap::from([(1, 20), (2, 15), (3, 10)]) }
    }

    fn keeps(&self, node: &TreeNode) -> bool {
        self.min_order.get(&node.k).is_none_or(|&m| node.order >= m)
    }
}

/// One component as written to `components.json` and tree exports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: usize,
    pub k: usize,
    pub order: usize,
    pub avg_connectivity: Option<f64>,
    pub parent: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<String>>,
}

/// Serialised detection result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentsFile {
    pub method: Method,
    pub components: Vec<TreeNode>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

fn ratio_to_f64(r: Ratio) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl ComponentsFile {
    pub fn from_tree(g: &Graph, tree: &CohesiveBlockTree, method: Method, with_members: bool) -> Self {
        let components = tree
            .components
            .iter()
            .zip(&tree.parent)
            .map(|(c, p)| TreeNode {
                id: c.id,
                k: c.k,
                order: c.order(),
                avg_connectivity: c.average_connectivity.map(ratio_to_f64),
                parent: p.map(|i| tree.components[i].id),
                nodes: with_members.then(|| c.nodes.iter().map(|&u| g.label(u).to_string()).collect()),
            })
            .collect();
        ComponentsFile { method, components, warnings: tree.warnings.clone() }
    }

    /// Components back in terms of `g`'s node indices. Needs member lists.
    pub fn to_components(&self, g: &Graph) -> Result<KComponents> {
        let mut raw: BTreeMap<usize, Vec<(Vec<usize>, Option<Ratio>)>> = BTreeMap::new();
        for c in &self.components {
            let members = c
                .nodes
                .as_ref()
                .ok_or_else(|| Error::Config(format!("component {} has no member list", c.id)))?;
            let nodes = members
                .iter()
                .map(|l| g.index_of(l).ok_or_else(|| Error::UnknownNode(l.clone())))
                .collect::<Result<Vec<_>>>()?;
            raw.entry(c.k).or_default().push((nodes, None));
        }
        Ok(KComponents::from_raw(self.method, raw))
    }

    /// Drops hidden components, re-parenting their descendants.
    pub fn filtered(&self, filters: &TreeFilters) -> ComponentsFile {
        let by_id: BTreeMap<usize, &TreeNode> = self.components.iter().map(|c| (c.id, c)).collect();
        let components = self
            .components
            .iter()
            .filter(|c| filters.keeps(c))
            .map(|c| {
                let mut parent = c.parent;
                while let Some(p) = parent.and_then(|p| by_id.get(&p)) {
                    if filters.keeps(p) {
                        break;
                    }
                    parent = p.parent;
                }
                TreeNode { parent, ..c.clone() }
            })
            .collect();
        ComponentsFile { method: self.method, components, warnings: self.warnings.clone() }
    }

    pub fn without_members(&self) -> ComponentsFile {
        let components = self.components.iter().map(|c| TreeNode { nodes: None, ..c.clone() }).collect();
        ComponentsFile { components, ..self.clone() }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph blocks {\n    node [shape=box];\n");
        for c in &self.components {
            let avg = c.avg_connectivity.map_or_else(|| "-".to_string(), |a| format!("{a:.3}"));
            let _ = writeln!(s, "    c{} [label=\"k={} n={} avg={}\"];", c.id, c.k, c.order, avg);
        }
        for c in &self.components {
            if let Some(p) = c.parent {
                let _ = writeln!(s, "    c{p} -> c{};", c.id);
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Serialised block tree, filtered and with member lists on request.
pub fn export_block_tree(
    g: &Graph,
    tree: &CohesiveBlockTree,
    method: Method,
    format: TreeFormat,
    filters: &TreeFilters,
    with_members: bool,
) -> Result<String> {
    let file = ComponentsFile::from_tree(g, tree, method, with_members).filtered(filters);
    match format {
        TreeFormat::Dot => Ok(file.to_dot()),
        TreeFormat::Json => file.to_json(),
    }
}

/// Named random or fixed graph family with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    ErdosRenyi { n: usize, avg_degree: f64, seed: Seed },
    Powerlaw { n: usize, #[serde(default = "default_alpha")] alpha: f64, seed: Seed },
    Complete { n: usize },
    AppendixA,
}

fn default_alpha() -> f64 {
    2.0
}

impl GeneratorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorSpec::ErdosRenyi { .. } => "erdos-renyi",
            GeneratorSpec::Powerlaw { .. } => "powerlaw",
            GeneratorSpec::Complete { .. } => "complete",
            GeneratorSpec::AppendixA => "appendix-a",
        }
    }

    pub fn build(&self) -> Result<Graph> {
        match *self {
            GeneratorSpec::ErdosRenyi { n, avg_degree, seed } => generators::erdos_renyi(n, avg_degree, seed),
            GeneratorSpec::Powerlaw { n, alpha, seed } => generators::powerlaw_configuration(n, alpha, seed),
            GeneratorSpec::Complete { n } => Ok(generators::complete(n)),
            GeneratorSpec::AppendixA => Ok(generators::appendix_a_fixture()),
        }
    }
}

/// A benchmark plan: every cell's graph is run with every listed method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchPlan {
    /// Per-run wall-clock limit.
    pub budget_seconds: f64,
    #[serde(default = "one")]
    pub repeats: usize,
    #[serde(default, rename = "cell")]
    pub cells: Vec<BenchCell>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    #[serde(flatten)]
    pub graph: GeneratorSpec,
    pub methods: Vec<Method>,
}

impl BenchPlan {
    pub fn from_toml(text: &str) -> Result<Self> {
        let plan: BenchPlan = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if !(plan.budget_seconds > 0.0) {
            return Err(Error::Config("budget_seconds must be positive".into()));
        }
        Ok(plan)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    TimedOut,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkRecord {
    pub generator: String,
    pub n: usize,
    pub m: usize,
    pub method: Method,
    pub wall_seconds: f64,
    pub status: RunStatus,
    /// Components per level; empty when timed out.
    pub histogram: BTreeMap<usize, usize>,
}

/// Runs every (cell, method) pair `repeats` times in plan order. Averages
/// are not computed, so timings cover detection only.
pub fn run_benchmark(plan: &BenchPlan) -> Result<Vec<BenchmarkRecord>> {
    let mut records = Vec::new();
    let budget = std::time::Duration::from_secs_f64(plan.budget_seconds);
    for cell in &plan.cells {
        let g = cell.graph.build()?;
        for &method in &cell.methods {
            let mut detector = DetectorConfig::new(method);
            detector.heuristic.average = CachePolicy::Off;
            for _ in 0..plan.repeats {
                let deadline = Deadline::after(budget);
                let start = Instant::now();
                let outcome = detector.detect_until(&g, &deadline);
                let wall_seconds = start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
                let (status, histogram) = match outcome {
                    Ok(c) => (RunStatus::Completed, c.level_histogram()),
                    Err(Error::TimedOut) => (RunStatus::TimedOut, BTreeMap::new()),
                    Err(e) => return Err(e),
                };
                records.push(BenchmarkRecord {
                    generator: cell.graph.name().to_string(),
                    n: g.node_count(),
                    m: g.edge_count(),
                    method,
                    wall_seconds,
                    status,
                    histogram,
                });
            }
        }
    }
    Ok(records)
}

/// `generator,n,m,method,seconds,status`.
pub fn write_benchmark_csv<W: Write>(records: &[BenchmarkRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["generator", "n", "m", "method", "seconds", "status"])?;
    for r in records {
        let status = match r.status {
            RunStatus::Completed => "completed",
            RunStatus::TimedOut => "timed-out",
        };
        out.write_record([
            r.generator.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.method.to_string(),
            format!("{:.6}", r.wall_seconds),
            status.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
