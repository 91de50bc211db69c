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

//! Command-line front end.
//!
//! Every command is deterministic for a given seed; `--threads` changes
//! only the speed. Flag defaults can come from a `key = value` file passed
//! with `--config`, and each run writes a `manifest.toml` in the same
//! format so that `--config manifest.toml` repeats it.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    knumber_frequencies, null_replicate, run_benchmark, write_benchmark_csv, BenchPlan, ComponentsFile,
    DetectorConfig, FrequencyTable, TreeFilters, TreeFormat, DEFAULT_REPLICATES,
};
use crate::components::Method;
use crate::connectivity::CachePolicy;
use crate::error::{Error, Result};
use crate::exact::verify_components;
use crate::generators::{self, Seed};
use crate::graph::{read_edge_list, Graph, GraphView, ParseOptions, Part};
use crate::heuristic::{HeuristicConfig, Relaxation};
use crate::hierarchy::{build_block_tree, k_number_map, KNumberMap};
use crate::layout::layout_scatter;

#[derive(Debug, Parser)]
#[command(name = "kcohesion", version, about = "Structural cohesion (k-component) analysis of large networks")]
pub struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// File of `key = value` lines used as flag defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect k-components; writes components.json, knumbers.csv and manifest.toml.
    Compute(ComputeArgs),
    /// Compare k-number frequencies against bipartite configuration-model replicates.
    Nullmodel(NullmodelArgs),
    /// Check detected components with the exact algorithm.
    Verify(VerifyArgs),
    /// Write a generated graph as an edge list.
    Generate(GenerateArgs),
    /// Stress layout with the average k-number as z.
    Layout(LayoutArgs),
    /// Run a benchmark plan.
    Bench(BenchArgs),
    /// Export a components.json block tree as DOT or JSON.
    Tree(TreeArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Edge list: two whitespace-separated labels per line, `#` comments.
    #[arg(long)]
    pub input: PathBuf,
    /// Two-mode input: the left column is part A, the right column part B.
    #[arg(long)]
    pub bipartite: bool,
    /// Analyse the one-mode projection onto this part.
    #[arg(long)]
    pub project: Option<Part>,
    /// Drop self-loops instead of rejecting them.
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelaxationKind {
    Density,
    DegreeSpread,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// approx | exact-flow | moody-white | brute-force
    #[arg(long, default_value = "approx")]
    pub method: Method,
    #[arg(long, default_value_t = 0.95)]
    pub min_density: f64,
    #[arg(long, value_enum, default_value_t = RelaxationKind::Density)]
    pub relaxation: RelaxationKind,
    /// Largest accepted max-min degree difference for `--relaxation degree-spread`.
    #[arg(long, default_value_t = 2)]
    pub degree_spread: usize,
    /// store | recompute | off
    #[arg(long, default_value = "store")]
    pub average: CachePolicy,
    /// Rebuild the auxiliary graph inside each detected component.
    #[arg(long)]
    pub rebuild_aux: bool,
}

impl DetectArgs {
    fn detector(&self) -> Result<DetectorConfig> {
        let relaxation = match self.relaxation {
            RelaxationKind::Density => Relaxation::Density(self.min_density),
            RelaxationKind::DegreeSpread => Relaxation::DegreeSpread(self.degree_spread),
        };
        Relaxation::Density(self.min_density).validate()?;
        let heuristic = HeuristicConfig { relaxation, average: self.average, rebuild_aux: self.rebuild_aux, ..HeuristicConfig::default() };
        Ok(DetectorConfig { method: self.method, heuristic })
    }

    fn manifest(&self, m: &mut Manifest) {
        m.set("method", short_method(self.method));
        m.set("min-density", self.min_density);
        m.set("relaxation", kebab(&self.relaxation));
        m.set("degree-spread", self.degree_spread as i64);
        m.set("average", kebab(&self.average));
        m.set("rebuild-aux", self.rebuild_aux);
    }
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub detect: DetectArgs,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, env = "KCOHESION_SEED", default_value_t = 0)]
    pub seed: Seed,
}

#[derive(Debug, Args)]
pub struct NullmodelArgs {
    /// Two-mode edge list; parts are the two columns.
    #[arg(long)]
    pub input: PathBuf,
    /// Analyse one-mode projections onto this part.
    #[arg(long)]
    pub project: Option<Part>,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub replicates: usize,
    /// Replicate `i` uses seed `seed + i`.
    #[arg(long, env = "KCOHESION_SEED", default_value_t = 0)]
    pub seed: Seed,
    /// Run only this replicate.
    #[arg(long)]
    pub only_replicate: Option<usize>,
    /// Also write the block tree and edge list of this replicate.
    #[arg(long)]
    pub pick: Option<usize>,
    #[command(flatten)]
    pub detect: DetectArgs,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// components.json from a compute run.
    #[arg(long, default_value = "components.json")]
    pub components: PathBuf,
    /// Only check components at this level or above.
    #[arg(long, default_value_t = 1)]
    pub min_level: usize,
    #[arg(long, default_value = "verification.json")]
    pub output: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GeneratorKind {
    AppendixA,
    Complete,
    Cycle,
    Path,
    Star,
    Petersen,
    Grid,
    Barbell,
    ErdosRenyi,
    Powerlaw,
    Bipartite,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: GeneratorKind,
    /// Node count (leaves for `star`, clique size for `barbell`).
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 4.0)]
    pub avg_degree: f64,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 3)]
    pub rows: usize,
    #[arg(long, default_value_t = 3)]
    pub cols: usize,
    /// Path length between the barbell cliques.
    #[arg(long, default_value_t = 1)]
    pub bridge: usize,
    /// Part sizes and edge probability of `bipartite`.
    #[arg(long, default_value_t = 10)]
    pub a: usize,
    #[arg(long, default_value_t = 10)]
    pub b: usize,
    #[arg(long, default_value_t = 0.1)]
    pub p: f64,
    #[arg(long, env = "KCOHESION_SEED", default_value_t = 0)]
    pub seed: Seed,
    /// Defaults to standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LayoutArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// knumbers.csv from a compute run; detected afresh when absent.
    #[arg(long)]
    pub knumbers: Option<PathBuf>,
    #[command(flatten)]
    pub detect: DetectArgs,
    #[arg(long, env = "KCOHESION_SEED", default_value_t = 0)]
    pub seed: Seed,
    #[arg(long, default_value = "layout.csv")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// TOML plan: `budget_seconds`, `repeats` and `[[cell]]` tables.
    #[arg(long)]
    pub plan: PathBuf,
    /// Run on one thread (the comparable timing mode).
    #[arg(long)]
    pub single_thread: bool,
    /// Override the plan's per-run budget.
    #[arg(long)]
    pub budget: Option<f64>,
    #[arg(long, default_value = "bench.csv")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    #[arg(long, default_value = "components.json")]
    pub components: PathBuf,
    /// dot | json
    #[arg(long, default_value = "dot")]
    pub format: TreeFormat,
    /// Hide 1-, 2- and 3-components below 20, 15 and 10 nodes.
    #[arg(long)]
    pub paper_filters: bool,
    #[arg(long)]
    pub with_members: bool,
    /// Defaults to standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Flat `key = value` record of a run.
struct Manifest {
    table: toml::Table,
}

impl Manifest {
    fn new(command: &str) -> Self {
        let mut table = toml::Table::new();
        table.insert("command".into(), command.into());
        table.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        Manifest { table }
    }

    fn set<V: Into<toml::Value>>(&mut self, key: &str, value: V) {
        self.table.insert(key.into(), value.into());
    }

    fn input(&mut self, input: &InputArgs) {
        self.set("input", input.input.display().to_string());
        self.set("bipartite", input.bipartite);
        if let Some(p) = input.project {
            self.set("project", p.to_string());
        }
        self.set("lenient", input.lenient);
    }

    fn write(mut self, path: &Path, seconds: f64) -> Result<()> {
        let mut timing = toml::Table::new();
        timing.insert("seconds".into(), seconds.into());
        self.table.insert("timing".into(), toml::Value::Table(timing));
        let text = toml::to_string(&self.table).map_err(|e| Error::Config(e.to_string()))?;
        fs::write(path, text)?;
        Ok(())
    }
}

fn kebab<T: Serialize>(value: &T) -> String {
    serde_json::to_value(value).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn short_method(m: Method) -> &'static str {
    match m {
        Method::Approx => "approx",
        Method::ExactFlow => "exact-flow",
        Method::MoodyWhite => "moody-white",
        Method::BruteForce => "brute-force",
    }
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Replicate { source, .. } => exit_code(source),
        Error::Config(_) | Error::NotBipartite(_) | Error::Domain(_) => 2,
        Error::TooLarge { .. } => 3,
        _ => 1,
    }
}

fn load(input: &InputArgs) -> Result<Graph> {
    let opts = ParseOptions { bipartite: input.bipartite, strict: !input.lenient };
    let g = read_edge_list(&input.input, opts)?;
    match input.project {
        Some(side) => {
            let g = if g.parts().is_some() { g } else { g.infer_parts()? };
            g.one_mode_projection(side)
        }
        None => Ok(g),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn compute(args: &ComputeArgs) -> Result<()> {
    let start = Instant::now();
    let detector = args.detect.detector()?;
    let g = load(&args.input)?;
    let comps = detector.detect(&g)?;
    let tree = build_block_tree(&comps);
    let knumbers = k_number_map(&g, &comps);
    create_dir(&args.out_dir)?;
    let file = ComponentsFile::from_tree(&g, &tree, detector.method, true);
    fs::write(args.out_dir.join("components.json"), file.to_json()?)?;
    knumbers.write_csv(&g, fs::File::create(args.out_dir.join("knumbers.csv"))?)?;
    let mut m = Manifest::new("compute");
    m.input(&args.input);
    args.detect.manifest(&mut m);
    m.set("out-dir", args.out_dir.display().to_string());
    m.set("seed", args.seed as i64);
    m.write(&args.out_dir.join("manifest.toml"), start.elapsed().as_secs_f64())?;
    for w in &tree.warnings {
        eprintln!("warning: {w}");
    }
    println!("{} nodes, {} components, deepest level {}", g.node_count(), comps.len(), comps.max_level());
    Ok(())
}

fn nullmodel(args: &NullmodelArgs) -> Result<()> {
    let start = Instant::now();
    let detector = args.detect.detector()?;
    let g = read_edge_list(&args.input, ParseOptions { bipartite: false, strict: true })?.infer_parts()?;
    create_dir(&args.out_dir)?;
    let table = match args.only_replicate {
        Some(i) => {
            let mut t = knumber_frequencies(&g, 0, args.seed, &detector, args.project)?;
            t.replicates.push(null_replicate(&g, i, args.seed, &detector, args.project)?.0);
            t
        }
        None => knumber_frequencies(&g, args.replicates, args.seed, &detector, args.project)?,
    };
    table.write_csv(fs::File::create(args.out_dir.join("frequencies.csv"))?)?;
    table.write_replicates_csv(fs::File::create(args.out_dir.join("replicates.csv"))?)?;
    if !table.replicates.is_empty() {
        write_degrees(&g, &table, &args.out_dir.join("degrees.csv"))?;
    }
    if let Some(i) = args.pick {
        let (_, h, comps) = null_replicate(&g, i, args.seed, &detector, args.project)?;
        let file = ComponentsFile::from_tree(&h, &build_block_tree(&comps), detector.method, true);
        fs::write(args.out_dir.join(format!("pick-{i}.components.json")), file.to_json()?)?;
        fs::write(args.out_dir.join(format!("pick-{i}.tsv")), h.to_edge_list_string())?;
    }
    let mut m = Manifest::new("nullmodel");
    m.set("input", args.input.display().to_string());
    if let Some(p) = args.project {
        m.set("project", p.to_string());
    }
    m.set("replicates", args.replicates as i64);
    m.set("seed", args.seed as i64);
    if let Some(i) = args.only_replicate {
        m.set("only-replicate", i as i64);
    }
    if let Some(i) = args.pick {
        m.set("pick", i as i64);
    }
    args.detect.manifest(&mut m);
    m.set("out-dir", args.out_dir.display().to_string());
    m.write(&args.out_dir.join("manifest.toml"), start.elapsed().as_secs_f64())?;
    print_frequencies(&table);
    Ok(())
}

/// `node,degree,null_mean_degree`: input degrees beside the mean degree of
/// the stub-matched replicates before parallel edges are dropped.
fn write_degrees(g: &Graph, table: &FrequencyTable, path: &Path) -> Result<()> {
    let mut out = csv::Writer::from_writer(fs::File::create(path)?);
    out.write_record(["node", "degree", "null_mean_degree"])?;
    for (u, mean) in table.null_stub_degree_mean().into_iter().enumerate() {
        out.write_record([g.label(u).to_string(), g.degree(u).to_string(), mean.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

fn print_frequencies(t: &FrequencyTable) {
    for k in t.levels() {
        let actual = t.actual.get(&k).copied().unwrap_or(0);
        match t.null_stats(k) {
            Some((mean, sd)) => println!("k={k}: {actual} nodes (null {mean:.2} ± {sd:.2})"),
            None => println!("k={k}: {actual} nodes"),
        }
    }
}

#[derive(Serialize)]
struct CheckOut {
    id: usize,
    k: usize,
    order: usize,
    actual_kappa: usize,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    refinement: Option<Vec<Vec<String>>>,
}

#[derive(Serialize)]
struct VerifyOut {
    confirmed: usize,
    total: usize,
    confirmed_fraction: f64,
    checks: Vec<CheckOut>,
}

fn verify(args: &VerifyArgs) -> Result<()> {
    let g = load(&args.input)?;
    let file: ComponentsFile = serde_json::from_str(&fs::read_to_string(&args.components)?)?;
    let comps = file.to_components(&g)?;
    let report = verify_components(&g, &comps, args.min_level)?;
    let label = |set: &Vec<usize>| set.iter().map(|&u| g.label(u).to_string()).collect::<Vec<_>>();
    let out = VerifyOut {
        confirmed: report.confirmed(),
        total: report.total(),
        confirmed_fraction: report.confirmed_fraction(),
        checks: report
            .checks
            .iter()
            .map(|c| CheckOut {
                id: c.id,
                k: c.k,
                order: c.order,
                actual_kappa: c.kappa,
                verdict: if c.confirmed { "confirmed" } else { "under-connected" },
                refinement: (!c.confirmed).then(|| c.refinement.iter().map(label).collect()),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&out)?;
    text.push('\n');
    fs::write(&args.output, text)?;
    println!("{} of {} components confirmed ({:.3})", out.confirmed, out.total, out.confirmed_fraction);
    Ok(())
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let g = match args.kind {
        GeneratorKind::AppendixA => generators::appendix_a_fixture(),
        GeneratorKind::Complete => generators::complete(args.n),
        GeneratorKind::Cycle => {
            if args.n < 3 {
                return Err(Error::Config("a cycle needs at least 3 nodes".into()));
            }
            generators::cycle(args.n)
        }
        GeneratorKind::Path => generators::path(args.n),
        GeneratorKind::Star => generators::star(args.n),
        GeneratorKind::Petersen => generators::petersen(),
        GeneratorKind::Grid => generators::grid(args.rows, args.cols),
        GeneratorKind::Barbell => generators::barbell(args.n, args.bridge),
        GeneratorKind::ErdosRenyi => generators::erdos_renyi(args.n, args.avg_degree, args.seed)?,
        GeneratorKind::Powerlaw => generators::powerlaw_configuration(args.n, args.alpha, args.seed)?,
        GeneratorKind::Bipartite => generators::random_bipartite(args.a, args.b, args.p, args.seed)?,
    };
    write_output(args.output.as_deref(), &g.to_edge_list_string())
}

fn layout(args: &LayoutArgs) -> Result<()> {
    let g = load(&args.input)?;
    let knumbers = match &args.knumbers {
        Some(path) => KNumberMap::read_csv(&g, fs::File::open(path)?)?,
        None => k_number_map(&g, &args.detect.detector()?.detect(&g)?),
    };
    let table = layout_scatter(&g, &knumbers, args.seed);
    table.write_csv(&g, fs::File::create(&args.output)?)?;
    println!("stress {:.6} after {} iterations", table.stress, table.iterations);
    Ok(())
}

fn bench(args: &BenchArgs) -> Result<()> {
    let mut plan = BenchPlan::from_toml(&fs::read_to_string(&args.plan)?)?;
    if let Some(b) = args.budget {
        if !(b > 0.0) {
            return Err(Error::Config("budget must be positive".into()));
        }
        plan.budget_seconds = b;
    }
    let records = if args.single_thread {
        with_threads(Some(1), || run_benchmark(&plan))?
    } else {
        run_benchmark(&plan)?
    };
    write_benchmark_csv(&records, fs::File::create(&args.output)?)?;
    println!("{} runs written to {}", records.len(), args.output.display());
    Ok(())
}

fn tree(args: &TreeArgs) -> Result<()> {
    let file: ComponentsFile = serde_json::from_str(&fs::read_to_string(&args.components)?)?;
    let filters = if args.paper_filters { TreeFilters::presentation() } else { TreeFilters::none() };
    let mut file = file.filtered(&filters);
    if !args.with_members {
        file = file.without_members();
    }
    let text = match args.format {
        TreeFormat::Dot => file.to_dot(),
        TreeFormat::Json => file.to_json()?,
    };
    write_output(args.output.as_deref(), &text)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(0) => Err(Error::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(f),
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    with_threads(cli.threads, || match &cli.command {
        Command::Compute(a) => compute(a),
        Command::Nullmodel(a) => nullmodel(a),
        Command::Verify(a) => verify(a),
        Command::Generate(a) => generate(a),
        Command::Layout(a) => layout(a),
        Command::Bench(a) => bench(a),
        Command::Tree(a) => tree(a),
    })
}

const SUBCOMMANDS: [&str; 7] = ["compute", "nullmodel", "verify", "generate", "layout", "bench", "tree"];

/// Inserts the flags of a `--config` file right after the subcommand name,
/// skipping keys already given on the command line.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let strs: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let path = strs.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            strs.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    });
    let Some(path) = path else { return Ok(args) };
    let text = fs::read_to_string(&path)?;
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(format!("{path}: {e}")))?;
    let Some(pos) = strs.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else { return Ok(args) };
    let given = |flag: &str| strs.iter().any(|a| a == flag || a.starts_with(&format!("{flag}=")));
    let mut extra: Vec<OsString> = Vec::new();
    for (key, value) in &table {
        if key == "command" || key == "version" || key == "config" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        if given(&flag) {
            continue;
        }
        match value {
            toml::Value::Boolean(true) => extra.push(flag.into()),
            toml::Value::Boolean(false) | toml::Value::Table(_) => {}
            toml::Value::String(s) => extra.extend([flag.into(), s.into()]),
            toml::Value::Integer(i) => extra.extend([flag.into(), i.to_string().into()]),
            toml::Value::Float(f) => extra.extend([flag.into(), f.to_string().into()]),
            other => return Err(Error::Config(format!("{path}: unsupported value for `{key}`: {other}"))),
        }
    }
    let mut out = args;
    out.splice(pos + 1..pos + 1, extra);
    Ok(out)
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args = match expand_config(args.into_iter().map(Into::into).collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
