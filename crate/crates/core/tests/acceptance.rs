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

//! Acceptance checks. Prints one PASS/FAIL line per criterion and a
//! summary. A failing criterion makes the process exit non-zero only when
//! `KCOHESION_ACCEPTANCE_STRICT=1`, so that `cargo test` still runs the
//! remaining test targets; the FAIL lines are the record.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::time::{Duration, Instant};

use kcohesion::budget::Deadline;
use kcohesion::connectivity::{
    average_node_connectivity, edge_connectivity, local_node_connectivity_approx, local_node_connectivity_exact,
    node_connectivity, CachePolicy, Estimator, PairConnectivityCache,
};
use kcohesion::decomposition::{biconnected_components, core_numbers};
use kcohesion::exact::{k_components_bruteforce, k_components_exact, k_components_exact_until, verify_components};
use kcohesion::generators::{appendix_a_fixture, complete, powerlaw_configuration, random_bipartite};
use kcohesion::heuristic::{k_components_heuristic, HeuristicConfig, Relaxation};
use kcohesion::{Graph, GraphView, Ratio};

use common::{brute_local_kappa, matrix, random_graph};

type Outcome = (bool, String);

fn say(line: &str) {
    let mut out = std::io::stdout();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn single_thread<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

/// All 5-node cliques, by extension over higher-indexed neighbours.
fn five_cliques(g: &Graph) -> BTreeSet<Vec<usize>> {
    fn grow(g: &Graph, clique: &mut Vec<usize>, cands: Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        if clique.len() == 5 {
            out.insert(clique.clone());
            return;
        }
        for (i, &c) in cands.iter().enumerate() {
            let next: Vec<usize> = cands[i + 1..].iter().copied().filter(|&d| g.has_edge(c, d)).collect();
            clique.push(c);
            grow(g, clique, next, out);
            clique.pop();
        }
    }
    let mut out = BTreeSet::new();
    for u in 0..g.node_count() {
        let cands: Vec<usize> = g.neighbors(u).filter(|&v| v > u).collect();
        grow(g, &mut vec![u], cands, &mut out);
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let g = appendix_a_fixture();
    let exact = k_components_exact(&g).unwrap();
    let cfg = HeuristicConfig {
        estimator: Estimator::Exact,
        relaxation: Relaxation::Density(0.95),
        average: CachePolicy::Store,
        rebuild_aux: false,
    };
    let heur = k_components_heuristic(&g, &cfg).unwrap();
    let secs = start.elapsed().as_secs_f64();

    let k5s = five_cliques(&g);
    let bic = biconnected_components(&g);
    let whole = bic.components.len() == 1 && exact.level(2).len() == 1 && exact.level(2)[0].order() == 99;
    let kappa = node_connectivity(&g).unwrap();
    let max_core = core_numbers(&g).into_iter().max().unwrap();
    let e4: BTreeSet<Vec<usize>> = exact.level(4).iter().map(|c| c.nodes.clone()).collect();
    let part_a = (g.node_count(), g.edge_count()) == (99, 200) && whole && kappa == 2 && max_core == 4 && e4 == k5s && k5s.len() == 8;

    let e3: BTreeSet<Vec<usize>> = exact.level(3).iter().map(|c| c.nodes.clone()).collect();
    let h3: BTreeSet<Vec<usize>> = heur.level(3).iter().map(|c| c.nodes.clone()).collect();
    let h4: BTreeSet<Vec<usize>> = heur.level(4).iter().map(|c| c.nodes.clone()).collect();
    let two_overlap: BTreeSet<Vec<usize>> = k5s
        .iter()
        .filter(|a| k5s.iter().any(|b| *a != b && a.iter().filter(|u| b.contains(u)).count() == 2))
        .cloned()
        .collect();
    let expected_h4: BTreeSet<Vec<usize>> = k5s.difference(&two_overlap).cloned().collect();
    let part_b = e3.is_subset(&h3) && h3 == e3 && h4.len() == 4 && h4 == expected_h4 && two_overlap.len() == 4;
    (
        part_a && part_b && secs < 60.0,
        format!(
            "n=99 m=200, kappa={kappa}, max core={max_core}, exact 4-components={} (K5s={}), exact 3-components={}, heuristic 3-components={} (equal: {}), heuristic 4-components={} (missing the {} two-overlap K5s: {}), {secs:.2}s",
            e4.len(),
            k5s.len(),
            e3.len(),
            h3.len(),
            h3 == e3,
            h4.len(),
            two_overlap.len(),
            h4 == expected_h4
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut mismatches = 0;
    for i in 0..200u64 {
        let n = 5 + (i % 8) as usize;
        let p = 0.15 + 0.5 * ((i * 37 % 100) as f64 / 100.0);
        let g = random_graph(n, p, 1000 + i, true);
        if k_components_exact(&g).unwrap().node_sets() != k_components_bruteforce(&g).unwrap().node_sets() {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (mismatches == 0 && secs < 600.0, format!("200 graphs, 5<=n<=12, {mismatches} mismatches, {secs:.2}s"))
}

fn criterion_3() -> Outcome {
    let (mut pairs, mut violations) = (0usize, 0usize);
    for i in 0..500u64 {
        let n = 5 + (i % 36) as usize;
        let p = 0.05 + 0.45 * ((i * 53 % 101) as f64 / 100.0);
        let g = random_graph(n, p, 5000 + i, false);
        for u in 0..n {
            for v in u + 1..n {
                pairs += 1;
                if local_node_connectivity_approx(&g, u, v).unwrap() > local_node_connectivity_exact(&g, u, v).unwrap() {
                    violations += 1;
                }
            }
        }
    }
    (violations == 0, format!("500 graphs, n<=40, density 0.05-0.5, {pairs} pairs, {violations} violations"))
}

fn criterion_4() -> Outcome {
    let mut violations = Vec::new();
    let graphs = matrix();
    for (name, g) in &graphs {
        let kappa = node_connectivity(g).unwrap();
        let lambda = edge_connectivity(g).unwrap();
        let delta = g.min_degree().unwrap();
        let avg = average_node_connectivity(g, Estimator::Exact, &PairConnectivityCache::new(CachePolicy::Off)).unwrap();
        if !(kappa <= lambda && lambda <= delta && avg >= Ratio::from_integer(kappa as u64)) {
            violations.push(name.clone());
        }
    }
    (violations.is_empty(), format!("{} matrix graphs, violations: {violations:?}", graphs.len()))
}

fn criterion_5() -> Outcome {
    let mut violations = Vec::new();
    let graphs = matrix();
    let mut comps_checked = 0;
    for (name, g) in &graphs {
        let comps = k_components_exact(g).unwrap();
        for c in comps.iter() {
            comps_checked += 1;
            if c.k > 1 && !comps.level(c.k - 1).iter().any(|p| c.is_subset_of(p)) {
                violations.push(format!("{name}: component {} not nested", c.id));
            }
            for d in comps.level(c.k) {
                if d.id > c.id && c.overlap(d) > c.k - 1 {
                    violations.push(format!("{name}: components {} and {} overlap in {}", c.id, d.id, c.overlap(d)));
                }
            }
        }
    }
    (violations.is_empty(), format!("{} graphs, {comps_checked} components, violations: {violations:?}", graphs.len()))
}

fn criterion_6() -> Outcome {
    let off = HeuristicConfig { average: CachePolicy::Off, ..HeuristicConfig::default() };
    let big = powerlaw_configuration(10_000, 2.0, 1).unwrap();
    let start = Instant::now();
    let big_levels = single_thread(|| k_components_heuristic(&big, &off).unwrap().max_level());
    let big_secs = start.elapsed().as_secs_f64();

    let g = powerlaw_configuration(1000, 2.0, 1).unwrap();
    let mut t_h = f64::INFINITY;
    for _ in 0..3 {
        let start = Instant::now();
        single_thread(|| k_components_heuristic(&g, &off).unwrap());
        t_h = t_h.min(start.elapsed().as_secs_f64());
    }
    // timed to completion so the real ratio is reported; the cap only
    // guards against a runaway exact run
    let mut t_mw = f64::INFINITY;
    let mut timed_out = false;
    for _ in 0..3 {
        let deadline = Deadline::after(Duration::from_secs(600));
        let start = Instant::now();
        let r = single_thread(|| k_components_exact_until(&g, &deadline));
        let t = start.elapsed().as_secs_f64();
        if r.is_err() {
            timed_out = true;
            break;
        }
        t_mw = t_mw.min(t);
    }
    let ratio = if timed_out { f64::INFINITY } else { t_mw / t_h };
    (
        big_secs < 1800.0 && ratio >= 5.0,
        format!(
            "n=10000: {big_secs:.1}s single-threaded ({big_levels} levels); n=1000: heuristic {t_h:.3}s, moody-white {}, ratio {ratio:.2} (need >= 5)",
            if timed_out { "exceeded 600s".to_string() } else { format!("{t_mw:.3}s") }
        ),
    )
}

fn criterion_7() -> Outcome {
    let (mut confirmed, mut total) = (0, 0);
    for seed in 0..20 {
        let g = powerlaw_configuration(500, 2.0, 100 + seed).unwrap();
        let comps = k_components_heuristic(&g, &HeuristicConfig::default()).unwrap();
        let report = verify_components(&g, &comps, 3).unwrap();
        confirmed += report.confirmed();
        total += report.total();
    }
    let frac = if total == 0 { 1.0 } else { confirmed as f64 / total as f64 };
    (frac >= 0.9 && total > 0, format!("20 power-law graphs n=500: {confirmed}/{total} components at k>=3 confirmed ({frac:.3})"))
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let g = random_bipartite(500, 500, 0.008, 21).unwrap();
    let input = dir.path().join("two-mode.tsv");
    fs::write(&input, g.to_edge_list_string()).unwrap();
    let run = |threads: &str, out: &str| -> i32 {
        kcohesion::cli::run([
            "kcohesion",
            "--threads",
            threads,
            "nullmodel",
            "--input",
            input.to_str().unwrap(),
            "--replicates",
            "16",
            "--seed",
            "77",
            "--out-dir",
            dir.path().join(out).to_str().unwrap(),
        ])
    };
    let codes = [run("1", "a"), run("1", "b"), run("8", "c")];
    let read = |out: &str, f: &str| fs::read(dir.path().join(out).join(f)).unwrap_or_default();
    let mut identical = true;
    for f in ["frequencies.csv", "replicates.csv", "degrees.csv"] {
        identical &= read("a", f) == read("b", f) && read("a", f) == read("c", f) && !read("a", f).is_empty();
    }
    let degrees = String::from_utf8(read("a", "degrees.csv")).unwrap();
    let mut rows = 0;
    let degrees_match = degrees.lines().skip(1).all(|l| {
        rows += 1;
        let f: Vec<&str> = l.split(',').collect();
        f.len() == 3 && f[1] == f[2]
    });
    let listed = (0..g.node_count()).filter(|&u| g.degree(u) > 0).count();
    let ok = codes == [0, 0, 0] && identical && degrees_match && rows == listed;
    (
        ok,
        format!(
            "500+500 bipartite, 16 replicates: exit codes {codes:?}, byte-identical re-run and --threads 1 vs 8: {identical}, null mean degrees equal input on {rows} nodes: {degrees_match}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for (name, g) in matrix().into_iter().filter(|(_, g)| g.node_count() <= 12) {
        let n = g.node_count();
        let mut total = 0u64;
        for u in 0..n {
            for v in u + 1..n {
                total += brute_local_kappa(&g, u, v) as u64;
            }
        }
        let brute = Ratio::new(total, (n * (n - 1) / 2) as u64);
        let avg = average_node_connectivity(&g, Estimator::Exact, &PairConnectivityCache::new(CachePolicy::Off)).unwrap();
        checked += 1;
        if avg != brute {
            bad.push(name);
        }
    }
    for n in 2..=12 {
        let avg = average_node_connectivity(&complete(n), Estimator::Exact, &PairConnectivityCache::new(CachePolicy::Off)).unwrap();
        if avg != Ratio::from_integer(n as u64 - 1) {
            bad.push(format!("K{n}"));
        }
    }
    (bad.is_empty(), format!("{checked} matrix graphs with n<=12 plus K2..K12, mismatches: {bad:?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("Appendix-A golden test", criterion_1),
        ("oracle equivalence", criterion_2),
        ("approximation lower bound", criterion_3),
        ("Whitney and average bounds", criterion_4),
        ("hierarchy nesting and overlap", criterion_5),
        ("performance trend", criterion_6),
        ("accuracy against the exact method", criterion_7),
        ("null-model pipeline reproducibility", criterion_8),
        ("average connectivity exactness", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        if !ok {
            failed += 1;
        }
        say(&format!("criterion {}: {} - {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" }));
    }
    say(&format!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len()));
    if failed > 0 && std::env::var("KCOHESION_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
