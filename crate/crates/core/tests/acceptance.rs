//! Acceptance suite: one PASS / FAIL / SKIP line per criterion.
//!
//! Dataset-backed criteria read `ACS_DATASET_DIR` (default
//! `<workspace>/data/supply_chain`). The long dataset runs (6c, 6d and 8)
//! also need `ACS_ACCEPTANCE_FULL=1`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use acs_supply::acs::select_route;
use acs_supply::bench::{first_reaching, run_matrix_on, run_timing, ArchSpec, ExperimentConfig};
use acs_supply::cost::check_constraints;
use acs_supply::instance::{load_instance, load_instance_with, ColumnMapping};
use acs_supply::oracle::{brute_force_optimum, generate_instance, random_instance, roulette_gof_test, GenSpec};
use acs_supply::parallel::{reduce_max_index, scan_roulette};
use acs_supply::rng::{Uniform01, UniformStream};
use acs_supply::{run, Architecture, ProblemInstance, RunConfig};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn workspace() -> PathBuf {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    root.canonicalize().unwrap_or(root)
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn full_run() -> bool {
    std::env::var("ACS_ACCEPTANCE_FULL").is_ok_and(|v| v == "1")
}

fn dataset() -> Result<ProblemInstance, String> {
    let dir = std::env::var_os("ACS_DATASET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| workspace().join("data/supply_chain"));
    if !dir.is_dir() {
        return Err(format!(
            "dataset not found at {} (set ACS_DATASET_DIR)",
            dir.display()
        ));
    }
    load_instance(&dir).or_else(|_| {
        let map = workspace().join("docs/published-dataset.map");
        let mapping = ColumnMapping::from_file(&map).map_err(|e| e.to_string())?;
        load_instance_with(&dir, &mapping).map_err(|e| format!("cannot load {}: {e}", dir.display()))
    })
}

fn pa_config(instances: usize, budget: u64, seed: u64) -> RunConfig {
    let mut c = RunConfig::new(Architecture::Pa, instances);
    c.solution_budget = budget;
    c.master_seed = seed;
    c
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut hits = 0;
    for i in 0..200u64 {
        let instance = match random_instance(1_000_003 + i, 100_000) {
            Ok(x) => x,
            Err(e) => return Outcome::Fail(format!("generator failed on #{i}: {e}")),
        };
        let (_, optimum) = brute_force_optimum(&instance).expect("search space is bounded");
        let found = run(&pa_config(4, 800, 1 + i), &instance)
            .expect("run")
            .best_solution
            .cost
            .total;
        hits += (rel_diff(found, optimum) <= 1e-9) as usize;
    }
    let secs = start.elapsed().as_secs_f64();

    // The three-order instance, 1 instance x 200 iterations, 100 seeds.
    let three = generate_instance(&GenSpec {
        n_orders: 3,
        n_warehouses: 2,
        n_couriers: 2,
        seed: 3,
        ..GenSpec::default()
    })
    .expect("generator");
    let (_, optimum) = brute_force_optimum(&three).expect("tiny");
    let small_hits = (0..100)
        .filter(|&s| {
            let r = run(&pa_config(1, 200, s), &three).expect("run");
            rel_diff(r.best_solution.cost.total, optimum) <= 1e-9
        })
        .count();

    let detail = format!(
        "{hits}/200 optimal (need 190), {secs:.1} s (limit 300); three-order instance {small_hits}/100 seeds (need 95)"
    );
    if hits >= 190 && secs < 300.0 && small_hits >= 95 {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn constraint_validity() -> Outcome {
    let archs = [Architecture::Iac, Architecture::Pa, Architecture::Pawv];
    let mut violations = 0;
    let mut constructions = 0;
    for i in 0..1000u64 {
        let instance = random_instance(7_000_000 + i, 100_000).expect("generator");
        let mut c = RunConfig::new(archs[i as usize % 3], 2);
        c.solution_budget = 10;
        c.master_seed = i;
        c.audit = true;
        c.equivalence_mode = i % 2 == 0;
        let r = match run(&c, &instance) {
            Ok(r) => r,
            Err(e) => return Outcome::Fail(format!("run #{i} failed: {e}")),
        };
        violations += r.audit_violations + check_constraints(&instance, &r.best_solution.assignment).len();
        constructions += r.solutions_constructed;
    }
    let detail = format!("{violations} violations over 1000 runs ({constructions} constructions)");
    if violations == 0 {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn selection_semantics() -> Outcome {
    let mut s = UniformStream::from_seed(3);
    let mut worst = (1.0f64, 1.0f64);
    let mut failures = 0;
    for _ in 0..50 {
        let len = 2 + (s.next_f64() * 30.0) as usize;
        let w: Vec<f64> = (0..len)
            .map(|_| if s.next_f64() < 0.2 { 0.0 } else { s.next_f64() })
            .collect();
        if w.iter().all(|&x| x == 0.0) {
            continue;
        }
        let mut u = UniformStream::from_seed(s.next_f64().to_bits());
        let p_scan = roulette_gof_test(|w| scan_roulette(w, u.next_f64()).unwrap(), &w, 100_000);
        let p_scalar = roulette_gof_test(|w| select_route(w, 0.0, &mut u).unwrap(), &w, 100_000);
        worst = (worst.0.min(p_scan), worst.1.min(p_scalar));
        failures += (p_scan <= 0.01) as usize + (p_scalar <= 0.01) as usize;
    }
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let len = 1 + (s.next_f64() * 64.0) as usize;
        // Coarse values so ties are common.
        let v: Vec<f64> = (0..len).map(|_| (s.next_f64() * 8.0).floor()).collect();
        let scalar = v
            .iter()
            .enumerate()
            .fold(0, |best, (i, &x)| if x > v[best] { i } else { best });
        mismatches += (reduce_max_index(&v) != scalar) as usize;
    }
    let detail = format!(
        "{failures} goodness-of-fit rejections (min p scan {:.4}, scalar {:.4}); {mismatches}/10000 argmax mismatches",
        worst.0, worst.1
    );
    if failures == 0 && mismatches == 0 {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn sample_instance() -> ProblemInstance {
    load_instance(&Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/small")).expect("bundled sample")
}

fn pa_pawv_equivalence() -> Outcome {
    let instance = sample_instance();
    let mut cases = 0;
    let mut differing = Vec::new();
    for instances in [1, 4, 32] {
        for ants in [1, 5] {
            for seed in 0..5 {
                let mut pa = pa_config(instances, (20 * instances * ants) as u64, seed);
                pa.ants_per_instance = ants;
                let pawv = RunConfig {
                    architecture: Architecture::Pawv,
                    ..pa.clone()
                };
                let a = run(&pa, &instance).expect("pa");
                let b = run(&pawv, &instance).expect("pawv");
                cases += 1;
                if a.best_solution.assignment != b.best_solution.assignment || !a.same_outcome(&b) {
                    differing.push(format!("{instances}x{ants}/seed {seed}"));
                }
            }
        }
    }
    let detail = format!("{}/{cases} configurations identical", cases - differing.len());
    if differing.is_empty() {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(format!("{detail}; differ: {}", differing.join(", ")))
    }
}

fn schedule_independence() -> Outcome {
    let instance = sample_instance();
    let max = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut checked = 0;
    let mut differing = Vec::new();
    for arch in [Architecture::Iac, Architecture::Pa, Architecture::Pawv] {
        for (instances, ants) in [(1, 1), (8, 1), (8, 5)] {
            let mut c = RunConfig::new(arch, instances);
            c.ants_per_instance = ants;
            c.solution_budget = (15 * instances * ants) as u64;
            c.master_seed = 11;
            c.workers = Some(1);
            let reference = run(&c, &instance).expect("run");
            for w in [4, max] {
                c.workers = Some(w);
                checked += 1;
                if !run(&c, &instance).expect("run").same_outcome(&reference) {
                    differing.push(format!("{arch} {instances}x{ants} workers {w}"));
                }
            }
        }
    }
    let detail = format!("{checked} reruns with workers {{1, 4, {max}}} compared");
    if differing.is_empty() {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(format!("{detail}; differ: {}", differing.join(", ")))
    }
}

fn protocol(arch: Architecture, counts: Vec<usize>, max_iterations: Option<usize>) -> ExperimentConfig {
    ExperimentConfig {
        architectures: vec![ArchSpec::new(arch, 1)],
        instance_counts: counts,
        repeats: 10,
        max_iterations,
        ..ExperimentConfig::default()
    }
}

/// Mean iterations to `threshold`, counting runs that never reach it at
/// `cap`.
fn mean_iterations_to(
    instance: &ProblemInstance,
    arch: Architecture,
    n: usize,
    threshold: f64,
    cap: usize,
) -> (f64, usize) {
    let config = protocol(arch, vec![n], Some(cap));
    let traces = run_matrix_on(&config, instance).expect("protocol run");
    let hits: Vec<Option<usize>> = traces
        .iter()
        .map(|t| first_reaching(t, config.best_known_cost, threshold))
        .collect();
    let reached = hits.iter().filter(|h| h.is_some()).count();
    let mean = hits.iter().map(|h| h.unwrap_or(cap) as f64).sum::<f64>() / hits.len() as f64;
    (mean, reached)
}

fn convergence_reproduction(instance: &ProblemInstance) -> Vec<(&'static str, Outcome)> {
    let mut out = Vec::new();
    let best = ExperimentConfig::default().best_known_cost;

    let config = protocol(Architecture::Pa, vec![1], Some(5));
    let traces = run_matrix_on(&config, instance).expect("protocol run");
    let mean = traces
        .iter()
        .map(|t| 100.0 * best / t.points.iter().find(|p| p.0 == 5).expect("iteration 5").1)
        .sum::<f64>()
        / traces.len() as f64;
    let detail = format!("PA x1 mean proximity at iteration 5 = {mean:.3}% (target 98.646 +/- 0.25)");
    out.push((
        "6a",
        if (mean - 98.646).abs() <= 0.25 {
            Outcome::Pass(detail)
        } else {
            Outcome::Fail(detail)
        },
    ));

    let (mean, reached) = mean_iterations_to(instance, Architecture::Pa, 64, 99.5, 330);
    let detail = format!("PA x64 mean iterations to 99.50% = {mean:.1} ({reached}/10 reached; limit 110)");
    out.push(("6b", if mean <= 110.0 { Outcome::Pass(detail) } else { Outcome::Fail(detail) }));

    if !full_run() {
        out.push(("6c", Outcome::Skip("long run; set ACS_ACCEPTANCE_FULL=1".into())));
        out.push(("6d", Outcome::Skip("long run; set ACS_ACCEPTANCE_FULL=1".into())));
        return out;
    }
    let mut reached_any = Vec::new();
    for n in [1, 64, 1024] {
        let config = protocol(Architecture::Iac, vec![n], None);
        let traces = run_matrix_on(&config, instance).expect("protocol run");
        let hits = traces
            .iter()
            .filter(|t| first_reaching(t, best, 99.6).is_some())
            .count();
        if hits > 0 {
            reached_any.push(format!("x{n}: {hits}/10"));
        }
    }
    out.push((
        "6c",
        if reached_any.is_empty() {
            Outcome::Pass("IAC never reached 99.60% at 1, 64, 1024 instances".into())
        } else {
            Outcome::Fail(format!("IAC reached 99.60%: {}", reached_any.join(", ")))
        },
    ));
    let (mean, reached) = mean_iterations_to(instance, Architecture::Pa, 512, 99.75, 1500);
    let detail = format!("PA x512 mean iterations to 99.75% = {mean:.1} ({reached}/10 reached; limit 280)");
    out.push(("6d", if mean <= 280.0 { Outcome::Pass(detail) } else { Outcome::Fail(detail) }));
    out
}

fn timing_ordering(instance: &ProblemInstance) -> Outcome {
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    if cores < 8 {
        return Outcome::Skip(format!("needs at least 8 cores, host has {cores}"));
    }
    let config = ExperimentConfig {
        architectures: [Architecture::Iac, Architecture::Pa, Architecture::Pawv]
            .map(|a| ArchSpec::new(a, 1))
            .to_vec(),
        instance_counts: vec![1024],
        timing_iteration_cap: 20,
        ..ExperimentConfig::default()
    };
    let records = run_timing(&config, instance).expect("timing");
    let [iac, pa, pawv] = [0, 1, 2].map(|i| records[i].mean_seconds_per_iteration);
    let detail = format!("s/iter at 1024: PAwV {pawv:.4}, PA {pa:.4}, IAC {iac:.4}");
    if pawv < pa && pa < 1.15 * iac {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        for &k in &idx[i..=j] {
            r[k] = (i + j) as f64 / 2.0 + 1.0;
        }
        i = j + 1;
    }
    r
}

fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn scaling_trend(instance: &ProblemInstance) -> Outcome {
    if !full_run() {
        return Outcome::Skip("long run; set ACS_ACCEPTANCE_FULL=1".into());
    }
    let counts = [1usize, 2, 4, 8, 16, 32, 64];
    let means: Vec<f64> = counts
        .iter()
        .map(|&n| mean_iterations_to(instance, Architecture::Pa, n, 99.5, 768_000 / n).0)
        .collect();
    let x: Vec<f64> = counts.iter().map(|&n| n as f64).collect();
    let rho = spearman(&x, &means);
    let detail = format!("Spearman {rho:.3} (need <= -0.8); mean iterations {means:?}");
    if rho <= -0.8 {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn report(label: &str, outcome: &Outcome) {
    let (tag, detail) = match outcome {
        Outcome::Pass(d) => ("PASS", d),
        Outcome::Fail(d) => ("FAIL", d),
        Outcome::Skip(d) => ("SKIP", d),
    };
    println!("criterion {label}: {tag} - {detail}");
}

fn main() -> ExitCode {
    let mut results: Vec<(String, Outcome)> = Vec::new();
    let mut record = |label: &str, o: Outcome| {
        report(label, &o);
        results.push((label.to_string(), o));
    };
    record("1", oracle_equivalence());
    record("2", constraint_validity());
    record("3", selection_semantics());
    record("4", pa_pawv_equivalence());
    record("5", schedule_independence());
    match dataset() {
        Ok(instance) => {
            for (label, o) in convergence_reproduction(&instance) {
                record(label, o);
            }
            record("7", timing_ordering(&instance));
            record("8", scaling_trend(&instance));
        }
        Err(why) => {
            for label in ["6", "7", "8"] {
                record(label, Outcome::Skip(why.clone()));
            }
        }
    }
    let failed = results.iter().filter(|(_, o)| matches!(o, Outcome::Fail(_))).count();
    println!("{failed} criteria failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
