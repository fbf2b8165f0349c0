use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{ArchSpec, BenchError, CheckpointTable, ConvergenceMatrix, ExperimentConfig, RunTrace, TimingRecord};

/// Seeds, config hash and host description written next to the tables.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub config_hash: String,
    pub precision: String,
    pub master_seed: u64,
    pub solution_budget: u64,
    pub best_known_cost: f64,
    pub min_reach_fraction: f64,
}

impl RunMeta {
    pub fn from_config(config: &ExperimentConfig) -> Self {
        let digest = Sha256::digest(config.canonical().as_bytes());
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Self {
            config_hash,
            precision: config.precision.as_str().to_string(),
            master_seed: config.master_seed,
            solution_budget: config.solution_budget,
            best_known_cost: config.best_known_cost,
            min_reach_fraction: config.min_reach_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub architectures: Vec<ArchSpec>,
    pub instance_counts: Vec<usize>,
    pub matrix: ConvergenceMatrix,
    pub checkpoints: CheckpointTable,
    pub timing: Vec<TimingRecord>,
    pub traces: Vec<RunTrace>,
    pub meta: RunMeta,
}

fn csv_err(e: csv::Error) -> BenchError {
    BenchError::Io(std::io::Error::other(e))
}

fn header(first: &[&str], counts: &[usize]) -> Vec<String> {
    first
        .iter()
        .map(|s| s.to_string())
        .chain(counts.iter().map(|n| n.to_string()))
        .collect()
}

fn write_matrix(report: &Report, path: &Path) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header(&["architecture", "iteration"], &report.instance_counts))
        .map_err(csv_err)?;
    for &arch in &report.architectures {
        let mut iterations: Vec<usize> = report
            .instance_counts
            .iter()
            .flat_map(|&n| report.matrix.column(arch, n))
            .map(|(it, _)| it)
            .collect();
        iterations.sort_unstable();
        iterations.dedup();
        for it in iterations {
            let mut row = vec![arch.to_string(), it.to_string()];
            for &n in &report.instance_counts {
                row.push(
                    report
                        .matrix
                        .get(arch, n, it)
                        .map(|p| format!("{p:.4}"))
                        .unwrap_or_default(),
                );
            }
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_checkpoints(report: &Report, path: &Path) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header(&["architecture", "checkpoint"], &report.instance_counts))
        .map_err(csv_err)?;
    for &arch in &report.architectures {
        for (ci, &c) in report.checkpoints.checkpoints.iter().enumerate() {
            let mut row = vec![arch.to_string(), format!("{c:.2}")];
            for &n in &report.instance_counts {
                let cell = report.checkpoints.cells.get(&(arch, ci, n));
                row.push(
                    cell.and_then(|c| c.mean_iterations)
                        .map(|m| format!("{m:.1}"))
                        .unwrap_or_default(),
                );
            }
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_timing(report: &Report, path: &Path) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header(&["architecture"], &report.instance_counts))
        .map_err(csv_err)?;
    let by_cell: BTreeMap<(ArchSpec, usize), f64> = report
        .timing
        .iter()
        .map(|t| ((t.architecture, t.instances), t.mean_seconds_per_iteration))
        .collect();
    for &arch in &report.architectures {
        if !by_cell.keys().any(|(a, _)| *a == arch) {
            continue;
        }
        let mut row = vec![arch.to_string()];
        for &n in &report.instance_counts {
            row.push(by_cell.get(&(arch, n)).map(|s| format!("{s:.6}")).unwrap_or_default());
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Raw per-run traces, one row per recorded point. Costs use the shortest
/// representation that parses back to the same value.
pub fn write_traces(traces: &[RunTrace], path: &Path) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["architecture", "instances", "repeat", "seed", "iteration", "best_cost"])
        .map_err(csv_err)?;
    for t in traces {
        for &(it, cost) in &t.points {
            w.write_record([
                t.architecture.to_string(),
                t.instances.to_string(),
                t.repeat.to_string(),
                t.seed.to_string(),
                it.to_string(),
                cost.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_traces(path: &Path) -> Result<Vec<RunTrace>, BenchError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut out: Vec<RunTrace> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let field = |i: usize| rec.get(i).unwrap_or("").trim();
        let bad = |what: &str| BenchError::Config(format!("{}: row {}: bad {what}", path.display(), line + 2));
        let architecture: ArchSpec = field(0).parse().map_err(|_| bad("architecture"))?;
        let instances: usize = field(1).parse().map_err(|_| bad("instances"))?;
        let repeat: usize = field(2).parse().map_err(|_| bad("repeat"))?;
        let seed: u64 = field(3).parse().map_err(|_| bad("seed"))?;
        let iteration: usize = field(4).parse().map_err(|_| bad("iteration"))?;
        let cost: f64 = field(5).parse().map_err(|_| bad("best_cost"))?;
        match out.last_mut() {
            Some(t)
                if t.architecture == architecture
                    && t.instances == instances
                    && t.repeat == repeat
                    && t.seed == seed =>
            {
                t.points.push((iteration, cost))
            }
            _ => out.push(RunTrace {
                architecture,
                instances,
                repeat,
                seed,
                points: vec![(iteration, cost)],
            }),
        }
    }
    Ok(out)
}

fn host_info() -> Vec<(String, String)> {
    let host = fs::read_to_string("/etc/hostname")
        .ok()
        .map(|s| s.trim().to_string())
        .or_else(|| std::env::var("HOSTNAME").ok())
        .unwrap_or_else(|| "unknown".into());
    let cpus = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    vec![
        ("host".into(), host),
        ("os".into(), std::env::consts::OS.into()),
        ("arch".into(), std::env::consts::ARCH.into()),
        ("cpus".into(), cpus.to_string()),
    ]
}

fn write_meta(report: &Report, path: &Path) -> Result<(), BenchError> {
    let m = &report.meta;
    let mut text = String::new();
    text.push_str(&format!("config_hash = {}\n", m.config_hash));
    text.push_str(&format!("precision = {}\n", m.precision));
    text.push_str(&format!("master_seed = {}\n", m.master_seed));
    text.push_str(&format!("solution_budget = {}\n", m.solution_budget));
    text.push_str(&format!("best_known_cost = {}\n", m.best_known_cost));
    text.push_str(&format!("min_reach_fraction = {}\n", m.min_reach_fraction));
    for t in &report.traces {
        text.push_str(&format!(
            "seed.{}.{}.{} = {}\n",
            t.architecture, t.instances, t.repeat, t.seed
        ));
    }
    text.push_str("# host\n");
    for (k, v) in host_info() {
        text.push_str(&format!("{k} = {v}\n"));
    }
    fs::write(path, text)?;
    Ok(())
}

fn write_timing_runs(report: &Report, path: &Path) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["architecture", "instances", "repeat", "iterations", "seconds"])
        .map_err(csv_err)?;
    for t in &report.timing {
        for (i, &(it, s)) in t.runs.iter().enumerate() {
            w.write_record([
                t.architecture.to_string(),
                t.instances.to_string(),
                i.to_string(),
                it.to_string(),
                format!("{s:.6}"),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `convergence_matrix.csv`, `checkpoint_table.csv`, `timing.csv`,
/// `timing_runs.csv`, `traces.csv` and `run_meta.txt` into `dir`. Empty
/// parts produce header-only files.
pub fn emit_report(report: &Report, dir: &Path) -> Result<(), BenchError> {
    fs::create_dir_all(dir)?;
    write_matrix(report, &dir.join("convergence_matrix.csv"))?;
    write_checkpoints(report, &dir.join("checkpoint_table.csv"))?;
    write_timing(report, &dir.join("timing.csv"))?;
    write_timing_runs(report, &dir.join("timing_runs.csv"))?;
    write_traces(&report.traces, &dir.join("traces.csv"))?;
    write_meta(report, &dir.join("run_meta.txt"))?;
    Ok(())
}

/// Timing part only: `timing.csv`, `timing_runs.csv` and `timing_meta.txt`,
/// leaving convergence output in the same directory untouched.
pub fn emit_timing(report: &Report, dir: &Path) -> Result<(), BenchError> {
    fs::create_dir_all(dir)?;
    write_timing(report, &dir.join("timing.csv"))?;
    write_timing_runs(report, &dir.join("timing_runs.csv"))?;
    write_meta(report, &dir.join("timing_meta.txt"))?;
    Ok(())
}
