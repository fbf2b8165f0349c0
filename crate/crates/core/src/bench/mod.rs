//! Experiment protocol: convergence matrices, iterations-to-quality tables
//! and per-iteration timing.
//!
//! A convergence cell is one (architecture, instance count) pair run
//! `repeats` times with the iteration cap `budget / (instances × ants)`.
//! Each run keeps its best-so-far cost every `checkpoint_stride`
//! iterations; tables are derived from those raw traces, so they can be
//! recomputed later with another best-known cost or reach policy.

mod config;
mod report;

pub use config::{ArchSpec, ExperimentConfig};
pub use report::{emit_report, emit_timing, read_traces, write_traces, Report, RunMeta};

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use crate::cost::proximity;
use crate::instance::{load_instance_with, ColumnMapping, InstanceError, ProblemInstance};
use crate::parallel::{run, RunConfig, RunError};
use crate::rng::derive_seed;

#[derive(Debug)]
pub enum BenchError {
    Config(String),
    Data(InstanceError),
    /// A run failed; `completed` holds every trace finished before it.
    RunFailed {
        cell: String,
        source: RunError,
        completed: Vec<RunTrace>,
    },
    Io(std::io::Error),
}

impl fmt::Display for BenchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchError::Config(m) => write!(f, "configuration error: {m}"),
            BenchError::Data(e) => write!(f, "data error: {e}"),
            BenchError::RunFailed { cell, source, .. } => write!(f, "run {cell} failed: {source}"),
            BenchError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for BenchError {}

impl From<std::io::Error> for BenchError {
    fn from(e: std::io::Error) -> Self {
        BenchError::Io(e)
    }
}

impl From<InstanceError> for BenchError {
    fn from(e: InstanceError) -> Self {
        BenchError::Data(e)
    }
}

/// Best-so-far trace of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub architecture: ArchSpec,
    pub instances: usize,
    pub repeat: usize,
    pub seed: u64,
    /// `(iteration, best cost so far)`.
    pub points: Vec<(usize, f64)>,
}

/// Seed of one repeat in one cell; every cell is seeded independently.
pub fn cell_seed(master: u64, arch: ArchSpec, instances: usize, repeat: usize) -> u64 {
    derive_seed(&[
        master,
        arch.architecture as u64,
        arch.ants as u64,
        instances as u64,
        repeat as u64,
    ])
}

fn run_config(config: &ExperimentConfig, arch: ArchSpec, instances: usize, seed: u64) -> RunConfig {
    let mut rc = RunConfig::new(arch.architecture, instances);
    rc.ants_per_instance = arch.ants;
    rc.solution_budget = config.solution_budget;
    rc.master_seed = seed;
    rc.precision = config.precision;
    rc.checkpoint_stride = config.checkpoint_stride;
    rc.max_iterations = config.max_iterations;
    rc.workers = config.workers;
    rc.equivalence_mode = config.equivalence_mode;
    rc.acs = config.acs;
    rc
}

/// Loads the configured dataset (through the mapping file, if any).
pub fn load_dataset(config: &ExperimentConfig) -> Result<ProblemInstance, BenchError> {
    let mapping = match &config.mapping_file {
        Some(p) => ColumnMapping::from_file(p)
            .map_err(|e| BenchError::Config(format!("{}: {e}", p.display())))?,
        None => ColumnMapping::default(),
    };
    if !config.data_dir.is_dir() {
        return Err(BenchError::Data(InstanceError::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("dataset directory {} not found", config.data_dir.display()),
        ))));
    }
    let instance = load_instance_with(&config.data_dir, &mapping)?;
    Ok(instance.with_best_known(config.best_known_cost))
}

/// Runs the whole convergence protocol on the configured dataset. On a
/// failed run, the traces finished so far are written to `output_dir`
/// before the error is returned.
pub fn run_matrix(config: &ExperimentConfig) -> Result<Vec<RunTrace>, BenchError> {
    config.validate()?;
    let instance = load_dataset(config)?;
    match run_matrix_on(config, &instance) {
        Err(BenchError::RunFailed {
            cell,
            source,
            completed,
        }) => {
            std::fs::create_dir_all(&config.output_dir)?;
            write_traces(&completed, &config.output_dir.join("traces.csv"))?;
            Err(BenchError::RunFailed {
                cell,
                source,
                completed,
            })
        }
        other => other,
    }
}

/// Convergence protocol over an already loaded instance. Cells run one at
/// a time unless `config.jobs > 1`.
pub fn run_matrix_on(config: &ExperimentConfig, instance: &ProblemInstance) -> Result<Vec<RunTrace>, BenchError> {
    config.validate()?;
    let mut jobs = Vec::new();
    for &arch in &config.architectures {
        for &n in &config.instance_counts {
            for repeat in 0..config.repeats {
                jobs.push((arch, n, repeat));
            }
        }
    }
    let one = |&(arch, n, repeat): &(ArchSpec, usize, usize)| {
        let seed = cell_seed(config.master_seed, arch, n, repeat);
        let rc = run_config(config, arch, n, seed);
        run(&rc, instance)
            .map(|r| RunTrace {
                architecture: arch,
                instances: n,
                repeat,
                seed,
                points: r.convergence,
            })
            .map_err(|e| (format!("{arch}/{n}/#{repeat}"), e))
    };
    let results: Vec<_> = if config.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| BenchError::Config(e.to_string()))?;
        pool.install(|| jobs.par_iter().map(one).collect())
    } else {
        let mut out = Vec::new();
        for job in &jobs {
            let r = one(job);
            let failed = r.is_err();
            out.push(r);
            if failed {
                break;
            }
        }
        out
    };
    let mut completed = Vec::with_capacity(results.len());
    let mut failure = None;
    for r in results {
        match r {
            Ok(t) => completed.push(t),
            Err(e) if failure.is_none() => failure = Some(e),
            Err(_) => {}
        }
    }
    match failure {
        Some((cell, source)) => Err(BenchError::RunFailed {
            cell,
            source,
            completed,
        }),
        None => Ok(completed),
    }
}

/// Mean proximity per (architecture, instance count, iteration).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceMatrix {
    pub cells: BTreeMap<(ArchSpec, usize, usize), f64>,
    /// Runs averaged per (architecture, instance count).
    pub repeats: BTreeMap<(ArchSpec, usize), usize>,
    pub best_known_cost: f64,
}

impl ConvergenceMatrix {
    pub fn get(&self, arch: ArchSpec, instances: usize, iteration: usize) -> Option<f64> {
        self.cells.get(&(arch, instances, iteration)).copied()
    }

    /// Iterations present for one column, ascending.
    pub fn column(&self, arch: ArchSpec, instances: usize) -> Vec<(usize, f64)> {
        self.cells
            .range((arch, instances, 0)..=(arch, instances, usize::MAX))
            .map(|(&(_, _, it), &v)| (it, v))
            .collect()
    }
}

fn trace_proximity(best_known: f64, cost: f64) -> f64 {
    proximity(best_known, cost).unwrap_or(0.0)
}

pub fn convergence_matrix(traces: &[RunTrace], best_known: f64) -> ConvergenceMatrix {
    let mut sums: BTreeMap<(ArchSpec, usize, usize), (f64, usize)> = BTreeMap::new();
    let mut repeats: BTreeMap<(ArchSpec, usize), usize> = BTreeMap::new();
    for t in traces {
        *repeats.entry((t.architecture, t.instances)).or_default() += 1;
        for &(it, cost) in &t.points {
            let e = sums.entry((t.architecture, t.instances, it)).or_default();
            e.0 += trace_proximity(best_known, cost);
            e.1 += 1;
        }
    }
    ConvergenceMatrix {
        cells: sums.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect(),
        repeats,
        best_known_cost: best_known,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointCell {
    /// Mean iterations over the runs that reached the threshold; `None`
    /// when too few runs reached it.
    pub mean_iterations: Option<f64>,
    pub reached: usize,
    pub runs: usize,
}

/// Iterations needed to reach each proximity threshold.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CheckpointTable {
    pub checkpoints: Vec<f64>,
    /// Keyed by (architecture, checkpoint index, instance count).
    pub cells: BTreeMap<(ArchSpec, usize, usize), CheckpointCell>,
}

impl CheckpointTable {
    pub fn get(&self, arch: ArchSpec, checkpoint: f64, instances: usize) -> Option<CheckpointCell> {
        let idx = self.checkpoints.iter().position(|&c| c == checkpoint)?;
        self.cells.get(&(arch, idx, instances)).copied()
    }
}

/// First recorded iteration at which a trace reaches `threshold` percent.
pub fn first_reaching(trace: &RunTrace, best_known: f64, threshold: f64) -> Option<usize> {
    trace
        .points
        .iter()
        .find(|&&(_, cost)| trace_proximity(best_known, cost) >= threshold)
        .map(|&(it, _)| it)
}

/// Builds the table from raw traces. A cell is reported when at least
/// `ceil(min_reach_fraction × runs)` runs (and at least one) reach the
/// threshold.
pub fn checkpoint_iterations(
    traces: &[RunTrace],
    checkpoints: &[f64],
    best_known: f64,
    min_reach_fraction: f64,
) -> CheckpointTable {
    let mut groups: BTreeMap<(ArchSpec, usize), Vec<&RunTrace>> = BTreeMap::new();
    for t in traces {
        groups.entry((t.architecture, t.instances)).or_default().push(t);
    }
    let mut cells = BTreeMap::new();
    for ((arch, n), runs) in groups {
        let needed = ((min_reach_fraction * runs.len() as f64).ceil() as usize).max(1);
        for (ci, &threshold) in checkpoints.iter().enumerate() {
            let hits: Vec<usize> = runs
                .iter()
                .filter_map(|t| first_reaching(t, best_known, threshold))
                .collect();
            let mean = (hits.len() >= needed)
                .then(|| hits.iter().sum::<usize>() as f64 / hits.len() as f64);
            cells.insert(
                (arch, ci, n),
                CheckpointCell {
                    mean_iterations: mean,
                    reached: hits.len(),
                    runs: runs.len(),
                },
            );
        }
    }
    CheckpointTable {
        checkpoints: checkpoints.to_vec(),
        cells,
    }
}

/// Mean wall-clock seconds per iteration for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingRecord {
    pub architecture: ArchSpec,
    pub instances: usize,
    /// `(iterations, seconds)` per repeat.
    pub runs: Vec<(usize, f64)>,
    pub mean_seconds_per_iteration: f64,
}

/// Runs one configuration up to the timing iteration cap or time limit,
/// `timing_repeats` times. The window covers model allocation, the
/// iterations and teardown; the dataset is loaded beforehand.
pub fn timing_run(
    config: &ExperimentConfig,
    arch: ArchSpec,
    instances: usize,
    instance: &ProblemInstance,
) -> Result<TimingRecord, BenchError> {
    let mut runs = Vec::with_capacity(config.timing_repeats);
    for repeat in 0..config.timing_repeats {
        let seed = cell_seed(config.master_seed ^ 0x7131_u64, arch, instances, repeat);
        let mut rc = run_config(config, arch, instances, seed);
        rc.solution_budget = (config.timing_iteration_cap * instances * arch.ants) as u64;
        rc.max_iterations = Some(config.timing_iteration_cap);
        rc.time_limit_s = Some(config.timing_time_limit_s);
        rc.equivalence_mode = false;
        let start = std::time::Instant::now();
        let result = run(&rc, instance).map_err(|source| BenchError::RunFailed {
            cell: format!("timing {arch}/{instances}"),
            source,
            completed: Vec::new(),
        })?;
        runs.push((result.iterations_executed, start.elapsed().as_secs_f64()));
    }
    let mean = runs
        .iter()
        .map(|&(it, s)| s / it.max(1) as f64)
        .sum::<f64>()
        / runs.len().max(1) as f64;
    Ok(TimingRecord {
        architecture: arch,
        instances,
        runs,
        mean_seconds_per_iteration: mean,
    })
}

/// Timing grid over every configured architecture and instance count.
pub fn run_timing(config: &ExperimentConfig, instance: &ProblemInstance) -> Result<Vec<TimingRecord>, BenchError> {
    config.validate()?;
    let mut out = Vec::new();
    for &arch in &config.architectures {
        for &n in &config.instance_counts {
            out.push(timing_run(config, arch, n, instance)?);
        }
    }
    Ok(out)
}

/// Derives the full report from traces, recomputing proximities with
/// `config.best_known_cost`.
pub fn build_report(config: &ExperimentConfig, traces: Vec<RunTrace>, timing: Vec<TimingRecord>) -> Report {
    let matrix = convergence_matrix(&traces, config.best_known_cost);
    let table = checkpoint_iterations(
        &traces,
        &config.checkpoints,
        config.best_known_cost,
        config.min_reach_fraction,
    );
    Report {
        architectures: config.architectures.clone(),
        instance_counts: config.instance_counts.clone(),
        matrix,
        checkpoints: table,
        timing,
        traces,
        meta: RunMeta::from_config(config),
    }
}

/// Convenience for the CLI: run, build and emit in one go.
pub fn run_convergence_experiment(config: &ExperimentConfig) -> Result<Report, BenchError> {
    let traces = run_matrix(config)?;
    let report = build_report(config, traces, Vec::new());
    emit_report(&report, &config.output_dir)?;
    Ok(report)
}

pub fn run_timing_experiment(config: &ExperimentConfig) -> Result<Report, BenchError> {
    let instance = load_dataset(config)?;
    let timing = run_timing(config, &instance)?;
    let report = build_report(config, Vec::new(), timing);
    emit_timing(&report, &config.output_dir)?;
    Ok(report)
}

/// Rebuilds tables from a `traces.csv` written by an earlier run.
pub fn rebuild_report(config: &ExperimentConfig, traces_csv: &Path) -> Result<Report, BenchError> {
    let traces = read_traces(traces_csv)?;
    let mut config = config.clone();
    if config.architectures.is_empty() {
        let mut archs: Vec<ArchSpec> = traces.iter().map(|t| t.architecture).collect();
        archs.sort();
        archs.dedup();
        config.architectures = archs;
    }
    let mut counts: Vec<usize> = traces.iter().map(|t| t.instances).collect();
    counts.extend(&config.instance_counts);
    counts.sort_unstable();
    counts.dedup();
    config.instance_counts = counts;
    Ok(build_report(&config, traces, Vec::new()))
}
