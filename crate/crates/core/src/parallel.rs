//! Parallel architectures.
//!
//! * IAC: independent colonies, each with its own trails; the best colony
//!   result is taken at the end.
//! * PA: one shared trail matrix; every iteration all instances build from
//!   the same snapshot, a barrier collects them, the iteration best is
//!   reduced and applied once as the global update.
//! * PAwV: PA with the per-order selection done by the lane-parallel
//!   kernels.
//!
//! Random streams are keyed by (instance, iteration, ant) and reductions
//! break ties by instance index, so a run is a pure function of its
//! configuration whatever the worker count.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;

use crate::acs::{
    construct_ant, init_model, AcsError, AcsParams, AntSolution, PheromoneModel, Reinforcement, Scratch,
    Selector,
};
use crate::cost::check_constraints;
use crate::instance::ProblemInstance;
use crate::real::{Precision, Real};
use crate::rng::AntKey;

pub use crate::kernels::{
    build_choice_vector, reduce_max_index, reduce_max_index_width, scan_roulette,
    scan_roulette_exact, AllMasked,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Architecture {
    Iac,
    Pa,
    Pawv,
}

impl Architecture {
    pub fn as_str(self) -> &'static str {
        match self {
            Architecture::Iac => "iac",
            Architecture::Pa => "pa",
            Architecture::Pawv => "pawv",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Architecture {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "iac" => Ok(Architecture::Iac),
            "pa" => Ok(Architecture::Pa),
            "pawv" => Ok(Architecture::Pawv),
            other => Err(format!("unknown architecture `{other}` (expected iac, pa or pawv)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub architecture: Architecture,
    pub parallel_instances: usize,
    /// Ants per instance per iteration; the instance candidate is the best
    /// of them.
    pub ants_per_instance: usize,
    /// Total solutions constructed across instances, ants and iterations.
    pub solution_budget: u64,
    pub master_seed: u64,
    pub precision: Precision,
    /// Best-so-far is recorded every `checkpoint_stride` iterations.
    pub checkpoint_stride: usize,
    pub time_limit_s: Option<f64>,
    /// Further cap on iterations below the budget-derived one.
    pub max_iterations: Option<usize>,
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
    /// PAwV keeps the scalar summation order so it matches PA exactly.
    pub equivalence_mode: bool,
    pub vector_width: usize,
    pub acs: AcsParams,
    /// Check every constructed solution against the constraints.
    pub audit: bool,
}

impl RunConfig {
    pub fn new(architecture: Architecture, parallel_instances: usize) -> Self {
        Self {
            architecture,
            parallel_instances,
            ants_per_instance: 1,
            solution_budget: 768_000,
            master_seed: 0,
            precision: Precision::Double,
            checkpoint_stride: 5,
            time_limit_s: None,
            max_iterations: None,
            workers: None,
            equivalence_mode: true,
            vector_width: crate::kernels::DEFAULT_WIDTH,
            acs: AcsParams::default(),
            audit: false,
        }
    }

    /// `budget / (instances × ants)`, floored, then capped by
    /// `max_iterations`.
    pub fn iteration_cap(&self) -> usize {
        let per_iter = (self.parallel_instances * self.ants_per_instance).max(1) as u64;
        let cap = (self.solution_budget / per_iter) as usize;
        self.max_iterations.map_or(cap, |m| cap.min(m))
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::Config(m));
        if self.parallel_instances == 0 || self.parallel_instances > u16::MAX as usize {
            return bad(format!("parallel instances must lie in 1..=65535, got {}", self.parallel_instances));
        }
        if self.ants_per_instance == 0 || self.ants_per_instance > u8::MAX as usize {
            return bad(format!("ants per instance must lie in 1..=255, got {}", self.ants_per_instance));
        }
        if self.checkpoint_stride == 0 {
            return bad("checkpoint stride must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("worker count must be at least 1".into());
        }
        if (self.parallel_instances * self.ants_per_instance) as u64 > self.solution_budget {
            return bad(format!(
                "budget {} is smaller than one iteration ({} instances × {} ants)",
                self.solution_budget, self.parallel_instances, self.ants_per_instance
            ));
        }
        self.acs.validate().map_err(RunError::Acs)
    }

    fn selector(&self) -> Selector {
        match self.architecture {
            Architecture::Pawv => Selector::Vectorized {
                width: self.vector_width,
                exact_scan: self.equivalence_mode,
            },
            _ => Selector::Scalar,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best_solution: AntSolution,
    /// `(iteration, best cost so far)` at every checkpoint stride.
    pub convergence: Vec<(usize, f64)>,
    pub iterations_executed: usize,
    pub wall_time_per_iteration_s: f64,
    /// Final best cost of each parallel instance.
    pub instance_bests: Vec<f64>,
    pub solutions_constructed: u64,
    /// Constraint violations found by the audit (0 when not auditing).
    pub audit_violations: usize,
}

impl RunResult {
    /// Equality of everything but timing.
    pub fn same_outcome(&self, other: &RunResult) -> bool {
        self.best_solution.assignment == other.best_solution.assignment
            && self.best_solution.cost == other.best_solution.cost
            && self.convergence == other.convergence
            && self.iterations_executed == other.iterations_executed
            && self.instance_bests == other.instance_bests
            && self.solutions_constructed == other.solutions_constructed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Config(String),
    Acs(AcsError),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::Acs(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<AcsError> for RunError {
    fn from(e: AcsError) -> Self {
        RunError::Acs(e)
    }
}

/// Lowest total cost; equal costs go to the lowest instance index, so the
/// result does not depend on arrival order.
pub fn reduce_best<I>(candidates: I) -> Option<(usize, AntSolution)>
where
    I: IntoIterator<Item = (usize, AntSolution)>,
{
    candidates.into_iter().fold(None, |acc, (i, sol)| match acc {
        None => Some((i, sol)),
        Some((j, best)) => {
            let better = sol.cost.total < best.cost.total
                || (sol.cost.total == best.cost.total && i < j);
            if better {
                Some((i, sol))
            } else {
                Some((j, best))
            }
        }
    })
}

/// Runs `config.architecture` on `instance`.
pub fn run(config: &RunConfig, instance: &ProblemInstance) -> Result<RunResult, RunError> {
    match config.architecture {
        Architecture::Iac => run_iac(config, instance),
        Architecture::Pa => run_pa(config, instance),
        Architecture::Pawv => run_pawv(config, instance),
    }
}

pub fn run_iac(config: &RunConfig, instance: &ProblemInstance) -> Result<RunResult, RunError> {
    expect_arch(config, Architecture::Iac)?;
    dispatch(config, instance, iac_impl::<f32>, iac_impl::<f64>)
}

pub fn run_pa(config: &RunConfig, instance: &ProblemInstance) -> Result<RunResult, RunError> {
    expect_arch(config, Architecture::Pa)?;
    dispatch(config, instance, shared_impl::<f32>, shared_impl::<f64>)
}

pub fn run_pawv(config: &RunConfig, instance: &ProblemInstance) -> Result<RunResult, RunError> {
    expect_arch(config, Architecture::Pawv)?;
    dispatch(config, instance, shared_impl::<f32>, shared_impl::<f64>)
}

fn expect_arch(config: &RunConfig, arch: Architecture) -> Result<(), RunError> {
    if config.architecture != arch {
        return Err(RunError::Config(format!(
            "configuration is for {}, not {arch}",
            config.architecture
        )));
    }
    Ok(())
}

type Impl = fn(&RunConfig, &ProblemInstance) -> Result<RunResult, RunError>;

fn dispatch(config: &RunConfig, instance: &ProblemInstance, single: Impl, double: Impl) -> Result<RunResult, RunError> {
    config.validate()?;
    let workers = config
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RunError::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match config.precision {
        Precision::Single => single(config, instance),
        Precision::Double => double(config, instance),
    })
}

/// Output of one instance for one iteration.
struct Candidate {
    best: AntSolution,
    violations: usize,
}

fn best_of_ants<T: Real>(
    model: &PheromoneModel<T>,
    instance: &ProblemInstance,
    config: &RunConfig,
    m: usize,
    iteration: usize,
    scratch: &mut Scratch<T>,
) -> Result<Candidate, AcsError> {
    let selector = config.selector();
    let mut best: Option<AntSolution> = None;
    let mut violations = 0;
    for a in 0..config.ants_per_instance {
        let key = AntKey::new(config.master_seed, m, iteration, a);
        let sol = construct_ant(model, instance, key, selector, scratch)?;
        if config.audit {
            violations += check_constraints(instance, &sol.assignment).len();
        }
        if best.as_ref().is_none_or(|b| sol.cost.total < b.cost.total) {
            best = Some(sol);
        }
    }
    Ok(Candidate {
        best: best.expect("at least one ant"),
        violations,
    })
}

fn timed_out(start: Instant, limit: Option<f64>) -> bool {
    limit.is_some_and(|l| start.elapsed().as_secs_f64() >= l)
}

fn shared_impl<T: Real>(config: &RunConfig, instance: &ProblemInstance) -> Result<RunResult, RunError> {
    let start = Instant::now();
    let cap = config.iteration_cap();
    let n = config.parallel_instances;
    let mut model = init_model::<T>(instance, config.acs)?;
    let mut best_so_far: Option<AntSolution> = None;
    let mut instance_bests = vec![f64::INFINITY; n];
    let mut convergence = Vec::new();
    let mut audit_violations = 0;
    let mut iterations = 0;

    for it in 0..cap {
        let snapshot = &model;
        let candidates: Vec<Candidate> = (0..n)
            .into_par_iter()
            .map_init(Scratch::default, |scratch, m| {
                best_of_ants(snapshot, instance, config, m, it, scratch)
            })
            .collect::<Result<_, _>>()?;

        for (m, c) in candidates.iter().enumerate() {
            instance_bests[m] = instance_bests[m].min(c.best.cost.total);
            audit_violations += c.violations;
        }
        let (_, iter_best) = reduce_best(candidates.into_iter().map(|c| c.best).enumerate())
            .expect("at least one instance");
        if best_so_far
            .as_ref()
            .is_none_or(|b| iter_best.cost.total < b.cost.total)
        {
            best_so_far = Some(iter_best.clone());
        }
        match config.acs.reinforcement {
            Reinforcement::IterationBest => model.global_update(&iter_best),
            Reinforcement::BestSoFar => model.global_update(best_so_far.as_ref().unwrap()),
        }
        iterations = it + 1;
        if iterations % config.checkpoint_stride == 0 {
            convergence.push((iterations, best_so_far.as_ref().unwrap().cost.total));
        }
        if timed_out(start, config.time_limit_s) {
            break;
        }
    }
    drop(model);
    let elapsed = start.elapsed().as_secs_f64();
    Ok(RunResult {
        best_solution: best_so_far.ok_or_else(|| RunError::Config("no iteration executed".into()))?,
        convergence,
        iterations_executed: iterations,
        wall_time_per_iteration_s: elapsed / iterations.max(1) as f64,
        instance_bests,
        solutions_constructed: (iterations * n * config.ants_per_instance) as u64,
        audit_violations,
    })
}

struct ColonyOutcome {
    best: AntSolution,
    trace: Vec<(usize, f64)>,
    iterations: usize,
    violations: usize,
}

fn iac_impl<T: Real>(config: &RunConfig, instance: &ProblemInstance) -> Result<RunResult, RunError> {
    let start = Instant::now();
    let cap = config.iteration_cap();
    let template = init_model::<T>(instance, config.acs)?;

    let colonies: Vec<ColonyOutcome> = (0..config.parallel_instances)
        .into_par_iter()
        .map(|m| -> Result<ColonyOutcome, AcsError> {
            let mut model = template.clone();
            let mut scratch = Scratch::default();
            let mut best: Option<AntSolution> = None;
            let mut trace = Vec::new();
            let mut violations = 0;
            let mut iterations = 0;
            for it in 0..cap {
                let c = best_of_ants(&model, instance, config, m, it, &mut scratch)?;
                violations += c.violations;
                if best.as_ref().is_none_or(|b| c.best.cost.total < b.cost.total) {
                    best = Some(c.best.clone());
                }
                match config.acs.reinforcement {
                    Reinforcement::IterationBest => model.global_update(&c.best),
                    Reinforcement::BestSoFar => model.global_update(best.as_ref().unwrap()),
                }
                iterations = it + 1;
                if iterations % config.checkpoint_stride == 0 {
                    trace.push((iterations, best.as_ref().unwrap().cost.total));
                }
                if timed_out(start, config.time_limit_s) {
                    break;
                }
            }
            Ok(ColonyOutcome {
                best: best.expect("iteration cap is at least one"),
                trace,
                iterations,
                violations,
            })
        })
        .collect::<Result<_, _>>()?;
    drop(template);

    // Cross-colony best at each checkpoint, reconstructed afterwards.
    let points = colonies.iter().map(|c| c.trace.len()).max().unwrap_or(0);
    let convergence = (0..points)
        .map(|p| {
            let mut iteration = 0;
            let mut cost = f64::INFINITY;
            for c in &colonies {
                let &(it, v) = c.trace.get(p).unwrap_or_else(|| c.trace.last().unwrap());
                iteration = iteration.max(it);
                cost = cost.min(v);
            }
            (iteration, cost)
        })
        .collect();
    let iterations = colonies.iter().map(|c| c.iterations).max().unwrap_or(0);
    let solutions = colonies.iter().map(|c| c.iterations as u64).sum::<u64>()
        * config.ants_per_instance as u64;
    let instance_bests = colonies.iter().map(|c| c.best.cost.total).collect();
    let audit_violations = colonies.iter().map(|c| c.violations).sum();
    let (_, best) = reduce_best(colonies.into_iter().map(|c| c.best).enumerate())
        .expect("at least one colony");
    let elapsed = start.elapsed().as_secs_f64();
    Ok(RunResult {
        best_solution: best,
        convergence,
        iterations_executed: iterations,
        wall_time_per_iteration_s: elapsed / iterations.max(1) as f64,
        instance_bests,
        solutions_constructed: solutions,
        audit_violations,
    })
}
