use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use acs_supply::bench::{self, BenchError, ExperimentConfig};
use acs_supply::instance::{load_instance_with, validate_instance, write_assignment, write_instance, ColumnMapping};
use acs_supply::oracle::{brute_force_optimum, generate_instance, GenSpec};
use acs_supply::{run, Architecture, Precision, ProblemInstance, RunConfig};

#[derive(Parser)]
#[command(name = "acs-supply", version, about = "Parallel ant colony solver for order-to-route assignment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One run on a dataset directory.
    Solve {
        #[arg(long)]
        data_dir: PathBuf,
        /// Header mapping file for non-canonical column names.
        #[arg(long)]
        mapping: Option<PathBuf>,
        #[arg(long, default_value = "pa")]
        arch: Architecture,
        #[arg(long, default_value_t = 1)]
        instances: usize,
        #[arg(long, default_value_t = 1)]
        ants: usize,
        #[arg(long, default_value_t = 768_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "f64")]
        precision: Precision,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        max_iterations: Option<usize>,
        /// Assignment CSV; the convergence trace goes next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Experiment protocol driven by a TOML config file.
    Bench {
        #[command(subcommand)]
        kind: BenchKind,
    },
    /// Recompute tables from a traces.csv written by `bench convergence`.
    Report {
        #[arg(long)]
        traces: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lint a dataset directory.
    Validate {
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long)]
        mapping: Option<PathBuf>,
    },
    /// Exhaustive optimum of a tiny instance (loaded or generated).
    Oracle {
        #[arg(long, conflicts_with = "gen_seed")]
        data_dir: Option<PathBuf>,
        /// Generate a synthetic instance instead of loading one.
        #[arg(long)]
        gen_seed: Option<u64>,
        #[arg(long, default_value_t = 3)]
        orders: usize,
        /// Write the generated instance as CSV tables here.
        #[arg(long)]
        write_instance: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BenchKind {
    Convergence { config: PathBuf },
    Timing { config: PathBuf },
}

enum Failure {
    Config(String),
    Data(String),
    Run(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Data(_) => 3,
            Failure::Run(_) => 4,
        }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Config(_) => Failure::Config(e.to_string()),
            BenchError::Data(_) => Failure::Data(e.to_string()),
            BenchError::RunFailed { .. } | BenchError::Io(_) => Failure::Run(e.to_string()),
        }
    }
}

fn load(data_dir: &Path, mapping: Option<&Path>) -> Result<ProblemInstance, Failure> {
    let mapping = match mapping {
        Some(p) => ColumnMapping::from_file(p).map_err(|e| Failure::Config(e.to_string()))?,
        None => ColumnMapping::default(),
    };
    load_instance_with(data_dir, &mapping).map_err(|e| Failure::Data(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Config(m) | Failure::Data(m) | Failure::Run(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve {
            data_dir,
            mapping,
            arch,
            instances,
            ants,
            budget,
            seed,
            precision,
            workers,
            max_iterations,
            out,
        } => {
            let mut config = RunConfig::new(arch, instances);
            config.ants_per_instance = ants;
            config.solution_budget = budget;
            config.master_seed = seed;
            config.precision = precision;
            config.workers = workers;
            config.max_iterations = max_iterations;
            config.validate().map_err(|e| Failure::Config(e.to_string()))?;
            let instance = load(&data_dir, mapping.as_deref())?;
            let result = run(&config, &instance).map_err(|e| Failure::Run(e.to_string()))?;
            let best = &result.best_solution;
            println!(
                "{arch} instances={instances} ants={ants} iterations={} total={:.2} warehouse={:.2} transport={:.2} s/iter={:.6}",
                result.iterations_executed,
                best.cost.total,
                best.cost.warehouse_total,
                best.cost.transport_total,
                result.wall_time_per_iteration_s,
            );
            if let Some(out) = out {
                write_assignment(&instance, &best.assignment.choices, &out)
                    .map_err(|e| Failure::Run(e.to_string()))?;
                let trace = out.with_extension("convergence.csv");
                let mut text = String::from("iteration,best_cost\n");
                for (it, c) in &result.convergence {
                    text.push_str(&format!("{it},{c}\n"));
                }
                std::fs::write(&trace, text).map_err(|e| Failure::Run(e.to_string()))?;
            }
            Ok(())
        }
        Command::Bench { kind } => {
            let (path, timing) = match kind {
                BenchKind::Convergence { config } => (config, false),
                BenchKind::Timing { config } => (config, true),
            };
            let config = ExperimentConfig::from_file(&path)?;
            let report = if timing {
                bench::run_timing_experiment(&config)?
            } else {
                bench::run_convergence_experiment(&config)?
            };
            println!(
                "{} runs, {} timing records written to {}",
                report.traces.len(),
                report.timing.len(),
                config.output_dir.display()
            );
            Ok(())
        }
        Command::Report { traces, config, out } => {
            let config = match config {
                Some(p) => ExperimentConfig::from_file(&p)?,
                None => ExperimentConfig {
                    architectures: Vec::new(),
                    instance_counts: Vec::new(),
                    ..ExperimentConfig::default()
                },
            };
            let report = bench::rebuild_report(&config, &traces)?;
            bench::emit_report(&report, &out)?;
            println!("{} traces re-tabulated into {}", report.traces.len(), out.display());
            Ok(())
        }
        Command::Validate { data_dir, mapping } => {
            let instance = load(&data_dir, mapping.as_deref())?;
            let issues = validate_instance(&instance);
            println!(
                "{} orders, {} warehouses, {} lanes, {} route options",
                instance.n_orders(),
                instance.warehouses.len(),
                instance.lanes.len(),
                instance.total_route_options()
            );
            for issue in &issues {
                println!("  {issue}");
            }
            if issues.is_empty() {
                println!("no issues");
                Ok(())
            } else {
                Err(Failure::Data(format!("{} issue(s) found", issues.len())))
            }
        }
        Command::Oracle {
            data_dir,
            gen_seed,
            orders,
            write_instance: dump,
        } => {
            let instance = match (data_dir, gen_seed) {
                (Some(dir), _) => load(&dir, None)?,
                (None, seed) => {
                    let spec = GenSpec {
                        n_orders: orders,
                        seed: seed.unwrap_or(0),
                        ..GenSpec::default()
                    };
                    generate_instance(&spec).map_err(|e| Failure::Config(e.to_string()))?
                }
            };
            if let Some(dir) = dump {
                write_instance(&instance, &dir).map_err(|e| Failure::Run(e.to_string()))?;
            }
            let (assignment, cost) = brute_force_optimum(&instance).map_err(|e| Failure::Run(e.to_string()))?;
            println!("search space {}", instance.search_space());
            println!("optimum {cost}");
            for (k, &r) in assignment.choices.iter().enumerate() {
                println!("  {} -> route {r}", instance.orders[k].order_id);
            }
            Ok(())
        }
    }
}
