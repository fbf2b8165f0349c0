//! Runs IAC, PA and PAwV with the same budget and seed, in both precisions.
//!
//!     cargo run --release --example architectures -- [data-dir] [instances] [budget]

use std::path::PathBuf;

use acs_supply::{load_instance, run, Architecture, Precision, RunConfig};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/small"));
    let instances: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(8);
    let budget: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(8_000);
    let instance = load_instance(&dir)?;

    for precision in [Precision::Double, Precision::Single] {
        for arch in [Architecture::Iac, Architecture::Pa, Architecture::Pawv] {
            let mut config = RunConfig::new(arch, instances);
            config.solution_budget = budget;
            config.master_seed = 2024;
            config.precision = precision;
            let r = run(&config, &instance)?;
            println!(
                "{:>4} {}  best {:>12.4}  iterations {:>5}  {:.1} us/iter",
                arch.to_string(),
                precision.as_str(),
                r.best_solution.cost.total,
                r.iterations_executed,
                r.wall_time_per_iteration_s * 1e6,
            );
        }
    }
    Ok(())
}
