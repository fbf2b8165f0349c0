//! Seconds per iteration for each architecture over a few instance counts.

use std::path::PathBuf;

use acs_supply::bench::{run_timing, ArchSpec, ExperimentConfig};
use acs_supply::{load_instance, Architecture};

fn main() -> anyhow::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/small");
    let instance = load_instance(&dir)?;
    let config = ExperimentConfig {
        architectures: [Architecture::Iac, Architecture::Pa, Architecture::Pawv]
            .into_iter()
            .map(|a| ArchSpec::new(a, 1))
            .collect(),
        instance_counts: vec![1, 8, 64],
        timing_iteration_cap: 50,
        timing_time_limit_s: 30.0,
        ..ExperimentConfig::default()
    };
    for record in run_timing(&config, &instance)? {
        let iterations: usize = record.runs.iter().map(|r| r.0).sum();
        println!(
            "{:>5} x{:<4} {:>10.1} us/iter over {iterations} iterations",
            record.architecture.to_string(),
            record.instances,
            record.mean_seconds_per_iteration * 1e6
        );
    }
    Ok(())
}
