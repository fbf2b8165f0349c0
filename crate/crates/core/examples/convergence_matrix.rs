//! Small convergence experiment: iterations vs parallel instances for PA,
//! plus the iterations needed to reach each proximity threshold.

use std::path::PathBuf;

use acs_supply::bench::{build_report, emit_report, run_matrix_on, ArchSpec, ExperimentConfig};
use acs_supply::{load_instance, Architecture};

fn main() -> anyhow::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/small");
    let instance = load_instance(&dir)?;
    // The sample is too large for exhaustive search; use a long PA run's
    // result as the reference instead.
    let reference = {
        let mut c = acs_supply::RunConfig::new(Architecture::Pa, 16);
        c.solution_budget = 64_000;
        acs_supply::run(&c, &instance)?.best_solution.cost.total
    };

    let config = ExperimentConfig {
        architectures: vec![
            ArchSpec::new(Architecture::Iac, 1),
            ArchSpec::new(Architecture::Pa, 1),
        ],
        instance_counts: vec![1, 2, 4, 8, 16],
        repeats: 5,
        solution_budget: 1_600,
        checkpoints: vec![95.0, 98.0, 99.0, 99.5],
        best_known_cost: reference,
        ..ExperimentConfig::default()
    };
    let traces = run_matrix_on(&config, &instance)?;
    let report = build_report(&config, traces, Vec::new());

    let arch = ArchSpec::new(Architecture::Pa, 1);
    println!("PA mean proximity (%) to {reference:.2}");
    print!("{:>6}", "iter");
    for n in &config.instance_counts {
        print!("{n:>9}");
    }
    println!();
    for it in [5, 25, 100, 400, 1600] {
        print!("{it:>6}");
        for &n in &config.instance_counts {
            match report.matrix.get(arch, n, it) {
                Some(p) => print!("{p:>9.3}"),
                None => print!("{:>9}", ""),
            }
        }
        println!();
    }
    for (ci, c) in config.checkpoints.iter().enumerate() {
        print!("{c:>5}%");
        for &n in &config.instance_counts {
            match report.checkpoints.cells.get(&(arch, ci, n)).and_then(|c| c.mean_iterations) {
                Some(m) => print!("{m:>9.1}"),
                None => print!("{:>9}", "-"),
            }
        }
        println!();
    }

    let out = std::env::temp_dir().join("acs-convergence-example");
    emit_report(&report, &out)?;
    println!("CSV tables in {}", out.display());
    Ok(())
}
