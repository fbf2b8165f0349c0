//! Compares PA against exhaustive search on small random instances.
//!
//!     cargo run --release --example brute_force_oracle -- [count] [seed]

use acs_supply::oracle::{brute_force_optimum, random_instance};
use acs_supply::{run, Architecture, RunConfig};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let count: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let mut hits = 0;
    for i in 0..count {
        let instance = random_instance(seed.wrapping_mul(1_000_003) + i, 100_000)?;
        let (assignment, optimum) = brute_force_optimum(&instance)?;

        let mut config = RunConfig::new(Architecture::Pa, 4);
        config.solution_budget = 4 * 200;
        config.master_seed = seed + i;
        config.workers = Some(1);
        let result = run(&config, &instance)?;
        let found = result.best_solution.cost.total;
        let ok = (found - optimum).abs() <= 1e-9 * optimum.abs().max(1.0);
        hits += ok as u64;
        println!(
            "#{i:<3} orders={} space={:<6} optimum={optimum:<12.4} acs={found:<12.4} {} {:?}",
            instance.n_orders(),
            instance.search_space(),
            if ok { "match" } else { "MISS" },
            assignment.choices,
        );
    }
    println!("{hits}/{count} matched the exhaustive optimum");
    Ok(())
}
