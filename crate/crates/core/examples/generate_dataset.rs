//! Writes a synthetic dataset in the seven-table CSV layout.
//!
//!     cargo run --example generate_dataset -- <out-dir> [orders] [seed]

use std::path::PathBuf;

use acs_supply::instance::write_instance;
use acs_supply::oracle::{generate_instance, GenSpec};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "synthetic".into()));
    let n_orders: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(40);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(11);

    let spec = GenSpec {
        n_orders,
        n_warehouses: 4,
        n_ports: 3,
        n_couriers: 3,
        n_bands_per_lane: 3,
        n_products: 5,
        n_customers: 6,
        capacity_range: (n_orders as u32 / 4 + 1, n_orders as u32 / 2 + 2),
        seed,
        ..GenSpec::default()
    };
    let instance = generate_instance(&spec)?;
    write_instance(&instance, &out)?;
    println!(
        "{} orders, {} warehouses, {} lanes, {} route options -> {}",
        instance.n_orders(),
        instance.warehouses.len(),
        instance.lanes.len(),
        instance.total_route_options(),
        out.display()
    );
    Ok(())
}
