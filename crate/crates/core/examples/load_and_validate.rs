//! Loads a dataset directory, prints its shape and any lint findings.
//!
//!     cargo run --example load_and_validate -- [data-dir] [mapping-file]

use std::path::PathBuf;

use acs_supply::instance::{load_instance_with, validate_instance, ColumnMapping};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/small"));
    let mapping = match args.next() {
        Some(p) => ColumnMapping::from_file(p.as_ref())?,
        None => ColumnMapping::default(),
    };

    let instance = load_instance_with(&dir, &mapping)?;
    println!("orders        {}", instance.n_orders());
    println!("warehouses    {}", instance.warehouses.len());
    println!("lanes         {}", instance.lanes.len());
    println!("route options {}", instance.total_route_options());
    println!("origin ports  {:?}", instance.origin_ports());
    let widest = instance.route_options.iter().map(Vec::len).max().unwrap_or(0);
    println!("widest order  {widest} options");
    println!("search space  {}", instance.search_space());

    let issues = validate_instance(&instance);
    if issues.is_empty() {
        println!("no issues");
    }
    for issue in issues {
        println!("issue: {issue}");
    }
    Ok(())
}
