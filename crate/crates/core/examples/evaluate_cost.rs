//! Prices the greedy assignment, shows the storage/transport split and
//! what the constraint checker reports when a warehouse is overloaded.

use std::path::PathBuf;

use acs_supply::acs::greedy_solution;
use acs_supply::cost::{check_constraints, solution_cost, solution_cost_in};
use acs_supply::{load_instance, AcsParams, Assignment};

fn main() -> anyhow::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/small");
    let instance = load_instance(&dir)?;

    let greedy = greedy_solution(&instance, AcsParams::default())?;
    let cost = solution_cost(&instance, &greedy.assignment)?;
    println!("greedy total     {:.4}", cost.total);
    println!("  storage        {:.4}", cost.warehouse_total);
    println!("  transport      {:.4}", cost.transport_total);

    let single = solution_cost_in::<f32>(&instance, &greedy.assignment, false)?;
    println!("single precision {:.4} (rel. diff {:.2e})", single.total, (single.total - cost.total).abs() / cost.total);

    let per_order = solution_cost_in::<f64>(&instance, &greedy.assignment, true)?;
    let mut top: Vec<(usize, f64)> = per_order
        .per_order
        .unwrap_or_default()
        .into_iter()
        .map(|(w, t)| w + t)
        .enumerate()
        .collect();
    top.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (k, c) in top.iter().take(3) {
        println!("  priciest order {} costs {c:.4}", instance.orders[*k].order_id);
    }

    // Send every order through its first option, ignoring the limits.
    let naive = Assignment::complete(vec![0; instance.n_orders()]);
    let violations = check_constraints(&instance, &naive);
    println!("first-option assignment: {} violation(s)", violations.len());
    for v in violations.iter().take(5) {
        println!("  {:?} on {} by {}", v.kind, v.subject, v.magnitude);
    }
    Ok(())
}
