//! Builds a handful of ants against a fresh trail matrix, then applies one
//! global update and shows how the trails moved.

use std::path::PathBuf;

use acs_supply::acs::{construct_ant, init_model, Scratch, Selector};
use acs_supply::rng::AntKey;
use acs_supply::{load_instance, AcsParams, PheromoneModel};

fn main() -> anyhow::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/small");
    let instance = load_instance(&dir)?;
    let mut model: PheromoneModel<f64> = init_model(&instance, AcsParams::default())?;
    println!("tau0 {:.4}, greedy cost {:.4}", model.tau0, model.greedy_cost);

    let mut scratch = Scratch::default();
    let mut best = None;
    for ant in 0..8 {
        let key = AntKey::new(42, 0, 0, ant);
        let scalar = construct_ant(&model, &instance, key, Selector::Scalar, &mut scratch)?;
        let vectorized = construct_ant(
            &model,
            &instance,
            key,
            Selector::Vectorized {
                width: 8,
                exact_scan: true,
            },
            &mut scratch,
        )?;
        assert_eq!(scalar.assignment, vectorized.assignment);
        println!("ant {ant}: cost {:.4}", scalar.cost.total);
        if best.as_ref().is_none_or(|b: &acs_supply::AntSolution| scalar.cost.total < b.cost.total) {
            best = Some(scalar);
        }
    }

    let best = best.expect("eight ants");
    let before = model.tau.values().iter().sum::<f64>();
    model.global_update(&best);
    let after = model.tau.values().iter().sum::<f64>();
    println!(
        "deposit {:.4}; trail mass {before:.4} -> {after:.4} on {} reinforced entries",
        model.deposit(best.cost.total),
        best.assignment.len()
    );
    Ok(())
}
