//! Compares the scalar and lane-parallel selection kernels and checks the
//! scan roulette's draw frequencies with a chi-square test.

use acs_supply::kernels::{
    build_choice_vector, reduce_max_index, scalar_argmax, scalar_roulette, scan_roulette,
    scan_roulette_exact,
};
use acs_supply::oracle::roulette_gof_test;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let tau = [0.2, 0.9, 0.4, 0.4, 0.1, 0.6];
    let eta = [1.0, 0.8, 0.95, 1.0, 0.7, 0.9];
    let mask = [1.0, 1.0, 0.0, 1.0, 1.0, 1.0];
    let values = build_choice_vector(&tau, &eta, &mask, 1.0, 8.0);
    println!("choice values {values:.4?}");
    println!("argmax scalar {} / reduced {}", scalar_argmax(&values), reduce_max_index(&values));

    for u in [0.05, 0.5, 0.95] {
        println!(
            "u = {u}: sequential {:?}, scan {:?}, exact scan {:?}",
            scalar_roulette(&values, u),
            scan_roulette(&values, u),
            scan_roulette_exact(&values, u)
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = roulette_gof_test(
        |w| scan_roulette(w, rng.random::<f64>()).unwrap(),
        &values,
        100_000,
    );
    println!("scan roulette goodness of fit p = {p:.4}");

    let mut agree = 0;
    for _ in 0..10_000 {
        let n = rng.random_range(1..64);
        let v: Vec<f64> = (0..n).map(|_| (rng.random_range(0..16) as f64) / 4.0).collect();
        agree += (reduce_max_index(&v) == scalar_argmax(&v)) as u32;
    }
    println!("reduced argmax agrees with scalar argmax on {agree}/10000 vectors");
}
