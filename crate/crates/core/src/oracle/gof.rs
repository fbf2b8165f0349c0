use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Chi-square goodness-of-fit p-value of `n_draws` selections made by
/// `selector` against the distribution `weights / Σ weights`.
///
/// A selection of a zero-weight category yields 0; a single positive
/// category yields 1.
pub fn roulette_gof_test<F>(mut selector: F, weights: &[f64], n_draws: usize) -> f64
where
    F: FnMut(&[f64]) -> usize,
{
    let total: f64 = weights.iter().sum();
    assert!(total > 0.0, "weights must have positive mass");
    let mut observed = vec![0u64; weights.len()];
    for _ in 0..n_draws {
        observed[selector(weights)] += 1;
    }
    chi_square_p_value(&observed, weights)
}

/// p-value of observed counts against expected proportions.
pub fn chi_square_p_value(observed: &[u64], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    let n: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut categories = 0usize;
    for (&o, &w) in observed.iter().zip(weights) {
        if w <= 0.0 {
            if o > 0 {
                return 0.0;
            }
            continue;
        }
        categories += 1;
        let expected = n as f64 * w / total;
        stat += (o as f64 - expected).powi(2) / expected;
    }
    if categories <= 1 {
        return 1.0;
    }
    let dist = ChiSquared::new((categories - 1) as f64).expect("positive degrees of freedom");
    dist.sf(stat)
}
