//! Synthetic instances and reference oracles.

mod brute;
mod gen;
mod gof;

pub use brute::{brute_force_optimum, OracleError, ReferenceEvaluator, MAX_SEARCH_SPACE};
pub use gen::{generate_instance, random_instance, random_spec, GenError, GenSpec, GEN_ATTEMPTS};
pub use gof::{chi_square_p_value, roulette_gof_test};
