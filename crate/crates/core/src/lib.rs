//! Parallel Ant Colony System for outbound supply-chain routing.
//!
//! Each customer order is assigned a warehouse and a freight lane so that
//! storage plus transport cost is minimal, subject to warehouse daily
//! limits, line weight limits, product support, customer restrictions and
//! port links.
//!
//! * [`instance`] loads the seven-table CSV dataset and enumerates route
//!   options.
//! * [`cost`] prices complete assignments and checks constraints.
//! * [`acs`] is the sequential colony: trails, heuristic, construction,
//!   updates.
//! * [`parallel`] runs the IAC, PA and PAwV architectures.
//! * [`bench`] reproduces convergence, checkpoint and timing experiments.
//! * [`oracle`] generates synthetic instances and holds reference oracles.

pub mod acs;
pub mod bench;
pub mod cost;
pub mod instance;
pub mod kernels;
pub mod oracle;
pub mod parallel;
pub mod real;
pub mod rng;

pub use acs::{AcsParams, AntSolution, PheromoneModel};
pub use cost::{Assignment, CostBreakdown};
pub use instance::{load_instance, ProblemInstance};
pub use parallel::{run, Architecture, RunConfig, RunResult};
pub use real::Precision;
