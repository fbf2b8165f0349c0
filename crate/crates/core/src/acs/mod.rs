//! Ant Colony System core shared by every parallel architecture.
//!
//! Trails live per (order, route option). An ant walks the orders in
//! dataset order, masks options that would break a warehouse's daily limit
//! or a line's weight limit, and picks with the pseudo-random-proportional
//! rule. Reinforcement is best-only.

mod construct;

pub use construct::{
    construct_ant, construct_solution, greedy_solution, greedy_solution_in, select_route,
    select_route_with, AntSolution, ConstructionState, LocalUpdate, Scratch, Selector,
    MAX_DEAD_ENDS,
};

use std::fmt;

use crate::cost::CostError;
use crate::instance::{Order, ProblemInstance, RouteOption};
use crate::real::Real;

/// Added to order weights so zero-weight orders stay selectable.
pub const HEURISTIC_EPSILON_KG: f64 = 1e-6;

/// How the weight/gap ratio is oriented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeuristicForm {
    /// `(w + ε) / F`
    #[default]
    WeightOverGap,
    /// `F / (w + ε)`
    GapOverWeight,
}

/// Which solution feeds the global update each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reinforcement {
    IterationBest,
    #[default]
    BestSoFar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcsParams {
    pub evaporation_rho: f64,
    pub alpha: f64,
    pub beta: f64,
    pub q0: f64,
    /// Initial trail. `None` derives `1 / l` from the instance.
    pub tau0: Option<f64>,
    /// Multiplies the normalized deposit `greedy_cost / best_cost`.
    pub deposit_scale: f64,
    pub heuristic: HeuristicForm,
    pub reinforcement: Reinforcement,
}

impl Default for AcsParams {
    fn default() -> Self {
        Self {
            evaporation_rho: 0.1,
            alpha: 1.0,
            beta: 8.0,
            q0: 0.9,
            tau0: None,
            deposit_scale: 1.0,
            heuristic: HeuristicForm::WeightOverGap,
            reinforcement: Reinforcement::BestSoFar,
        }
    }
}

impl AcsParams {
    pub fn validate(&self) -> Result<(), AcsError> {
        let bad = |m: &str| Err(AcsError::InvalidParams(m.to_string()));
        if !(self.evaporation_rho > 0.0 && self.evaporation_rho < 1.0) {
            return bad("evaporation rate must lie in (0, 1)");
        }
        if !(self.alpha >= 0.0 && self.beta >= 0.0) {
            return bad("alpha and beta must be non-negative");
        }
        if !(0.0..=1.0).contains(&self.q0) {
            return bad("q0 must lie in [0, 1]");
        }
        if let Some(t) = self.tau0 {
            if !(t > 0.0 && t.is_finite()) {
                return bad("tau0 must be positive");
            }
        }
        if !(self.deposit_scale > 0.0 && self.deposit_scale.is_finite()) {
            return bad("deposit scale must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AcsError {
    InvalidParams(String),
    DeadEnd { order_id: String },
    ConstructionStuck { order_id: String, attempts: usize },
    Cost(CostError),
}

impl fmt::Display for AcsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcsError::InvalidParams(m) => write!(f, "invalid ACS parameters: {m}"),
            AcsError::DeadEnd { order_id } => {
                write!(f, "every route option of order {order_id} is masked")
            }
            AcsError::ConstructionStuck { order_id, attempts } => write!(
                f,
                "construction hit {attempts} consecutive dead ends (last at order {order_id})"
            ),
            AcsError::Cost(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for AcsError {}

impl From<CostError> for AcsError {
    fn from(e: CostError) -> Self {
        AcsError::Cost(e)
    }
}

/// Static desirability of `option` for `order`. Options without a lane
/// (customer-arranged freight) score 1.
pub fn heuristic_value(
    instance: &ProblemInstance,
    order: &Order,
    option: &RouteOption,
    form: HeuristicForm,
) -> f64 {
    let Some(lane) = option.lane else {
        return 1.0;
    };
    let gap = instance.lane(lane).max_upper_kg;
    let weight = order.weight_kg + HEURISTIC_EPSILON_KG;
    match form {
        HeuristicForm::WeightOverGap => weight / gap,
        HeuristicForm::GapOverWeight => gap / weight,
    }
}

/// Per-order rows packed into one buffer, shaped like the route options.
#[derive(Debug, Clone, PartialEq)]
pub struct Ragged<T> {
    values: Vec<T>,
    offsets: Vec<usize>,
}

impl<T: Copy> Ragged<T> {
    pub fn from_rows<I, R>(rows: I) -> Self
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = T>,
    {
        let mut values = Vec::new();
        let mut offsets = vec![0];
        for row in rows {
            values.extend(row);
            offsets.push(values.len());
        }
        Self { values, offsets }
    }

    #[inline]
    pub fn row(&self, k: usize) -> &[T] {
        &self.values[self.offsets[k]..self.offsets[k + 1]]
    }

    #[inline]
    pub fn get(&self, k: usize, r: usize) -> T {
        self.values[self.offsets[k] + r]
    }

    #[inline]
    pub fn set(&mut self, k: usize, r: usize, v: T) {
        self.values[self.offsets[k] + r] = v;
    }

    pub fn rows(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// Global trail matrix plus cached heuristic terms.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneModel<T> {
    pub tau: Ragged<T>,
    /// Raw heuristic values.
    pub eta: Ragged<f64>,
    /// `(eta / max_r eta)^beta` per order, floored at the smallest normal
    /// value. Row-wise scaling leaves selection unchanged and keeps
    /// single-precision choice values away from underflow.
    pub eta_pow: Ragged<T>,
    pub params: AcsParams,
    pub tau0: T,
    pub greedy_cost: f64,
}

/// Builds the model: uniform trails, cached heuristics and the greedy
/// baseline used to normalize deposits.
pub fn init_model<T: Real>(
    instance: &ProblemInstance,
    params: AcsParams,
) -> Result<PheromoneModel<T>, AcsError> {
    params.validate()?;
    let tau0 = params
        .tau0
        .unwrap_or_else(|| 1.0 / instance.n_orders().max(1) as f64);
    let eta = Ragged::from_rows(instance.route_options.iter().enumerate().map(|(k, opts)| {
        let order = &instance.orders[k];
        opts.iter()
            .map(move |o| heuristic_value(instance, order, o, params.heuristic))
    }));
    let eta_pow = Ragged::from_rows((0..eta.rows()).map(|k| {
        let row = eta.row(k);
        let max = row.iter().copied().fold(0.0_f64, f64::max);
        row.iter()
            .map(move |&e| {
                let scaled = (e / max).powf(params.beta);
                T::of(scaled).max(T::min_positive_value())
            })
            .collect::<Vec<_>>()
    }));
    let tau = Ragged::from_rows(
        instance
            .route_options
            .iter()
            .map(|opts| std::iter::repeat_n(T::of(tau0), opts.len())),
    );
    let greedy = greedy_solution_in::<T>(instance, params)?;
    Ok(PheromoneModel {
        tau,
        eta,
        eta_pow,
        params,
        tau0: T::of(tau0),
        greedy_cost: greedy.cost.total,
    })
}

/// ACS local decay of one trail toward `tau0`.
#[inline]
pub fn local_pheromone_update<T: Real>(tau_old: T, rho: T, tau0: T) -> T {
    (T::one() - rho) * tau_old + rho * tau0
}

impl<T: Real> PheromoneModel<T> {
    /// Deposit used by the global update for a solution of cost `cost`.
    pub fn deposit(&self, cost: f64) -> T {
        let scale = self.params.deposit_scale;
        if cost > 0.0 && self.greedy_cost > 0.0 {
            T::of(scale * self.greedy_cost / cost)
        } else {
            T::of(scale)
        }
    }

    /// Best-only reinforcement: `tau ← (1−ρ)·tau + ρ·Δ` on the options of
    /// `best`; every other trail is left untouched.
    pub fn global_update(&mut self, best: &AntSolution) {
        let rho = T::of(self.params.evaporation_rho);
        let delta = self.deposit(best.cost.total);
        for (k, &r) in best.assignment.choices.iter().enumerate() {
            let old = self.tau.get(k, r);
            self.tau.set(k, r, (T::one() - rho) * old + rho * delta);
        }
    }
}

/// Free-function form of [`PheromoneModel::global_update`].
pub fn global_pheromone_update<T: Real>(model: &mut PheromoneModel<T>, best: &AntSolution) {
    model.global_update(best);
}
