use super::{heuristic_value, local_pheromone_update, AcsError, AcsParams, PheromoneModel};
use crate::cost::{evaluate, Assignment, CostBreakdown, LineTotals};
use crate::instance::{ProblemInstance, RouteOption};
use crate::kernels::{self, choice_value, AllMasked};
use crate::real::Real;
use crate::rng::{AntKey, Uniform01};

/// Consecutive dead ends tolerated before a run gives up.
pub const MAX_DEAD_ENDS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct AntSolution {
    pub assignment: Assignment,
    pub cost: CostBreakdown,
    /// Stream that produced the solution; `None` for the greedy baseline.
    pub seed_trace: Option<AntKey>,
}

/// One ant-private trail decay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalUpdate<T> {
    pub order: u32,
    pub route: u32,
    pub tau: T,
}

/// Running warehouse counts and line weights while an ant builds a
/// solution. Warehouse counts never exceed capacity and line weights never
/// exceed the lane limit.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionState {
    pub warehouse_counts: Vec<u32>,
    pub line_weights: Vec<f64>,
    pub order_cursor: usize,
}

impl ConstructionState {
    pub fn new(instance: &ProblemInstance) -> Self {
        Self {
            warehouse_counts: vec![0; instance.warehouses.len()],
            line_weights: vec![0.0; instance.lanes.len()],
            order_cursor: 0,
        }
    }

    fn reset(&mut self) {
        self.warehouse_counts.fill(0);
        self.line_weights.fill(0.0);
        self.order_cursor = 0;
    }

    /// Whether taking `option` keeps both running limits.
    #[inline]
    pub fn admits(&self, instance: &ProblemInstance, option: &RouteOption) -> bool {
        let wh = option.warehouse_index as usize;
        if self.warehouse_counts[wh] >= instance.warehouses[wh].daily_capacity_orders {
            return false;
        }
        match option.lane {
            None => true,
            Some(lane) => {
                let w = instance.orders[option.order_index as usize].weight_kg;
                self.line_weights[lane.index()] + w <= instance.lane(lane).max_upper_kg
            }
        }
    }

    #[inline]
    pub fn commit(&mut self, instance: &ProblemInstance, option: &RouteOption) {
        self.warehouse_counts[option.warehouse_index as usize] += 1;
        if let Some(lane) = option.lane {
            self.line_weights[lane.index()] += instance.orders[option.order_index as usize].weight_kg;
        }
        self.order_cursor += 1;
    }

    pub fn totals(&self) -> LineTotals {
        LineTotals {
            line_weight_kg: self.line_weights.clone(),
            warehouse_orders: self.warehouse_counts.clone(),
        }
    }
}

/// How an ant turns choice values into a route index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selector {
    /// Per-option loop with scalar argmax and sequential roulette.
    #[default]
    Scalar,
    /// Choice vector, lane-parallel max reduction and scan roulette.
    /// `exact_scan` keeps the scalar summation order so results match
    /// [`Selector::Scalar`] bit for bit.
    Vectorized { width: usize, exact_scan: bool },
}

/// Reusable buffers for one worker.
#[derive(Debug, Clone)]
pub struct Scratch<T> {
    values: Vec<T>,
    mask: Vec<T>,
    prefix: Vec<T>,
    choices: Vec<usize>,
    trace: Vec<LocalUpdate<T>>,
    state: Option<ConstructionState>,
}

impl<T> Default for Scratch<T> {
    fn default() -> Self {
        Self {
            values: Vec::new(),
            mask: Vec::new(),
            prefix: Vec::new(),
            choices: Vec::new(),
            trace: Vec::new(),
            state: None,
        }
    }
}

/// Pseudo-random-proportional rule with the two uniforms already drawn:
/// `u ≤ q0` exploits (first argmax), otherwise roulette on `u_wheel`.
pub fn select_route_with<T: Real>(values: &[T], q0: T, u: T, u_wheel: T) -> Result<usize, AllMasked> {
    if u <= q0 {
        let i = kernels::scalar_argmax(values);
        if values[i] > T::zero() {
            Ok(i)
        } else {
            Err(AllMasked)
        }
    } else {
        kernels::scalar_roulette(values, u_wheel)
    }
}

/// Draws two uniforms from `rng` and applies [`select_route_with`].
pub fn select_route<T: Real, R: Uniform01>(values: &[T], q0: T, rng: &mut R) -> Result<usize, AllMasked> {
    if values.is_empty() {
        return Err(AllMasked);
    }
    let u = T::of(rng.next_f64());
    let u_wheel = T::of(rng.next_f64());
    select_route_with(values, q0, u, u_wheel)
}

fn construct_into<T: Real, R: Uniform01>(
    model: &PheromoneModel<T>,
    instance: &ProblemInstance,
    rng: &mut R,
    selector: Selector,
    scratch: &mut Scratch<T>,
) -> Result<AntSolution, AcsError> {
    let alpha = T::of(model.params.alpha);
    let q0 = T::of(model.params.q0);
    let rho = T::of(model.params.evaporation_rho);
    let mut state = scratch
        .state
        .take()
        .unwrap_or_else(|| ConstructionState::new(instance));
    state.reset();
    scratch.choices.clear();
    scratch.trace.clear();

    let result = (|| {
        for (k, options) in instance.route_options.iter().enumerate() {
            // Two draws per order whatever branch is taken, so every
            // selector consumes the stream identically.
            let u = T::of(rng.next_f64());
            let u_wheel = T::of(rng.next_f64());
            let tau = model.tau.row(k);
            let eta_pow = model.eta_pow.row(k);

            let picked = match selector {
                Selector::Scalar => {
                    scratch.values.clear();
                    scratch.values.extend(options.iter().enumerate().map(|(r, o)| {
                        if state.admits(instance, o) {
                            choice_value(tau[r], eta_pow[r], alpha)
                        } else {
                            T::zero()
                        }
                    }));
                    select_route_with(&scratch.values, q0, u, u_wheel)
                }
                Selector::Vectorized { width, exact_scan } => {
                    scratch.mask.clear();
                    scratch.mask.extend(
                        options
                            .iter()
                            .map(|o| if state.admits(instance, o) { T::one() } else { T::zero() }),
                    );
                    kernels::build_choice_vector_into(tau, eta_pow, &scratch.mask, alpha, &mut scratch.values);
                    if u <= q0 {
                        let i = kernels::reduce_max_index_width(&scratch.values, width);
                        if scratch.values[i] > T::zero() {
                            Ok(i)
                        } else {
                            Err(AllMasked)
                        }
                    } else if exact_scan {
                        kernels::scan_roulette_exact_into(&scratch.values, u_wheel, &mut scratch.prefix)
                    } else {
                        kernels::scan_roulette_blocked_into(&scratch.values, u_wheel, &mut scratch.prefix)
                    }
                }
            };

            let r = picked.map_err(|_| AcsError::DeadEnd {
                order_id: instance.orders[k].order_id.clone(),
            })?;
            state.commit(instance, &options[r]);
            scratch.choices.push(r);
            scratch.trace.push(LocalUpdate {
                order: k as u32,
                route: r as u32,
                tau: local_pheromone_update(tau[r], rho, model.tau0),
            });
        }
        let totals = LineTotals {
            line_weight_kg: std::mem::take(&mut state.line_weights),
            warehouse_orders: std::mem::take(&mut state.warehouse_counts),
        };
        let cost = evaluate::<T>(instance, &scratch.choices, &totals, false);
        state.line_weights = totals.line_weight_kg;
        state.warehouse_counts = totals.warehouse_orders;
        Ok(AntSolution {
            assignment: Assignment::complete(scratch.choices.clone()),
            cost: cost?,
            seed_trace: None,
        })
    })();
    scratch.state = Some(state);
    result
}

/// One ant: builds a complete feasible assignment against the global
/// trails. The ant's own trail decays are returned as a trace; they never
/// touch the global model.
pub fn construct_solution<T: Real, R: Uniform01>(
    model: &PheromoneModel<T>,
    instance: &ProblemInstance,
    rng: &mut R,
    selector: Selector,
) -> Result<(AntSolution, Vec<LocalUpdate<T>>), AcsError> {
    let mut scratch = Scratch::default();
    let sol = construct_into(model, instance, rng, selector, &mut scratch)?;
    Ok((sol, std::mem::take(&mut scratch.trace)))
}

/// Constructs the ant identified by `key`, retrying on a fresh substream
/// after a dead end, at most [`MAX_DEAD_ENDS`] times.
pub fn construct_ant<T: Real>(
    model: &PheromoneModel<T>,
    instance: &ProblemInstance,
    key: AntKey,
    selector: Selector,
    scratch: &mut Scratch<T>,
) -> Result<AntSolution, AcsError> {
    let mut key = key;
    let mut last_order = String::new();
    for _ in 0..MAX_DEAD_ENDS {
        let mut stream = key.stream();
        match construct_into(model, instance, &mut stream, selector, scratch) {
            Ok(mut sol) => {
                sol.seed_trace = Some(key);
                return Ok(sol);
            }
            Err(AcsError::DeadEnd { order_id }) => {
                last_order = order_id;
                key = key.retry();
            }
            Err(e) => return Err(e),
        }
    }
    Err(AcsError::ConstructionStuck {
        order_id: last_order,
        attempts: MAX_DEAD_ENDS,
    })
}

/// Deterministic baseline: each order, in dataset order, takes its
/// admissible option with the largest heuristic value (lowest index on
/// ties). Cost in double precision.
pub fn greedy_solution(instance: &ProblemInstance, params: AcsParams) -> Result<AntSolution, AcsError> {
    greedy_solution_in::<f64>(instance, params)
}

pub fn greedy_solution_in<T: Real>(
    instance: &ProblemInstance,
    params: AcsParams,
) -> Result<AntSolution, AcsError> {
    let mut state = ConstructionState::new(instance);
    let mut choices = Vec::with_capacity(instance.n_orders());
    for (k, options) in instance.route_options.iter().enumerate() {
        let order = &instance.orders[k];
        let mut best: Option<(usize, f64)> = None;
        for (r, o) in options.iter().enumerate() {
            if !state.admits(instance, o) {
                continue;
            }
            let eta = heuristic_value(instance, order, o, params.heuristic);
            if best.is_none_or(|(_, b)| eta > b) {
                best = Some((r, eta));
            }
        }
        let (r, _) = best.ok_or_else(|| AcsError::DeadEnd {
            order_id: order.order_id.clone(),
        })?;
        state.commit(instance, &options[r]);
        choices.push(r);
    }
    let totals = state.totals();
    let cost = evaluate::<T>(instance, &choices, &totals, false)?;
    Ok(AntSolution {
        assignment: Assignment::complete(choices),
        cost,
        seed_trace: None,
    })
}
