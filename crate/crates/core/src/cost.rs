//! Solution cost and constraint checking.
//!
//! Cost is a whole-solution functional: an order's freight charge depends
//! on the total weight every other order puts on the same line. Evaluation
//! therefore runs in two passes, line totals first, then per-order charges.

use std::fmt;

use crate::instance::{
    Lane, LaneId, Order, ProblemInstance, RateBand, RouteOption, ServiceLevel, TransportMode,
    Warehouse,
};
use crate::real::Real;

/// Route-option index per order. A partial assignment covers a prefix of
/// the orders.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    pub choices: Vec<usize>,
    pub complete: bool,
}

impl Assignment {
    pub fn complete(choices: Vec<usize>) -> Self {
        Self {
            choices,
            complete: true,
        }
    }

    pub fn partial(choices: Vec<usize>) -> Self {
        Self {
            choices,
            complete: false,
        }
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }
}

/// Cumulative weight per line and order count per warehouse.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LineTotals {
    /// Indexed by [`LaneId`].
    pub line_weight_kg: Vec<f64>,
    /// Indexed by warehouse.
    pub warehouse_orders: Vec<u32>,
}

impl LineTotals {
    pub fn zeros(instance: &ProblemInstance) -> Self {
        Self {
            line_weight_kg: vec![0.0; instance.lanes.len()],
            warehouse_orders: vec![0; instance.warehouses.len()],
        }
    }

    /// Sums weights and counts over the assigned orders, in order index
    /// sequence.
    pub fn accumulate(instance: &ProblemInstance, choices: &[usize]) -> Self {
        let mut totals = Self::zeros(instance);
        for (k, &r) in choices.iter().enumerate() {
            totals.add(instance, instance.option(k, r));
        }
        totals
    }

    #[inline]
    pub fn add(&mut self, instance: &ProblemInstance, option: &RouteOption) {
        self.warehouse_orders[option.warehouse_index as usize] += 1;
        if let Some(lane) = option.lane {
            self.line_weight_kg[lane.index()] +=
                instance.orders[option.order_index as usize].weight_kg;
        }
    }

    pub fn line_weight(&self, lane: LaneId) -> f64 {
        self.line_weight_kg[lane.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CostBreakdown {
    /// Always `warehouse_total + transport_total`, computed in the working
    /// precision and widened.
    pub total: f64,
    pub warehouse_total: f64,
    pub transport_total: f64,
    /// `(warehouse, transport)` per order, when requested.
    pub per_order: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CostError {
    IncompleteAssignment { assigned: usize, orders: usize },
    InvalidChoice { order: usize, choice: usize },
    WeightAboveLaneMax { lane: String, total_kg: f64, max_kg: f64 },
    Infeasible(Vec<Violation>),
    NonPositiveCost,
}

impl fmt::Display for CostError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostError::IncompleteAssignment { assigned, orders } => {
                write!(f, "assignment covers {assigned} of {orders} orders")
            }
            CostError::InvalidChoice { order, choice } => {
                write!(f, "order {order} has no route option {choice}")
            }
            CostError::WeightAboveLaneMax {
                lane,
                total_kg,
                max_kg,
            } => write!(f, "line {lane} carries {total_kg} kg above its {max_kg} kg limit"),
            CostError::Infeasible(v) => write!(f, "assignment violates {} constraint(s)", v.len()),
            CostError::NonPositiveCost => f.write_str("costs must be positive"),
        }
    }
}

impl std::error::Error for CostError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    CapacityExceeded,
    WeightGapExceeded,
    ProductUnsupported,
    VmiViolated,
    PortUnlinked,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Warehouse id, lane key or order id depending on the kind.
    pub subject: String,
    /// Excess orders or kilograms; 1 for the per-order kinds.
    pub magnitude: f64,
}

/// Storage cost of shipping `order` from `warehouse`.
#[inline]
pub fn warehouse_cost<T: Real>(order: &Order, warehouse: &Warehouse) -> T {
    T::of(order.unit_quantity) * T::of(warehouse.storage_rate_per_unit)
}

/// The band priced at `total_weight_kg`: the last band whose lower bound
/// does not exceed the weight, so a weight on a boundary takes the higher
/// band and the lane maximum itself takes the top band.
pub fn resolve_band(lane: &Lane, total_weight_kg: f64) -> Result<&RateBand, CostError> {
    if total_weight_kg > lane.max_upper_kg || lane.bands.is_empty() {
        return Err(CostError::WeightAboveLaneMax {
            lane: lane.key.to_string(),
            total_kg: total_weight_kg,
            max_kg: lane.max_upper_kg,
        });
    }
    let idx = lane
        .bands
        .partition_point(|b| b.weight_lower_kg <= total_weight_kg);
    Ok(&lane.bands[idx.saturating_sub(1)])
}

/// Freight charge of one order given the final line totals.
pub fn transport_cost<T: Real>(
    instance: &ProblemInstance,
    option: &RouteOption,
    totals: &LineTotals,
) -> Result<T, CostError> {
    let order = &instance.orders[option.order_index as usize];
    let lane_id = match option.lane {
        Some(l) if order.service_level != ServiceLevel::Crf => l,
        _ => return Ok(T::zero()),
    };
    let lane = instance.lane(lane_id);
    let line_total = totals.line_weight(lane_id);
    let band = resolve_band(lane, line_total)?;
    let rate = T::of(band.rate_per_kg);
    let weight = T::of(order.weight_kg);
    Ok(match lane.key.mode {
        TransportMode::Ground => {
            if line_total > 0.0 {
                rate * weight / T::of(line_total)
            } else {
                T::zero()
            }
        }
        TransportMode::Air => {
            let charge = rate * weight;
            let minimum = T::of(band.minimum_charge);
            if charge < minimum {
                minimum
            } else {
                charge
            }
        }
    })
}

/// Evaluates a complete, feasible choice vector. Callers guarantee
/// feasibility.
pub(crate) fn evaluate<T: Real>(
    instance: &ProblemInstance,
    choices: &[usize],
    totals: &LineTotals,
    keep_per_order: bool,
) -> Result<CostBreakdown, CostError> {
    let mut wh_total = T::zero();
    let mut tr_total = T::zero();
    let mut per_order = keep_per_order.then(|| Vec::with_capacity(choices.len()));
    for (k, &r) in choices.iter().enumerate() {
        let option = instance.option(k, r);
        let wc: T = warehouse_cost(
            &instance.orders[k],
            &instance.warehouses[option.warehouse_index as usize],
        );
        let tc: T = transport_cost(instance, option, totals)?;
        wh_total = wh_total + wc;
        tr_total = tr_total + tc;
        if let Some(p) = per_order.as_mut() {
            p.push((wc.to_f64(), tc.to_f64()));
        }
    }
    Ok(CostBreakdown {
        total: (wh_total + tr_total).to_f64(),
        warehouse_total: wh_total.to_f64(),
        transport_total: tr_total.to_f64(),
        per_order,
    })
}

fn check_shape(instance: &ProblemInstance, assignment: &Assignment) -> Result<(), CostError> {
    if !assignment.complete || assignment.len() != instance.n_orders() {
        return Err(CostError::IncompleteAssignment {
            assigned: assignment.len(),
            orders: instance.n_orders(),
        });
    }
    for (k, &r) in assignment.choices.iter().enumerate() {
        if r >= instance.route_options[k].len() {
            return Err(CostError::InvalidChoice {
                order: k,
                choice: r,
            });
        }
    }
    Ok(())
}

/// Total cost of a complete feasible assignment in double precision.
pub fn solution_cost(
    instance: &ProblemInstance,
    assignment: &Assignment,
) -> Result<CostBreakdown, CostError> {
    solution_cost_in::<f64>(instance, assignment, false)
}

/// Total cost in the working precision `T`. Refuses infeasible
/// assignments rather than pricing them.
pub fn solution_cost_in<T: Real>(
    instance: &ProblemInstance,
    assignment: &Assignment,
    keep_per_order: bool,
) -> Result<CostBreakdown, CostError> {
    check_shape(instance, assignment)?;
    let violations = check_constraints(instance, assignment);
    if !violations.is_empty() {
        return Err(CostError::Infeasible(violations));
    }
    let totals = LineTotals::accumulate(instance, &assignment.choices);
    evaluate::<T>(instance, &assignment.choices, &totals, keep_per_order)
}

/// Every capacity, line-weight and static routing violation. Choices must
/// index valid route options.
pub fn check_constraints(instance: &ProblemInstance, assignment: &Assignment) -> Vec<Violation> {
    let totals = LineTotals::accumulate(instance, &assignment.choices);
    let mut out = Vec::new();

    for (wh, &count) in instance.warehouses.iter().zip(&totals.warehouse_orders) {
        if count > wh.daily_capacity_orders {
            out.push(Violation {
                kind: ViolationKind::CapacityExceeded,
                subject: wh.warehouse_id.clone(),
                magnitude: (count - wh.daily_capacity_orders) as f64,
            });
        }
    }
    for (lane, &weight) in instance.lanes.iter().zip(&totals.line_weight_kg) {
        if weight > lane.max_upper_kg {
            out.push(Violation {
                kind: ViolationKind::WeightGapExceeded,
                subject: lane.key.to_string(),
                magnitude: weight - lane.max_upper_kg,
            });
        }
    }
    for (k, &r) in assignment.choices.iter().enumerate() {
        let order = &instance.orders[k];
        let option = instance.option(k, r);
        let wh = &instance.warehouses[option.warehouse_index as usize];
        let mut push = |kind| {
            out.push(Violation {
                kind,
                subject: order.order_id.clone(),
                magnitude: 1.0,
            })
        };
        if !wh.supports(&order.product_id) {
            push(ViolationKind::ProductUnsupported);
        }
        if !wh.serves_customer(&order.customer_id) {
            push(ViolationKind::VmiViolated);
        }
        if let Some(lane) = option.lane {
            if !wh.allowed_ports.contains(&instance.lane(lane).key.origin_port) {
                push(ViolationKind::PortUnlinked);
            }
        }
    }
    out
}

/// `100 × best_known / achieved` for a minimization objective.
pub fn proximity(best_known: f64, achieved: f64) -> Result<f64, CostError> {
    if !(best_known > 0.0 && achieved > 0.0) {
        return Err(CostError::NonPositiveCost);
    }
    Ok(100.0 * best_known / achieved)
}
