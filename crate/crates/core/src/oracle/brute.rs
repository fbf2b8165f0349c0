//! Exhaustive reference solver.
//!
//! Constraint checking and pricing here are written separately from the
//! `cost` module on purpose: the two must agree without sharing code.

use std::fmt;

use crate::cost::Assignment;
use crate::instance::{ProblemInstance, ServiceLevel, TransportMode};

pub const MAX_SEARCH_SPACE: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    SearchSpaceTooLarge { size: u128 },
    NoFeasibleAssignment,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::SearchSpaceTooLarge { size } => write!(
                f,
                "search space of {size} assignments exceeds the {MAX_SEARCH_SPACE} limit"
            ),
            OracleError::NoFeasibleAssignment => f.write_str("no feasible assignment exists"),
        }
    }
}

impl std::error::Error for OracleError {}

/// Independent evaluator over one instance.
pub struct ReferenceEvaluator<'a> {
    instance: &'a ProblemInstance,
    lane_limits: Vec<f64>,
    counts: Vec<u32>,
    weights: Vec<f64>,
}

impl<'a> ReferenceEvaluator<'a> {
    pub fn new(instance: &'a ProblemInstance) -> Self {
        let lane_limits = instance
            .lanes
            .iter()
            .map(|l| {
                l.bands
                    .iter()
                    .map(|b| b.weight_upper_kg)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        Self {
            instance,
            lane_limits,
            counts: vec![0; instance.warehouses.len()],
            weights: vec![0.0; instance.lanes.len()],
        }
    }

    /// Checks every rule on `choices`; returns `None` when infeasible and
    /// the total cost otherwise.
    pub fn price(&mut self, choices: &[usize]) -> Option<f64> {
        let inst = self.instance;
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.weights.iter_mut().for_each(|w| *w = 0.0);
        for (k, &r) in choices.iter().enumerate() {
            let opt = &inst.route_options[k][r];
            let order = &inst.orders[k];
            let wh = &inst.warehouses[opt.warehouse_index as usize];
            if !wh.supported_products.contains(&order.product_id) {
                return None;
            }
            if !wh.vmi_customers.is_empty() && !wh.vmi_customers.contains(&order.customer_id) {
                return None;
            }
            self.counts[opt.warehouse_index as usize] += 1;
            if let Some(l) = opt.lane {
                let lane = &inst.lanes[l.0 as usize];
                if !wh.allowed_ports.contains(&lane.key.origin_port) {
                    return None;
                }
                self.weights[l.0 as usize] += order.weight_kg;
            }
        }
        for (i, wh) in inst.warehouses.iter().enumerate() {
            if self.counts[i] > wh.daily_capacity_orders {
                return None;
            }
        }
        for (l, &w) in self.weights.iter().enumerate() {
            if w > self.lane_limits[l] {
                return None;
            }
        }

        let mut total = 0.0;
        for (k, &r) in choices.iter().enumerate() {
            let opt = &inst.route_options[k][r];
            let order = &inst.orders[k];
            let storage = order.unit_quantity * inst.warehouses[opt.warehouse_index as usize].storage_rate_per_unit;
            let freight = match opt.lane {
                Some(l) if order.service_level != ServiceLevel::Crf => {
                    let lane = &inst.lanes[l.0 as usize];
                    let line = self.weights[l.0 as usize];
                    // Highest lower bound not above the line weight.
                    let mut band = &lane.bands[0];
                    for b in &lane.bands {
                        if b.weight_lower_kg <= line && b.weight_lower_kg >= band.weight_lower_kg {
                            band = b;
                        }
                    }
                    match lane.key.mode {
                        TransportMode::Ground if line > 0.0 => band.rate_per_kg * order.weight_kg / line,
                        TransportMode::Ground => 0.0,
                        TransportMode::Air => {
                            let c = band.rate_per_kg * order.weight_kg;
                            if c < band.minimum_charge { band.minimum_charge } else { c }
                        }
                    }
                }
                _ => 0.0,
            };
            total += storage + freight;
        }
        Some(total)
    }
}

/// Enumerates every complete assignment in lexicographic order and returns
/// the cheapest feasible one (the lexicographically smallest among equal
/// costs).
pub fn brute_force_optimum(instance: &ProblemInstance) -> Result<(Assignment, f64), OracleError> {
    let size = instance.search_space();
    if size > MAX_SEARCH_SPACE {
        return Err(OracleError::SearchSpaceTooLarge { size });
    }
    let radix: Vec<usize> = instance.route_options.iter().map(Vec::len).collect();
    if radix.contains(&0) {
        return Err(OracleError::NoFeasibleAssignment);
    }
    let mut eval = ReferenceEvaluator::new(instance);
    let mut current = vec![0usize; radix.len()];
    let mut best: Option<(Vec<usize>, f64)> = None;
    loop {
        if let Some(cost) = eval.price(&current) {
            if best.as_ref().is_none_or(|(_, b)| cost < *b) {
                best = Some((current.clone(), cost));
            }
        }
        // Odometer step: last order varies fastest.
        let mut pos = radix.len();
        loop {
            if pos == 0 {
                return best
                    .map(|(c, v)| (Assignment::complete(c), v))
                    .ok_or(OracleError::NoFeasibleAssignment);
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < radix[pos] {
                break;
            }
            current[pos] = 0;
        }
    }
}
