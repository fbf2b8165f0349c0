use std::fmt;

use super::{LaneKey, ProblemInstance};

/// Structural problem found in an instance. Issues are data, the
/// validator never fails.
#[derive(Debug, Clone, PartialEq)]
pub enum InstanceIssue {
    OverlappingBands {
        lane: LaneKey,
        first: (f64, f64),
        second: (f64, f64),
    },
    EmptyBand {
        lane: LaneKey,
        lower: f64,
        upper: f64,
    },
    NegativeRate {
        lane: LaneKey,
    },
    NegativeWeight {
        order_id: String,
    },
    NegativeQuantity {
        order_id: String,
    },
    NonPositiveCapacity {
        warehouse_id: String,
    },
    NegativeStorageRate {
        warehouse_id: String,
    },
    NoAllowedPorts {
        warehouse_id: String,
    },
    NoRouteOptions {
        order_id: String,
    },
}

impl fmt::Display for InstanceIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceIssue::OverlappingBands {
                lane,
                first,
                second,
            } => write!(
                f,
                "lane {lane}: bands [{}, {}) and [{}, {}) overlap",
                first.0, first.1, second.0, second.1
            ),
            InstanceIssue::EmptyBand { lane, lower, upper } => {
                write!(f, "lane {lane}: empty band [{lower}, {upper})")
            }
            InstanceIssue::NegativeRate { lane } => write!(f, "lane {lane}: negative rate or charge"),
            InstanceIssue::NegativeWeight { order_id } => {
                write!(f, "order {order_id}: negative weight")
            }
            InstanceIssue::NegativeQuantity { order_id } => {
                write!(f, "order {order_id}: negative unit quantity")
            }
            InstanceIssue::NonPositiveCapacity { warehouse_id } => {
                write!(f, "warehouse {warehouse_id}: capacity must be at least 1")
            }
            InstanceIssue::NegativeStorageRate { warehouse_id } => {
                write!(f, "warehouse {warehouse_id}: negative storage rate")
            }
            InstanceIssue::NoAllowedPorts { warehouse_id } => {
                write!(f, "warehouse {warehouse_id}: no linked origin port")
            }
            InstanceIssue::NoRouteOptions { order_id } => {
                write!(f, "order {order_id}: no feasible route option")
            }
        }
    }
}

pub fn validate_instance(instance: &ProblemInstance) -> Vec<InstanceIssue> {
    let mut issues = Vec::new();

    for lane in &instance.lanes {
        for band in &lane.bands {
            if band.weight_lower_kg >= band.weight_upper_kg {
                issues.push(InstanceIssue::EmptyBand {
                    lane: lane.key.clone(),
                    lower: band.weight_lower_kg,
                    upper: band.weight_upper_kg,
                });
            }
            if band.rate_per_kg < 0.0 || band.minimum_charge < 0.0 {
                issues.push(InstanceIssue::NegativeRate {
                    lane: lane.key.clone(),
                });
            }
        }
        for pair in lane.bands.windows(2) {
            if pair[1].weight_lower_kg < pair[0].weight_upper_kg {
                issues.push(InstanceIssue::OverlappingBands {
                    lane: lane.key.clone(),
                    first: (pair[0].weight_lower_kg, pair[0].weight_upper_kg),
                    second: (pair[1].weight_lower_kg, pair[1].weight_upper_kg),
                });
            }
        }
    }

    for wh in &instance.warehouses {
        if wh.daily_capacity_orders == 0 {
            issues.push(InstanceIssue::NonPositiveCapacity {
                warehouse_id: wh.warehouse_id.clone(),
            });
        }
        if wh.storage_rate_per_unit < 0.0 {
            issues.push(InstanceIssue::NegativeStorageRate {
                warehouse_id: wh.warehouse_id.clone(),
            });
        }
        if wh.allowed_ports.is_empty() {
            issues.push(InstanceIssue::NoAllowedPorts {
                warehouse_id: wh.warehouse_id.clone(),
            });
        }
    }

    for (k, order) in instance.orders.iter().enumerate() {
        if order.weight_kg < 0.0 {
            issues.push(InstanceIssue::NegativeWeight {
                order_id: order.order_id.clone(),
            });
        }
        if order.unit_quantity < 0.0 {
            issues.push(InstanceIssue::NegativeQuantity {
                order_id: order.order_id.clone(),
            });
        }
        if instance.route_options.get(k).is_none_or(|r| r.is_empty()) {
            issues.push(InstanceIssue::NoRouteOptions {
                order_id: order.order_id.clone(),
            });
        }
    }

    issues
}
