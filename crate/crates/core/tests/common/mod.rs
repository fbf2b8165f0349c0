#![allow(dead_code)]

use std::collections::BTreeSet;

use acs_supply::cost::{Violation, ViolationKind};
use acs_supply::instance::{LaneKey, Order, RateBand, ServiceLevel, TransportMode, Warehouse};
use acs_supply::oracle::{generate_instance, random_instance, GenSpec};
use acs_supply::ProblemInstance;

pub fn small(seed: u64) -> ProblemInstance {
    random_instance(seed, 100_000).expect("generator")
}

/// The three-order, two-warehouse, two-courier instance used by several
/// hand checks.
pub fn three_order() -> ProblemInstance {
    generate_instance(&GenSpec {
        n_orders: 3,
        n_warehouses: 2,
        n_couriers: 2,
        seed: 3,
        ..GenSpec::default()
    })
    .unwrap()
}

pub fn order(id: &str, product: &str, customer: &str, sl: ServiceLevel, w: f64, q: f64) -> Order {
    Order {
        order_id: id.into(),
        product_id: product.into(),
        customer_id: customer.into(),
        destination_port: "D".into(),
        service_level: sl,
        weight_kg: w,
        unit_quantity: q,
    }
}

pub fn warehouse(id: &str, cap: u32, rate: f64, products: &[&str], ports: &[&str]) -> Warehouse {
    let mut w = Warehouse::new(id, cap, rate);
    w.supported_products = products.iter().map(|s| s.to_string()).collect();
    w.allowed_ports = ports.iter().map(|s| s.to_string()).collect();
    w
}

pub fn key(origin: &str, courier: &str, sl: ServiceLevel, mode: TransportMode) -> LaneKey {
    LaneKey {
        origin_port: origin.into(),
        dest_port: "D".into(),
        courier: courier.into(),
        service_level: sl,
        transport_day: "1".into(),
        mode,
    }
}

pub fn band(key: &LaneKey, lo: f64, hi: f64, rate: f64, min: f64) -> RateBand {
    RateBand {
        key: key.clone(),
        weight_lower_kg: lo,
        weight_upper_kg: hi,
        rate_per_kg: rate,
        minimum_charge: min,
    }
}

/// Violation set computed from scratch: kind, subject and magnitude in
/// micro-units so float noise does not split equal entries.
pub fn naive_violations(instance: &ProblemInstance, choices: &[usize]) -> BTreeSet<(ViolationKind, String, i64)> {
    let mut out = BTreeSet::new();
    let mut counts = vec![0i64; instance.warehouses.len()];
    let mut weights = vec![0.0f64; instance.lanes.len()];
    for (k, &r) in choices.iter().enumerate() {
        let o = &instance.route_options[k][r];
        let order = &instance.orders[k];
        let wh = &instance.warehouses[o.warehouse_index as usize];
        counts[o.warehouse_index as usize] += 1;
        if !wh.supported_products.iter().any(|p| *p == order.product_id) {
            out.insert((ViolationKind::ProductUnsupported, order.order_id.clone(), 1_000_000));
        }
        if !wh.vmi_customers.is_empty() && !wh.vmi_customers.iter().any(|c| *c == order.customer_id) {
            out.insert((ViolationKind::VmiViolated, order.order_id.clone(), 1_000_000));
        }
        if let Some(l) = o.lane {
            let lane = &instance.lanes[l.0 as usize];
            weights[l.0 as usize] += order.weight_kg;
            if !wh.allowed_ports.iter().any(|p| *p == lane.key.origin_port) {
                out.insert((ViolationKind::PortUnlinked, order.order_id.clone(), 1_000_000));
            }
        }
    }
    for (i, wh) in instance.warehouses.iter().enumerate() {
        let excess = counts[i] - wh.daily_capacity_orders as i64;
        if excess > 0 {
            out.insert((ViolationKind::CapacityExceeded, wh.warehouse_id.clone(), excess * 1_000_000));
        }
    }
    for (l, lane) in instance.lanes.iter().enumerate() {
        let max = lane.bands.iter().map(|b| b.weight_upper_kg).fold(0.0, f64::max);
        if weights[l] > max {
            out.insert((
                ViolationKind::WeightGapExceeded,
                lane.key.to_string(),
                ((weights[l] - max) * 1e6).round() as i64,
            ));
        }
    }
    out
}

pub fn as_set(v: &[Violation]) -> BTreeSet<(ViolationKind, String, i64)> {
    v.iter()
        .map(|v| (v.kind, v.subject.clone(), (v.magnitude * 1e6).round() as i64))
        .collect()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
