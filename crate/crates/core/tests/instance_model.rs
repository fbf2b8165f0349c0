mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;

use acs_supply::instance::{load_instance, load_instance_with, validate_instance, write_instance, ColumnMapping};
use acs_supply::instance::{ServiceLevel, TransportMode};
use acs_supply::oracle::{generate_instance, random_spec, GenSpec};
use acs_supply::ProblemInstance;
use proptest::prelude::*;

use common::*;

fn naive_options(instance: &ProblemInstance, k: usize) -> BTreeSet<(u32, Option<u32>)> {
    let order = &instance.orders[k];
    let mut out = BTreeSet::new();
    for (i, wh) in instance.warehouses.iter().enumerate() {
        let product = wh.supported_products.iter().any(|p| *p == order.product_id);
        let vmi = wh.vmi_customers.is_empty() || wh.vmi_customers.iter().any(|c| *c == order.customer_id);
        if !(product && vmi) {
            continue;
        }
        if order.service_level == ServiceLevel::Crf {
            out.insert((i as u32, None));
            continue;
        }
        for (l, lane) in instance.lanes.iter().enumerate() {
            if lane.key.dest_port == order.destination_port
                && lane.key.service_level == order.service_level
                && wh.allowed_ports.iter().any(|p| *p == lane.key.origin_port)
            {
                out.insert((i as u32, Some(l as u32)));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enumeration_matches_naive_filter(seed in any::<u64>()) {
        let spec = random_spec(seed);
        let instance = match generate_instance(&spec) {
            Ok(i) => i,
            Err(_) => return Ok(()),
        };
        for k in 0..instance.n_orders() {
            let got: BTreeSet<_> = instance.route_options[k]
                .iter()
                .map(|o| (o.warehouse_index, o.lane.map(|l| l.0)))
                .collect();
            prop_assert_eq!(got.len(), instance.route_options[k].len());
            prop_assert_eq!(&got, &naive_options(&instance, k));
            prop_assert_eq!(instance.enumerate_route_options(k), instance.enumerate_route_options(k));
        }
    }

    #[test]
    fn csv_round_trip_preserves_instance(seed in any::<u64>()) {
        let instance = match generate_instance(&random_spec(seed)) {
            Ok(i) => i,
            Err(_) => return Ok(()),
        };
        let dir = tempfile::tempdir().unwrap();
        write_instance(&instance, dir.path()).unwrap();
        let back = load_instance(dir.path()).unwrap();
        prop_assert_eq!(back, instance);
    }
}

#[test]
fn three_order_instance_round_trips() {
    let instance = three_order();
    let dir = tempfile::tempdir().unwrap();
    write_instance(&instance, dir.path()).unwrap();
    assert_eq!(load_instance(dir.path()).unwrap(), instance);
}

#[test]
fn single_order_single_warehouse_has_one_option() {
    let spec = GenSpec {
        n_orders: 1,
        n_warehouses: 1,
        n_ports: 1,
        n_couriers: 1,
        ..GenSpec::default()
    };
    for seed in 0..20 {
        let instance = generate_instance(&GenSpec { seed, ..spec.clone() }).unwrap();
        assert_eq!(instance.total_route_options(), 1);
    }
}

#[test]
fn hand_enumerated_option_counts() {
    // Two warehouses, three lanes leaving P1 for the DTD service; W2 does
    // not stock the product, so only W1's three lanes remain.
    let lanes: Vec<_> = ["C1", "C2", "C3"]
        .iter()
        .map(|c| key("P1", c, ServiceLevel::Dtd, TransportMode::Air))
        .collect();
    let bands = lanes.iter().map(|k| band(k, 0.0, 100.0, 1.0, 0.0)).collect();
    let instance = ProblemInstance::build(
        vec![order("O1", "A", "X", ServiceLevel::Dtd, 5.0, 1.0)],
        vec![
            warehouse("W1", 5, 1.0, &["A"], &["P1"]),
            warehouse("W2", 5, 1.0, &["B"], &["P1"]),
        ],
        bands,
    )
    .unwrap();
    assert_eq!(instance.route_options[0].len(), 3);
    assert!(instance.route_options[0].iter().all(|o| o.warehouse_index == 0));
}

#[test]
fn generated_instances_validate_cleanly() {
    for seed in 0..50 {
        assert!(validate_instance(&small(seed)).is_empty());
    }
}

#[test]
fn shipped_sample_loads() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/small");
    let instance = load_instance(&dir).unwrap();
    assert_eq!(instance.n_orders(), 40);
    assert!(validate_instance(&instance).is_empty());
}

/// Loads the published dataset when `ACS_DATASET_DIR` points at it.
#[test]
fn published_dataset_shape() {
    let Some(dir) = std::env::var_os("ACS_DATASET_DIR").map(PathBuf::from) else {
        eprintln!("skipped: ACS_DATASET_DIR not set");
        return;
    };
    let map = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/published-dataset.map");
    let instance = load_instance_with(&dir, &ColumnMapping::from_file(&map).unwrap()).unwrap();
    assert_eq!(instance.warehouses.len(), 15);
    assert_eq!(instance.destination_ports().len(), 1);
    assert_eq!(instance.origin_ports().len(), 11);
    assert!((9215..=9216).contains(&instance.n_orders()));
    for issue in validate_instance(&instance) {
        eprintln!("dataset issue: {issue}");
    }
}
