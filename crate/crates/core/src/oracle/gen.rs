use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::acs::{construct_ant, greedy_solution, init_model, AcsParams, Scratch, Selector};
use crate::instance::{
    validate_instance, LaneKey, Order, ProblemInstance, RateBand, ServiceLevel, TransportMode,
    Warehouse,
};
use crate::rng::{derive_seed, AntKey};

/// Shape of a synthetic instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub n_orders: usize,
    pub n_warehouses: usize,
    pub n_ports: usize,
    pub n_couriers: usize,
    pub n_bands_per_lane: usize,
    pub n_products: usize,
    pub n_customers: usize,
    pub weight_range_kg: (f64, f64),
    pub capacity_range: (u32, u32),
    /// Per-kilogram rates; ground lanes use the same draw scaled to a
    /// truck price.
    pub rate_range: (f64, f64),
    pub storage_rate_range: (f64, f64),
    pub ground_fraction: f64,
    pub crf_fraction: f64,
    pub vmi_fraction: f64,
    pub seed: u64,
}

impl Default for GenSpec {
    fn default() -> Self {
        Self {
            n_orders: 3,
            n_warehouses: 2,
            n_ports: 2,
            n_couriers: 2,
            n_bands_per_lane: 2,
            n_products: 2,
            n_customers: 3,
            weight_range_kg: (1.0, 40.0),
            capacity_range: (2, 4),
            rate_range: (0.5, 3.0),
            storage_rate_range: (0.1, 2.0),
            ground_fraction: 0.3,
            crf_fraction: 0.15,
            vmi_fraction: 0.2,
            seed: 0,
        }
    }
}

impl GenSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        let counts = [
            self.n_orders,
            self.n_warehouses,
            self.n_ports,
            self.n_couriers,
            self.n_bands_per_lane,
            self.n_products,
            self.n_customers,
        ];
        if counts.contains(&0) {
            return Err(GenError::InvalidSpec("all counts must be at least 1".into()));
        }
        for p in [self.ground_fraction, self.crf_fraction, self.vmi_fraction] {
            if !(0.0..=1.0).contains(&p) {
                return Err(GenError::InvalidSpec("probabilities must lie in [0, 1]".into()));
            }
        }
        let ranges = [self.weight_range_kg, self.rate_range, self.storage_rate_range];
        if ranges.iter().any(|&(lo, hi)| !(lo >= 0.0 && lo <= hi)) {
            return Err(GenError::InvalidSpec("ranges must be non-negative and ordered".into()));
        }
        if self.capacity_range.0 == 0 || self.capacity_range.0 > self.capacity_range.1 {
            return Err(GenError::InvalidSpec("capacity range must be positive and ordered".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GenError {
    InvalidSpec(String),
    GenRetryExhausted { attempts: usize },
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::InvalidSpec(m) => write!(f, "invalid generator spec: {m}"),
            GenError::GenRetryExhausted { attempts } => {
                write!(f, "no feasible instance after {attempts} attempts")
            }
        }
    }
}

impl std::error::Error for GenError {}

pub const GEN_ATTEMPTS: usize = 100;
const DEST: &str = "PORT_DEST";

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

/// Rounds to cents so generated money values serialize compactly.
fn cents(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn draw(spec: &GenSpec, rng: &mut ChaCha8Rng) -> ProblemInstance {
    let ports: Vec<String> = (0..spec.n_ports).map(|p| format!("PORT{:02}", p + 1)).collect();
    let products: Vec<String> = (0..spec.n_products).map(|p| format!("PROD{:03}", p + 1)).collect();
    let customers: Vec<String> = (0..spec.n_customers).map(|c| format!("CUST{:02}", c + 1)).collect();

    let mut orders = Vec::with_capacity(spec.n_orders);
    for k in 0..spec.n_orders {
        let service_level = if rng.random_bool(spec.crf_fraction) {
            ServiceLevel::Crf
        } else if rng.random_bool(0.5) {
            ServiceLevel::Dtd
        } else {
            ServiceLevel::Dtp
        };
        orders.push(Order {
            order_id: format!("ORD{:05}", k + 1),
            product_id: products[rng.random_range(0..products.len())].clone(),
            customer_id: customers[rng.random_range(0..customers.len())].clone(),
            destination_port: DEST.into(),
            service_level,
            weight_kg: cents(uniform(rng, spec.weight_range_kg)),
            unit_quantity: rng.random_range(1..=50) as f64,
        });
    }

    let mut warehouses = Vec::with_capacity(spec.n_warehouses);
    for i in 0..spec.n_warehouses {
        let cap = rng.random_range(spec.capacity_range.0..=spec.capacity_range.1);
        let mut wh = Warehouse::new(
            format!("PLANT{:02}", i + 1),
            cap,
            cents(uniform(rng, spec.storage_rate_range)),
        );
        wh.allowed_ports.insert(ports[i % ports.len()].clone());
        if ports.len() > 1 && rng.random_bool(0.3) {
            wh.allowed_ports.insert(ports[rng.random_range(0..ports.len())].clone());
        }
        for p in &products {
            if rng.random_bool(0.6) {
                wh.supported_products.insert(p.clone());
            }
        }
        if rng.random_bool(spec.vmi_fraction) {
            wh.vmi_customers
                .insert(customers[rng.random_range(0..customers.len())].clone());
        }
        warehouses.push(wh);
    }
    // Every ordered product is stocked by at least one unrestricted
    // warehouse, so nobody is stranded by product or VMI rules alone.
    let ordered: BTreeSet<&String> = orders.iter().map(|o| &o.product_id).collect();
    for p in ordered {
        let covered = warehouses
            .iter()
            .any(|w| w.supports(p) && w.vmi_customers.is_empty());
        if !covered {
            let open: Vec<usize> = (0..warehouses.len())
                .filter(|&i| warehouses[i].vmi_customers.is_empty())
                .collect();
            let i = if open.is_empty() {
                let i = rng.random_range(0..warehouses.len());
                warehouses[i].vmi_customers.clear();
                i
            } else {
                open[rng.random_range(0..open.len())]
            };
            warehouses[i].supported_products.insert(p.clone());
        }
    }

    let max_weight = orders.iter().map(|o| o.weight_kg).fold(0.0, f64::max);
    let total_weight: f64 = orders.iter().map(|o| o.weight_kg).sum();
    let mut bands = Vec::new();
    for port in &ports {
        for c in 0..spec.n_couriers {
            for service_level in [ServiceLevel::Dtd, ServiceLevel::Dtp] {
                let mode = if rng.random_bool(spec.ground_fraction) {
                    TransportMode::Ground
                } else {
                    TransportMode::Air
                };
                let key = LaneKey {
                    origin_port: port.clone(),
                    dest_port: DEST.into(),
                    courier: format!("V{:03}", c + 1),
                    service_level,
                    transport_day: rng.random_range(1..=3).to_string(),
                    mode,
                };
                // Lane limits stay within a narrow spread so the
                // heuristic does not swamp the trails, and always fit at
                // least two of the heaviest orders.
                let limit = cents((2.0 * max_weight).max(0.6 * total_weight) * rng.random_range(1.0..1.15));
                let n = spec.n_bands_per_lane;
                let mut rate = uniform(rng, spec.rate_range);
                for b in 0..n {
                    let lower = cents(limit * b as f64 / n as f64);
                    let upper = if b + 1 == n {
                        limit
                    } else {
                        cents(limit * (b + 1) as f64 / n as f64)
                    };
                    let (rate_per_kg, minimum_charge) = match mode {
                        TransportMode::Ground => (cents(rate * limit * 0.5), 0.0),
                        TransportMode::Air => (cents(rate), cents(rate * uniform(rng, spec.weight_range_kg) * 0.5)),
                    };
                    bands.push(RateBand {
                        key: key.clone(),
                        weight_lower_kg: lower,
                        weight_upper_kg: upper,
                        rate_per_kg,
                        minimum_charge,
                    });
                    rate *= rng.random_range(0.85..1.0);
                }
            }
        }
    }
    ProblemInstance::assemble(orders, warehouses, bands)
}

/// Ants drawn with pure roulette selection on a fresh model during the
/// slack check.
const SLACK_PROBES: usize = 32;

/// True when uniform-trail roulette ants complete without exhausting
/// their retries, i.e. the limits are not so tight that a run would stall.
fn has_slack(instance: &ProblemInstance, seed: u64) -> bool {
    let params = AcsParams {
        q0: 0.0,
        ..AcsParams::default()
    };
    let Ok(model) = init_model::<f64>(instance, params) else {
        return false;
    };
    let mut scratch = Scratch::default();
    (0..SLACK_PROBES).all(|a| {
        construct_ant(&model, instance, AntKey::new(seed, 0, a, 0), Selector::Scalar, &mut scratch).is_ok()
    })
}

/// Deterministic in `spec.seed`. Redraws (with derived seeds) until every
/// order has a route, the instance validates cleanly, the greedy
/// construction completes and random ants do not stall on the limits.
pub fn generate_instance(spec: &GenSpec) -> Result<ProblemInstance, GenError> {
    spec.validate()?;
    for attempt in 0..GEN_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[spec.seed, attempt as u64]));
        let instance = draw(spec, &mut rng);
        if !validate_instance(&instance).is_empty() {
            continue;
        }
        if greedy_solution(&instance, AcsParams::default()).is_ok() && has_slack(&instance, spec.seed) {
            return Ok(instance);
        }
    }
    Err(GenError::GenRetryExhausted {
        attempts: GEN_ATTEMPTS,
    })
}

/// Draws a random small spec from `seed`: 2 to 7 orders, 1 to 3
/// warehouses, ports, couriers and bands.
pub fn random_spec(seed: u64) -> GenSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, 0x5eed]));
    GenSpec {
        n_orders: rng.random_range(2..=7),
        n_warehouses: rng.random_range(1..=3),
        n_ports: rng.random_range(1..=3),
        n_couriers: rng.random_range(1..=3),
        n_bands_per_lane: rng.random_range(1..=3),
        n_products: rng.random_range(1..=3),
        n_customers: rng.random_range(1..=4),
        capacity_range: (2, rng.random_range(2..=5)),
        seed,
        ..GenSpec::default()
    }
}

/// Random instance whose assignment space stays within `max_space`;
/// specs are redrawn from derived seeds until one fits.
pub fn random_instance(seed: u64, max_space: u128) -> Result<ProblemInstance, GenError> {
    for attempt in 0..GEN_ATTEMPTS as u64 {
        let spec = random_spec(derive_seed(&[seed, attempt]));
        match generate_instance(&spec) {
            Ok(inst) if inst.search_space() <= max_space => return Ok(inst),
            Ok(_) | Err(GenError::GenRetryExhausted { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(GenError::GenRetryExhausted {
        attempts: GEN_ATTEMPTS,
    })
}
