//! Problem instance: orders, warehouses, freight lanes and the per-order
//! route options derived from them.
//!
//! A [`ProblemInstance`] is immutable once assembled and is shared by
//! reference across every worker of a run.

mod csv_io;
mod validate;

pub use csv_io::{
    load_instance, load_instance_with, write_assignment, write_instance, ColumnMapping, TABLES,
};
pub use validate::{validate_instance, InstanceIssue};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

/// Shipping service level requested by the customer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ServiceLevel {
    /// Door to door.
    Dtd,
    /// Door to port.
    Dtp,
    /// Customer referred freight: the customer pays transport.
    Crf,
}

impl ServiceLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            ServiceLevel::Dtd => "DTD",
            ServiceLevel::Dtp => "DTP",
            ServiceLevel::Crf => "CRF",
        }
    }
}

impl fmt::Display for ServiceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ServiceLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "DTD" => Ok(ServiceLevel::Dtd),
            "DTP" => Ok(ServiceLevel::Dtp),
            "CRF" => Ok(ServiceLevel::Crf),
            other => Err(format!("unknown service level `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TransportMode {
    Air,
    Ground,
}

impl TransportMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TransportMode::Air => "AIR",
            TransportMode::Ground => "GROUND",
        }
    }
}

impl fmt::Display for TransportMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TransportMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "AIR" => Ok(TransportMode::Air),
            "GROUND" => Ok(TransportMode::Ground),
            other => Err(format!("unknown transport mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Order {
    pub order_id: String,
    pub product_id: String,
    pub customer_id: String,
    pub destination_port: String,
    pub service_level: ServiceLevel,
    pub weight_kg: f64,
    pub unit_quantity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Warehouse {
    pub warehouse_id: String,
    /// Orders the warehouse can process per day.
    pub daily_capacity_orders: u32,
    /// Storage cost per unit shipped.
    pub storage_rate_per_unit: f64,
    pub supported_products: BTreeSet<String>,
    /// Origin ports this warehouse may ship through.
    pub allowed_ports: BTreeSet<String>,
    /// When non-empty the warehouse serves only these customers.
    pub vmi_customers: BTreeSet<String>,
}

impl Warehouse {
    pub fn new(id: impl Into<String>, capacity: u32, rate: f64) -> Self {
        Self {
            warehouse_id: id.into(),
            daily_capacity_orders: capacity,
            storage_rate_per_unit: rate,
            supported_products: BTreeSet::new(),
            allowed_ports: BTreeSet::new(),
            vmi_customers: BTreeSet::new(),
        }
    }

    pub fn supports(&self, product_id: &str) -> bool {
        self.supported_products.contains(product_id)
    }

    /// VMI rule: listed warehouses serve only their customers, unlisted
    /// warehouses serve anyone.
    pub fn serves_customer(&self, customer_id: &str) -> bool {
        self.vmi_customers.is_empty() || self.vmi_customers.contains(customer_id)
    }
}

/// Six-component line key: origin port, destination port, courier, service
/// level, transport day, mode. Ordering is lexicographic in that order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LaneKey {
    pub origin_port: String,
    pub dest_port: String,
    pub courier: String,
    pub service_level: ServiceLevel,
    pub transport_day: String,
    pub mode: TransportMode,
}

impl fmt::Display for LaneKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}>{}/{}/{}/{}/{}",
            self.origin_port,
            self.dest_port,
            self.courier,
            self.service_level,
            self.transport_day,
            self.mode
        )
    }
}

/// One row of the freight-rate table.
#[derive(Debug, Clone, PartialEq)]
pub struct RateBand {
    pub key: LaneKey,
    pub weight_lower_kg: f64,
    pub weight_upper_kg: f64,
    pub rate_per_kg: f64,
    pub minimum_charge: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lane {
    pub key: LaneKey,
    /// Sorted by lower bound; contiguous after normalization.
    pub bands: Vec<RateBand>,
    /// Largest upper bound over the bands: the line's weight limit.
    pub max_upper_kg: f64,
}

impl Lane {
    /// Groups raw bands into a lane, sorting them and closing gaps so that
    /// the intervals are contiguous and half-open. Overlaps are left in
    /// place for the validator to report.
    pub fn from_bands(key: LaneKey, mut bands: Vec<RateBand>) -> Self {
        bands.sort_by(|a, b| {
            a.weight_lower_kg
                .total_cmp(&b.weight_lower_kg)
                .then(a.weight_upper_kg.total_cmp(&b.weight_upper_kg))
        });
        if let Some(first) = bands.first_mut() {
            if first.weight_lower_kg > 0.0 {
                first.weight_lower_kg = 0.0;
            }
        }
        for i in 1..bands.len() {
            let next_lower = bands[i].weight_lower_kg;
            if bands[i - 1].weight_upper_kg < next_lower {
                bands[i - 1].weight_upper_kg = next_lower;
            }
        }
        let max_upper_kg = bands
            .iter()
            .map(|b| b.weight_upper_kg)
            .fold(0.0_f64, f64::max);
        Lane {
            key,
            bands,
            max_upper_kg,
        }
    }
}

/// Dense lane handle into [`ProblemInstance::lanes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LaneId(pub u32);

impl LaneId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One statically feasible (warehouse, lane) choice for an order. CRF
/// orders carry no lane: their transport cost is identically zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RouteOption {
    pub order_index: u32,
    pub warehouse_index: u32,
    pub lane: Option<LaneId>,
    pub route_index: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub orders: Vec<Order>,
    pub warehouses: Vec<Warehouse>,
    /// Sorted by key.
    pub lanes: Vec<Lane>,
    pub route_options: Vec<Vec<RouteOption>>,
    pub best_known_cost: Option<f64>,
}

#[derive(Debug)]
pub enum InstanceError {
    MissingTable(String),
    SchemaError { table: String, message: String },
    DanglingReference { table: String, reference: String },
    InfeasibleOrder { order_id: String },
    Io(std::io::Error),
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::MissingTable(t) => write!(f, "missing table {t}.csv"),
            InstanceError::SchemaError { table, message } => {
                write!(f, "schema error in {table}: {message}")
            }
            InstanceError::DanglingReference { table, reference } => {
                write!(f, "{table} references unknown {reference}")
            }
            InstanceError::InfeasibleOrder { order_id } => {
                write!(f, "order {order_id} has no feasible route option")
            }
            InstanceError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for InstanceError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            InstanceError::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for InstanceError {
    fn from(e: std::io::Error) -> Self {
        InstanceError::Io(e)
    }
}

impl ProblemInstance {
    /// Builds an instance from parsed tables: groups rate bands into lanes
    /// and enumerates route options. Orders with no option are kept (with
    /// an empty list) so the validator can report them; use
    /// [`ProblemInstance::build`] to reject them instead.
    pub fn assemble(
        orders: Vec<Order>,
        warehouses: Vec<Warehouse>,
        bands: Vec<RateBand>,
    ) -> ProblemInstance {
        let mut grouped: BTreeMap<LaneKey, Vec<RateBand>> = BTreeMap::new();
        for band in bands {
            grouped.entry(band.key.clone()).or_default().push(band);
        }
        let lanes = grouped
            .into_iter()
            .map(|(key, bands)| Lane::from_bands(key, bands))
            .collect();
        let mut instance = ProblemInstance {
            orders,
            warehouses,
            lanes,
            route_options: Vec::new(),
            best_known_cost: None,
        };
        instance.route_options = (0..instance.orders.len())
            .map(|k| instance.enumerate_route_options(k))
            .collect();
        instance
    }

    /// Like [`assemble`](Self::assemble) but fails on the first order
    /// without a route option.
    pub fn build(
        orders: Vec<Order>,
        warehouses: Vec<Warehouse>,
        bands: Vec<RateBand>,
    ) -> Result<ProblemInstance, InstanceError> {
        let instance = Self::assemble(orders, warehouses, bands);
        if let Some(k) = instance.route_options.iter().position(|r| r.is_empty()) {
            return Err(InstanceError::InfeasibleOrder {
                order_id: instance.orders[k].order_id.clone(),
            });
        }
        Ok(instance)
    }

    pub fn with_best_known(mut self, cost: f64) -> Self {
        self.best_known_cost = Some(cost);
        self
    }

    #[inline]
    pub fn n_orders(&self) -> usize {
        self.orders.len()
    }

    #[inline]
    pub fn lane(&self, id: LaneId) -> &Lane {
        &self.lanes[id.index()]
    }

    pub fn lane_id(&self, key: &LaneKey) -> Option<LaneId> {
        self.lanes
            .binary_search_by(|l| l.key.cmp(key))
            .ok()
            .map(|i| LaneId(i as u32))
    }

    #[inline]
    pub fn option(&self, order: usize, route: usize) -> &RouteOption {
        &self.route_options[order][route]
    }

    pub fn total_route_options(&self) -> usize {
        self.route_options.iter().map(Vec::len).sum()
    }

    /// Number of complete assignments, saturating at `u128::MAX`.
    pub fn search_space(&self) -> u128 {
        self.route_options
            .iter()
            .fold(1u128, |acc, r| acc.saturating_mul(r.len() as u128))
    }

    pub fn destination_ports(&self) -> BTreeSet<&str> {
        self.orders
            .iter()
            .map(|o| o.destination_port.as_str())
            .collect()
    }

    pub fn origin_ports(&self) -> BTreeSet<&str> {
        self.warehouses
            .iter()
            .flat_map(|w| w.allowed_ports.iter().map(String::as_str))
            .collect()
    }

    /// All statically feasible route options for order `k`: product
    /// support, VMI, plant-port link, destination and service level.
    /// Ordered by warehouse index, then lane key.
    pub fn enumerate_route_options(&self, k: usize) -> Vec<RouteOption> {
        let order = &self.orders[k];
        let mut out = Vec::new();
        for (i, wh) in self.warehouses.iter().enumerate() {
            if !wh.supports(&order.product_id) || !wh.serves_customer(&order.customer_id) {
                continue;
            }
            if order.service_level == ServiceLevel::Crf {
                out.push(RouteOption {
                    order_index: k as u32,
                    warehouse_index: i as u32,
                    lane: None,
                    route_index: out.len() as u32,
                });
                continue;
            }
            for (lane_idx, lane) in self.lanes.iter().enumerate() {
                let key = &lane.key;
                if key.dest_port == order.destination_port
                    && key.service_level == order.service_level
                    && wh.allowed_ports.contains(&key.origin_port)
                {
                    out.push(RouteOption {
                        order_index: k as u32,
                        warehouse_index: i as u32,
                        lane: Some(LaneId(lane_idx as u32)),
                        route_index: out.len() as u32,
                    });
                }
            }
        }
        out
    }
}
