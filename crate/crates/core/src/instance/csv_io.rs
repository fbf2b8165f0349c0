//! Seven-table CSV format.
//!
//! Canonical headers are listed in [`TABLES`]. Datasets with other headers
//! are read through a [`ColumnMapping`] file of `Table.column = Header`
//! lines. Header and file-name matching ignore case and surrounding
//! whitespace.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::{InstanceError, Order, ProblemInstance, RateBand, Warehouse};
use super::{LaneKey, ServiceLevel, TransportMode};

/// Table names with their canonical column lists.
pub const TABLES: [(&str, &[&str]); 7] = [
    (
        "OrderList",
        &[
            "order_id",
            "product_id",
            "customer_id",
            "destination_port",
            "service_level",
            "weight_kg",
            "unit_quantity",
        ],
    ),
    (
        "FreightRates",
        &[
            "origin_port",
            "dest_port",
            "courier",
            "service_level",
            "transport_day",
            "mode",
            "min_weight_kg",
            "max_weight_kg",
            "rate_per_kg",
            "minimum_charge",
        ],
    ),
    ("PlantPorts", &["warehouse_id", "port_id"]),
    ("ProductsPerPlant", &["warehouse_id", "product_id"]),
    ("VmiCustomers", &["warehouse_id", "customer_id"]),
    ("WhCapacities", &["warehouse_id", "daily_capacity"]),
    ("WhCosts", &["warehouse_id", "cost_per_unit"]),
];

/// Header overrides, keyed by `Table.column`. A `Table.file` key renames
/// the file stem looked up for that table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ColumnMapping {
    entries: HashMap<String, String>,
}

impl ColumnMapping {
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| InstanceError::SchemaError {
                table: "mapping".into(),
                message: format!("line {}: expected key = value", lineno + 1),
            })?;
            let key = k.trim();
            if !key.contains('.') {
                return Err(InstanceError::SchemaError {
                    table: "mapping".into(),
                    message: format!("line {}: key `{key}` is not Table.column", lineno + 1),
                });
            }
            entries.insert(key.to_ascii_lowercase(), v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn from_file(path: &Path) -> Result<Self, InstanceError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn insert(&mut self, table: &str, column: &str, header: &str) {
        self.entries.insert(
            format!("{table}.{column}").to_ascii_lowercase(),
            header.to_string(),
        );
    }

    fn header_for<'a>(&'a self, table: &str, column: &'a str) -> &'a str {
        self.entries
            .get(&format!("{table}.{column}").to_ascii_lowercase())
            .map(String::as_str)
            .unwrap_or(column)
    }

    fn file_for<'a>(&'a self, table: &'a str) -> &'a str {
        self.entries
            .get(&format!("{table}.file").to_ascii_lowercase())
            .map(String::as_str)
            .unwrap_or(table)
    }
}

fn normalize(s: &str) -> String {
    s.trim().to_ascii_lowercase()
}

fn find_table(dir: &Path, stem: &str) -> Result<PathBuf, InstanceError> {
    let wanted = format!("{}.csv", normalize(stem));
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
            if normalize(name) == wanted {
                return Ok(path);
            }
        }
    }
    Err(InstanceError::MissingTable(stem.to_string()))
}

/// A table read into rows of canonical columns, in canonical order.
struct Table {
    name: &'static str,
    rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    fn read(
        dir: &Path,
        mapping: &ColumnMapping,
        name: &'static str,
        columns: &[&str],
    ) -> Result<Table, InstanceError> {
        let path = find_table(dir, mapping.file_for(name))?;
        let schema = |message: String| InstanceError::SchemaError {
            table: name.to_string(),
            message,
        };
        let mut reader = csv::ReaderBuilder::new()
            .flexible(true)
            .from_path(&path)
            .map_err(|e| schema(e.to_string()))?;
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| schema(e.to_string()))?
            .iter()
            .map(normalize)
            .collect();
        let mut positions = Vec::with_capacity(columns.len());
        for col in columns {
            let header = normalize(mapping.header_for(name, col));
            let pos = headers
                .iter()
                .position(|h| h.trim_start_matches('\u{feff}') == header)
                .ok_or_else(|| schema(format!("required column `{header}` not found")))?;
            positions.push(pos);
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| schema(e.to_string()))?;
            if record.iter().all(|f| f.trim().is_empty()) {
                continue;
            }
            let line = i + 2;
            let mut row = Vec::with_capacity(positions.len());
            for &p in &positions {
                let field = record
                    .get(p)
                    .ok_or_else(|| schema(format!("line {line}: too few fields")))?;
                row.push(field.trim().to_string());
            }
            rows.push((line, row));
        }
        Ok(Table { name, rows })
    }

    fn schema_err(&self, line: usize, message: impl std::fmt::Display) -> InstanceError {
        InstanceError::SchemaError {
            table: self.name.to_string(),
            message: format!("line {line}: {message}"),
        }
    }

    fn number(&self, line: usize, field: &str) -> Result<f64, InstanceError> {
        let cleaned: String = field.chars().filter(|c| !matches!(c, '$' | ',' | ' ')).collect();
        cleaned
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.schema_err(line, format!("`{field}` is not a number")))
    }
}

fn canonical_columns(name: &str) -> &'static [&'static str] {
    TABLES.iter().find(|(t, _)| *t == name).map(|(_, c)| *c).unwrap()
}

fn read(dir: &Path, mapping: &ColumnMapping, name: &'static str) -> Result<Table, InstanceError> {
    Table::read(dir, mapping, name, canonical_columns(name))
}

/// Loads the seven canonical CSV tables from `data_dir`.
pub fn load_instance(data_dir: &Path) -> Result<ProblemInstance, InstanceError> {
    load_instance_with(data_dir, &ColumnMapping::default())
}

pub fn load_instance_with(
    data_dir: &Path,
    mapping: &ColumnMapping,
) -> Result<ProblemInstance, InstanceError> {
    // Every table must be present before anything is parsed.
    for (name, _) in TABLES {
        find_table(data_dir, mapping.file_for(name))?;
    }

    let capacities = read(data_dir, mapping, "WhCapacities")?;
    let mut warehouses: Vec<Warehouse> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (line, row) in &capacities.rows {
        let cap = capacities.number(*line, &row[1])?;
        if cap < 0.0 || cap.fract() != 0.0 || cap > u32::MAX as f64 {
            return Err(capacities.schema_err(*line, format!("invalid capacity `{}`", row[1])));
        }
        if index.insert(row[0].clone(), warehouses.len()).is_some() {
            return Err(capacities.schema_err(*line, format!("duplicate warehouse `{}`", row[0])));
        }
        warehouses.push(Warehouse::new(row[0].clone(), cap as u32, f64::NAN));
    }

    let lookup = |table: &Table, id: &str| -> Result<usize, InstanceError> {
        index.get(id).copied().ok_or_else(|| InstanceError::DanglingReference {
            table: table.name.to_string(),
            reference: format!("warehouse `{id}`"),
        })
    };

    let costs = read(data_dir, mapping, "WhCosts")?;
    for (line, row) in &costs.rows {
        let i = lookup(&costs, &row[0])?;
        warehouses[i].storage_rate_per_unit = costs.number(*line, &row[1])?;
    }
    if let Some(w) = warehouses.iter().find(|w| w.storage_rate_per_unit.is_nan()) {
        return Err(InstanceError::DanglingReference {
            table: "WhCosts".into(),
            reference: format!("no cost row for warehouse `{}`", w.warehouse_id),
        });
    }

    let ports = read(data_dir, mapping, "PlantPorts")?;
    for (_, row) in &ports.rows {
        let i = lookup(&ports, &row[0])?;
        warehouses[i].allowed_ports.insert(row[1].clone());
    }
    let products = read(data_dir, mapping, "ProductsPerPlant")?;
    for (_, row) in &products.rows {
        let i = lookup(&products, &row[0])?;
        warehouses[i].supported_products.insert(row[1].clone());
    }
    let vmi = read(data_dir, mapping, "VmiCustomers")?;
    for (_, row) in &vmi.rows {
        let i = lookup(&vmi, &row[0])?;
        warehouses[i].vmi_customers.insert(row[1].clone());
    }

    let rates = read(data_dir, mapping, "FreightRates")?;
    let mut bands = Vec::with_capacity(rates.rows.len());
    for (line, row) in &rates.rows {
        let service_level = row[3]
            .parse::<ServiceLevel>()
            .map_err(|e| rates.schema_err(*line, e))?;
        let mode = row[5]
            .parse::<TransportMode>()
            .map_err(|e| rates.schema_err(*line, e))?;
        bands.push(RateBand {
            key: LaneKey {
                origin_port: row[0].clone(),
                dest_port: row[1].clone(),
                courier: row[2].clone(),
                service_level,
                transport_day: row[4].clone(),
                mode,
            },
            weight_lower_kg: rates.number(*line, &row[6])?,
            weight_upper_kg: rates.number(*line, &row[7])?,
            rate_per_kg: rates.number(*line, &row[8])?,
            minimum_charge: rates.number(*line, &row[9])?,
        });
    }

    let order_table = read(data_dir, mapping, "OrderList")?;
    let mut orders = Vec::with_capacity(order_table.rows.len());
    for (line, row) in &order_table.rows {
        orders.push(Order {
            order_id: row[0].clone(),
            product_id: row[1].clone(),
            customer_id: row[2].clone(),
            destination_port: row[3].clone(),
            service_level: row[4]
                .parse()
                .map_err(|e| order_table.schema_err(*line, e))?,
            weight_kg: order_table.number(*line, &row[5])?,
            unit_quantity: order_table.number(*line, &row[6])?,
        });
    }

    ProblemInstance::build(orders, warehouses, bands)
}

fn writer(dir: &Path, name: &str) -> Result<csv::Writer<fs::File>, InstanceError> {
    let mut w = csv::Writer::from_path(dir.join(format!("{name}.csv")))
        .map_err(|e| InstanceError::Io(e.into()))?;
    w.write_record(canonical_columns(name))
        .map_err(|e| InstanceError::Io(e.into()))?;
    Ok(w)
}

/// Writes `instance` as seven canonical CSV tables into `dir`.
pub fn write_instance(instance: &ProblemInstance, dir: &Path) -> Result<(), InstanceError> {
    fs::create_dir_all(dir)?;
    let io = |e: csv::Error| InstanceError::Io(e.into());

    let mut w = writer(dir, "OrderList")?;
    for o in &instance.orders {
        w.write_record([
            o.order_id.as_str(),
            &o.product_id,
            &o.customer_id,
            &o.destination_port,
            o.service_level.as_str(),
            &o.weight_kg.to_string(),
            &o.unit_quantity.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;

    let mut w = writer(dir, "FreightRates")?;
    for lane in &instance.lanes {
        for b in &lane.bands {
            let k = &b.key;
            w.write_record([
                k.origin_port.as_str(),
                &k.dest_port,
                &k.courier,
                k.service_level.as_str(),
                &k.transport_day,
                k.mode.as_str(),
                &b.weight_lower_kg.to_string(),
                &b.weight_upper_kg.to_string(),
                &b.rate_per_kg.to_string(),
                &b.minimum_charge.to_string(),
            ])
            .map_err(io)?;
        }
    }
    w.flush()?;

    let sets: [(&str, fn(&Warehouse) -> &std::collections::BTreeSet<String>); 3] = [
        ("PlantPorts", |w| &w.allowed_ports),
        ("ProductsPerPlant", |w| &w.supported_products),
        ("VmiCustomers", |w| &w.vmi_customers),
    ];
    for (name, field) in sets {
        let mut w = writer(dir, name)?;
        for wh in &instance.warehouses {
            for v in field(wh) {
                w.write_record([wh.warehouse_id.as_str(), v]).map_err(io)?;
            }
        }
        w.flush()?;
    }

    let mut caps = writer(dir, "WhCapacities")?;
    let mut costs = writer(dir, "WhCosts")?;
    for wh in &instance.warehouses {
        caps.write_record([wh.warehouse_id.as_str(), &wh.daily_capacity_orders.to_string()])
            .map_err(io)?;
        costs
            .write_record([wh.warehouse_id.as_str(), &wh.storage_rate_per_unit.to_string()])
            .map_err(io)?;
    }
    caps.flush()?;
    costs.flush()?;
    Ok(())
}

/// Writes one row per order: the chosen warehouse and lane fields, blank
/// lane fields for customer-arranged freight.
pub fn write_assignment(instance: &ProblemInstance, choices: &[usize], path: &Path) -> Result<(), InstanceError> {
    let io = |e: csv::Error| InstanceError::Io(e.into());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record([
        "order_id",
        "route_index",
        "warehouse_id",
        "origin_port",
        "courier",
        "service_level",
        "transport_day",
        "mode",
    ])
    .map_err(io)?;
    for (k, &r) in choices.iter().enumerate() {
        let opt = instance.option(k, r);
        let wh = &instance.warehouses[opt.warehouse_index as usize].warehouse_id;
        let mut row = vec![instance.orders[k].order_id.clone(), r.to_string(), wh.clone()];
        match opt.lane {
            Some(id) => {
                let key = &instance.lane(id).key;
                row.extend([
                    key.origin_port.clone(),
                    key.courier.clone(),
                    key.service_level.to_string(),
                    key.transport_day.clone(),
                    key.mode.to_string(),
                ]);
            }
            None => row.extend(std::iter::repeat_n(String::new(), 5)),
        }
        w.write_record(&row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
