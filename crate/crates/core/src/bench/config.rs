use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use super::BenchError;
use crate::acs::{AcsParams, HeuristicForm, Reinforcement};
use crate::parallel::Architecture;
use crate::real::Precision;

/// Architecture plus ants per instance, written `pa` or `pa:5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArchSpec {
    pub architecture: Architecture,
    pub ants: usize,
}

impl ArchSpec {
    pub fn new(architecture: Architecture, ants: usize) -> Self {
        Self { architecture, ants }
    }
}

impl fmt::Display for ArchSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ants == 1 {
            write!(f, "{}", self.architecture)
        } else {
            write!(f, "{}:{}", self.architecture, self.ants)
        }
    }
}

impl FromStr for ArchSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (arch, ants) = match s.split_once(':') {
            Some((a, k)) => {
                let k: usize = k
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad ant count in `{s}`"))?;
                (a, k)
            }
            None => (s, 1),
        };
        if ants == 0 {
            return Err(format!("ant count must be positive in `{s}`"));
        }
        Ok(ArchSpec::new(arch.parse()?, ants))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub data_dir: PathBuf,
    /// Optional header mapping for datasets with non-canonical columns.
    pub mapping_file: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub architectures: Vec<ArchSpec>,
    pub instance_counts: Vec<usize>,
    pub repeats: usize,
    pub solution_budget: u64,
    /// Proximity thresholds in percent, strictly increasing.
    pub checkpoints: Vec<f64>,
    pub best_known_cost: f64,
    pub master_seed: u64,
    pub precision: Precision,
    pub checkpoint_stride: usize,
    /// Fraction of repeats that must reach a threshold for the cell to be
    /// reported.
    pub min_reach_fraction: f64,
    pub max_iterations: Option<usize>,
    pub workers: Option<usize>,
    pub equivalence_mode: bool,
    /// Runs executed concurrently by the convergence protocol.
    pub jobs: usize,
    pub timing_iteration_cap: usize,
    pub timing_time_limit_s: f64,
    pub timing_repeats: usize,
    pub acs: AcsParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            data_dir: PathBuf::from("data/supply_chain"),
            mapping_file: None,
            output_dir: PathBuf::from("results"),
            architectures: vec![
                ArchSpec::new(Architecture::Iac, 1),
                ArchSpec::new(Architecture::Pa, 1),
                ArchSpec::new(Architecture::Pawv, 1),
            ],
            instance_counts: (0..=10).map(|p| 1usize << p).collect(),
            repeats: 10,
            solution_budget: 768_000,
            checkpoints: vec![99.0, 99.25, 99.5, 99.6, 99.75, 99.9],
            best_known_cost: 2_701_367.58,
            master_seed: 1,
            precision: Precision::Double,
            checkpoint_stride: 5,
            min_reach_fraction: 0.8,
            max_iterations: None,
            workers: None,
            equivalence_mode: true,
            jobs: 1,
            timing_iteration_cap: 500,
            timing_time_limit_s: 600.0,
            timing_repeats: 3,
            acs: AcsParams::default(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAcs {
    rho: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    q0: Option<f64>,
    tau0: Option<f64>,
    deposit_scale: Option<f64>,
    heuristic: Option<String>,
    reinforcement: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    data_dir: Option<PathBuf>,
    mapping_file: Option<PathBuf>,
    output_dir: Option<PathBuf>,
    architectures: Option<Vec<String>>,
    instance_counts: Option<Vec<usize>>,
    repeats: Option<usize>,
    solution_budget: Option<u64>,
    checkpoints: Option<Vec<f64>>,
    best_known_cost: Option<f64>,
    master_seed: Option<u64>,
    precision: Option<String>,
    checkpoint_stride: Option<usize>,
    min_reach_fraction: Option<f64>,
    max_iterations: Option<usize>,
    workers: Option<usize>,
    equivalence_mode: Option<bool>,
    jobs: Option<usize>,
    timing_iteration_cap: Option<usize>,
    timing_time_limit_s: Option<f64>,
    timing_repeats: Option<usize>,
    acs: Option<RawAcs>,
}

impl ExperimentConfig {
    /// Parses a TOML document; missing keys keep their defaults.
    pub fn from_toml_str(text: &str) -> Result<Self, BenchError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        let d = Self::default();
        let architectures = match raw.architectures {
            Some(list) => list
                .iter()
                .map(|s| s.parse::<ArchSpec>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(BenchError::Config)?,
            None => d.architectures,
        };
        let precision = match raw.precision {
            Some(p) => p.parse().map_err(BenchError::Config)?,
            None => d.precision,
        };
        let mut acs = d.acs;
        if let Some(a) = raw.acs {
            acs.evaporation_rho = a.rho.unwrap_or(acs.evaporation_rho);
            acs.alpha = a.alpha.unwrap_or(acs.alpha);
            acs.beta = a.beta.unwrap_or(acs.beta);
            acs.q0 = a.q0.unwrap_or(acs.q0);
            acs.tau0 = a.tau0.or(acs.tau0);
            acs.deposit_scale = a.deposit_scale.unwrap_or(acs.deposit_scale);
            if let Some(h) = a.heuristic {
                acs.heuristic = match h.as_str() {
                    "weight_over_gap" => HeuristicForm::WeightOverGap,
                    "gap_over_weight" => HeuristicForm::GapOverWeight,
                    other => return Err(BenchError::Config(format!("unknown heuristic `{other}`"))),
                };
            }
            if let Some(r) = a.reinforcement {
                acs.reinforcement = match r.as_str() {
                    "best_so_far" => Reinforcement::BestSoFar,
                    "iteration_best" => Reinforcement::IterationBest,
                    other => return Err(BenchError::Config(format!("unknown reinforcement `{other}`"))),
                };
            }
        }
        let config = Self {
            data_dir: raw.data_dir.unwrap_or(d.data_dir),
            mapping_file: raw.mapping_file,
            output_dir: raw.output_dir.unwrap_or(d.output_dir),
            architectures,
            instance_counts: raw.instance_counts.unwrap_or(d.instance_counts),
            repeats: raw.repeats.unwrap_or(d.repeats),
            solution_budget: raw.solution_budget.unwrap_or(d.solution_budget),
            checkpoints: raw.checkpoints.unwrap_or(d.checkpoints),
            best_known_cost: raw.best_known_cost.unwrap_or(d.best_known_cost),
            master_seed: raw.master_seed.unwrap_or(d.master_seed),
            precision,
            checkpoint_stride: raw.checkpoint_stride.unwrap_or(d.checkpoint_stride),
            min_reach_fraction: raw.min_reach_fraction.unwrap_or(d.min_reach_fraction),
            max_iterations: raw.max_iterations,
            workers: raw.workers,
            equivalence_mode: raw.equivalence_mode.unwrap_or(d.equivalence_mode),
            jobs: raw.jobs.unwrap_or(d.jobs),
            timing_iteration_cap: raw.timing_iteration_cap.unwrap_or(d.timing_iteration_cap),
            timing_time_limit_s: raw.timing_time_limit_s.unwrap_or(d.timing_time_limit_s),
            timing_repeats: raw.timing_repeats.unwrap_or(d.timing_repeats),
            acs,
        };
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file. Relative paths inside it are resolved against
    /// the file's directory.
    pub fn from_file(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut config.data_dir);
        resolve(&mut config.output_dir);
        if let Some(m) = config.mapping_file.as_mut() {
            resolve(m);
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::Config(m.to_string()));
        if self.repeats == 0 {
            return bad("repeats must be at least 1");
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return bad("checkpoints must be strictly increasing");
        }
        if self.instance_counts.contains(&0) {
            return bad("instance counts must be positive");
        }
        if self.checkpoint_stride == 0 {
            return bad("checkpoint_stride must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.min_reach_fraction) {
            return bad("min_reach_fraction must lie in [0, 1]");
        }
        if !(self.best_known_cost > 0.0) {
            return bad("best_known_cost must be positive");
        }
        if self.jobs == 0 || self.timing_repeats == 0 || self.timing_iteration_cap == 0 {
            return bad("jobs, timing_repeats and timing_iteration_cap must be positive");
        }
        if self.workers == Some(0) {
            return bad("workers must be positive");
        }
        self.acs
            .validate()
            .map_err(|e| BenchError::Config(e.to_string()))
    }

    /// Canonical text used for the config hash in run metadata.
    pub fn canonical(&self) -> String {
        format!("{self:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arch_spec_round_trip() {
        for s in ["iac", "pa", "pawv", "pa:5"] {
            assert_eq!(s.parse::<ArchSpec>().unwrap().to_string(), s);
        }
        assert!("pa:0".parse::<ArchSpec>().is_err());
        assert!("ring".parse::<ArchSpec>().is_err());
    }

    #[test]
    fn defaults_and_overrides() {
        let c = ExperimentConfig::from_toml_str(
            "architectures = [\"pa\", \"pa:5\"]\nrepeats = 3\n[acs]\nq0 = 0.8\nreinforcement = \"iteration_best\"\n",
        )
        .unwrap();
        assert_eq!(c.repeats, 3);
        assert_eq!(c.architectures[1].ants, 5);
        assert_eq!(c.acs.q0, 0.8);
        assert_eq!(c.acs.reinforcement, Reinforcement::IterationBest);
        assert_eq!(c.instance_counts.len(), 11);
        assert_eq!(c.solution_budget, 768_000);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml_str("repeats = 0").is_err());
        assert!(ExperimentConfig::from_toml_str("checkpoints = [99.5, 99.0]").is_err());
        assert!(ExperimentConfig::from_toml_str("unknown_key = 1").is_err());
        assert!(ExperimentConfig::from_toml_str("precision = \"f16\"").is_err());
    }
}
