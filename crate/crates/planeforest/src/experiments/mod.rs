//! Monte Carlo harness: experiment configuration, report structure, degree
//! families, and the named experiments verifying the convergence statements
//! and concentration bounds at desk scale.

mod bounds;
mod convergence;
mod families;
pub mod verify;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bounds::{
    exhaustive_variance_tail, exp_degree_concentration, exp_height_tail,
    exp_small_tree_heights, exp_variance_bound, height_tail_bound, variance_tail_bound,
};
pub use convergence::{exp_largest_tree_scaling, exp_tree_sizes, exp_walk_convergence};
pub use families::DegreeFamily;

use crate::continuum::ContinuumError;
use crate::degrees::DegreeError;
use crate::forests::ForestError;
use crate::paths::PathError;
use crate::sampler::SeededRng;
use crate::stats::StatsError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error(transparent)]
    Degree(#[from] DegreeError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Continuum(#[from] ContinuumError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_rho() -> f64 {
    0.1
}

fn default_significance() -> f64 {
    1e-3
}

fn default_ks_margin() -> f64 {
    0.01
}

fn default_height_bias_margin() -> f64 {
    0.03
}

fn default_lambda() -> f64 {
    1.0
}

fn default_grid_m() -> usize {
    1 << 14
}

/// Configuration shared by all experiments. See the README for the JSON
/// schema; unknown experiments reject at dispatch, never silently.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub degree_family: DegreeFamily,
    pub n_list: Vec<u64>,
    #[serde(default = "default_lambda")]
    pub lambda_target: f64,
    pub replicates: usize,
    #[serde(default = "default_grid_m")]
    pub grid_m: usize,
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<String>,
    /// Deviation level for the `B^{eps,i}` tail-event check.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Acceptable frequency of the small-tree large-height event.
    #[serde(default = "default_rho")]
    pub rho: f64,
    /// Significance level for the KS/chi-square thresholds.
    #[serde(default = "default_significance")]
    pub significance: f64,
    /// Additive margin on KS thresholds covering grid discretization.
    #[serde(default = "default_ks_margin")]
    pub ks_margin: f64,
    /// Extra margin for the largest-tree height comparison: discrete tree
    /// heights converge at rate `O(log k / sqrt(k))`, measurably ~0.03 in KS
    /// at n = 10^4, slower than the walk marginals.
    #[serde(default = "default_height_bias_margin")]
    pub height_bias_margin: f64,
    /// Grid used by the excursion-length sum check (default `2^16`).
    #[serde(default)]
    pub sum_check_m: Option<usize>,
    #[serde(default)]
    pub sum_check_replicates: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.replicates == 0 {
            return Err(ExperimentError::InvalidConfig("replicates must be >= 1".into()));
        }
        if self.n_list.is_empty() {
            return Err(ExperimentError::InvalidConfig("n_list must be non-empty".into()));
        }
        if self.grid_m < 2 {
            return Err(ExperimentError::InvalidConfig("grid_m must be >= 2".into()));
        }
        for &n in &self.n_list {
            self.degree_family.build(n, self.lambda_target)?;
        }
        Ok(())
    }

    /// Replicate RNG for a given experiment / n-index / side, so that every
    /// worker owns its own stream and reports are reproducible bit-for-bit.
    pub(crate) fn rng(&self, exp: u8, n_idx: usize, side: u8, replicate: usize) -> SeededRng {
        let stream = ((exp as u64) << 56)
            | ((n_idx as u64 & 0xff) << 48)
            | ((side as u64) << 40)
            | (replicate as u64 & 0xff_ffff_ffff);
        SeededRng::new(self.seed, stream)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
    /// "<=" for upper bounds, ">=" for lower bounds.
    pub comparison: String,
}

/// Statistics, tables and pass/fail verdicts of one experiment run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub statistics: BTreeMap<String, f64>,
    pub tables: BTreeMap<String, String>,
    pub verdicts: Vec<Verdict>,
}

impl ExperimentReport {
    pub fn new(name: &str, cfg: &ExperimentConfig) -> Self {
        let mut parameters = BTreeMap::new();
        parameters.insert(
            "config".to_string(),
            serde_json::to_value(cfg).expect("config serializes"),
        );
        ExperimentReport {
            name: name.to_string(),
            parameters,
            statistics: BTreeMap::new(),
            tables: BTreeMap::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn set_parameter(&mut self, key: &str, value: impl Serialize) {
        self.parameters.insert(
            key.to_string(),
            serde_json::to_value(value).expect("parameter serializes"),
        );
    }

    pub fn set_statistic(&mut self, key: &str, value: f64) {
        self.statistics.insert(key.to_string(), value);
    }

    pub fn add_table(&mut self, key: &str, csv: String) {
        self.tables.insert(key.to_string(), csv);
    }

    /// Upper-bound verdict `value <= threshold`; the threshold is also
    /// recorded in `parameters` so every verdict stays traceable.
    pub fn add_verdict_le(&mut self, name: &str, value: f64, threshold: f64) {
        self.set_parameter(&format!("threshold:{name}"), threshold);
        self.verdicts.push(Verdict {
            name: name.to_string(),
            pass: value <= threshold,
            value,
            threshold,
            comparison: "<=".to_string(),
        });
    }

    /// Lower-bound verdict `value >= threshold`.
    pub fn add_verdict_ge(&mut self, name: &str, value: f64, threshold: f64) {
        self.set_parameter(&format!("threshold:{name}"), threshold);
        self.verdicts.push(Verdict {
            name: name.to_string(),
            pass: value >= threshold,
            value,
            threshold,
            comparison: ">=".to_string(),
        });
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn failed(&self) -> Vec<&Verdict> {
        self.verdicts.iter().filter(|v| !v.pass).collect()
    }

    /// Writes `report.json` plus one CSV file per table into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<(), ExperimentError> {
        std::fs::create_dir_all(dir)?;
        let mut file = std::fs::File::create(dir.join("report.json"))?;
        file.write_all(serde_json::to_string_pretty(self)?.as_bytes())?;
        for (name, csv) in &self.tables {
            std::fs::write(dir.join(format!("{name}.csv")), csv)?;
        }
        Ok(())
    }
}

pub const EXPERIMENT_NAMES: [&str; 7] = [
    "walk_convergence",
    "tree_sizes",
    "height_tail",
    "variance_bound",
    "degree_concentration",
    "small_tree_heights",
    "largest_tree_scaling",
];

pub fn run_experiment(
    name: &str,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    match name {
        "walk_convergence" => exp_walk_convergence(cfg),
        "tree_sizes" => exp_tree_sizes(cfg),
        "height_tail" => exp_height_tail(cfg),
        "variance_bound" => exp_variance_bound(cfg),
        "degree_concentration" => exp_degree_concentration(cfg),
        "small_tree_heights" => exp_small_tree_heights(cfg),
        "largest_tree_scaling" => exp_largest_tree_scaling(cfg),
        other => Err(ExperimentError::UnknownExperiment(other.to_string())),
    }
}

/// Two-column CSV from parallel slices.
pub(crate) fn two_column_csv(header: (&str, &str), a: &[f64], b: &[f64]) -> String {
    let mut out = format!("{},{}\n", header.0, header.1);
    for (x, y) in a.iter().zip(b) {
        out.push_str(&format!("{x},{y}\n"));
    }
    out
}

/// Evenly spaced quantiles of a sample, for QQ plot data.
pub(crate) fn quantiles(sorted: &[f64], levels: usize) -> Vec<f64> {
    (1..levels)
        .map(|k| {
            let idx = (k as f64 / levels as f64 * sorted.len() as f64) as usize;
            sorted[idx.min(sorted.len() - 1)]
        })
        .collect()
}

pub(crate) fn sorted_vec(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs
}
