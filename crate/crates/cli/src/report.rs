use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use otreg_core::solver::{InitStrategy, Solution};
use serde::{Deserialize, Serialize};

use crate::config::{Comparison, ExperimentConfig};
use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    ThresholdFail,
    SolverFail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::ThresholdFail => 2,
            Status::SolverFail => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub n_targets: usize,
    pub iterations: usize,
    /// `maxᵢ |area(cellᵢ) − νᵢ| / area(U₁)`.
    pub residual: f64,
    pub init: InitStrategy,
    pub transport_cost: f64,
}

impl From<&Solution> for SolverMeta {
    fn from(s: &Solution) -> Self {
        SolverMeta { n_targets: s.cloud.len(), iterations: s.iterations, residual: s.residual, init: s.init, transport_cost: s.transport_cost() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub label: String,
    pub x: [f64; 2],
    pub exponent: f64,
    /// Bootstrap percentile interval (2.5%, 97.5%).
    pub ci: [f64; 2],
    pub samples: usize,
    pub csv: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub op: Comparison,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, value: f64, op: Comparison, threshold: f64) -> Self {
        Check { name: name.into(), value, op, threshold, pass: op.holds(value, threshold) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub experiment: String,
    pub status: Status,
    pub config: ExperimentConfig,
    pub solver: Vec<SolverMeta>,
    pub metrics: BTreeMap<String, f64>,
    pub exponents: Vec<ExponentFit>,
    pub checks: Vec<Check>,
    pub files: Vec<String>,
    /// Measurements that could not be taken, with the reason.
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub name: String,
    pub experiment: String,
    pub status: Status,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub status: Status,
    pub passed: usize,
    pub failed: usize,
    pub runs: Vec<RunSummary>,
}

/// Collects `report.json` from `dir` and its immediate subdirectories, in name order.
pub fn aggregate(dir: &Path) -> Result<Aggregate> {
    let io = |e: std::io::Error| CliError::Io(dir.to_path_buf(), e);
    let mut candidates = vec![dir.to_path_buf()];
    let mut subdirs: Vec<PathBuf> = std::fs::read_dir(dir).map_err(io)?.filter_map(|e| e.ok()).map(|e| e.path()).filter(|p| p.is_dir()).collect();
    subdirs.sort();
    candidates.extend(subdirs);
    let mut runs = Vec::new();
    for d in candidates {
        let path = d.join("report.json");
        if path.is_file() {
            let r = Report::load(&path)?;
            let rel = d.strip_prefix(dir).map(Path::to_path_buf).unwrap_or(d.clone());
            runs.push(RunSummary { dir: rel, name: r.name, experiment: r.experiment, status: r.status, checks: r.checks });
        }
    }
    if runs.is_empty() {
        return Err(CliError::Config(format!("no report.json under {}", dir.display())));
    }
    let passed = runs.iter().filter(|r| r.status == Status::Pass).count();
    let status = runs.iter().map(|r| r.status).max().unwrap_or(Status::Pass);
    Ok(Aggregate { status, passed, failed: runs.len() - passed, runs })
}
