//! Solve → analyze → emit.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, Mutex};

use log::info;
use otreg_core::analysis::IndexedPotential;
use otreg_core::solver::{newton_solve, sample_target_with, Solution, SolutionFile};
use otreg_core::Polygon;

use crate::config::{Comparison, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::experiments::{self, Outcome};
use crate::output::{write_atomic, write_json};
use crate::report::{Check, Report, SolverMeta, Status};

/// Solves the transport problem of `cfg` with `n` targets.
pub fn solve(cfg: &ExperimentConfig, n: usize) -> Result<Solution> {
    let source = cfg.source.build().map_err(|e| CliError::Config(format!("source: {e}")))?;
    let target = cfg.target.build().map_err(|e| CliError::Config(format!("target: {e}")))?;
    let s = &cfg.solver;
    let cloud = sample_target_with(&target, n, source.area(), cfg.seed, s.sampling.into(), s.lloyd_iterations).map_err(CliError::Solver)?;
    let sol = newton_solve(&source, &cloud, &s.options()).map_err(CliError::Solver)?;
    info!("solved n = {n}: {} iterations, residual {:.3e}", sol.iterations, sol.residual);
    Ok(sol)
}

/// Solutions shared between runs that discretize the same problem.
#[derive(Default)]
pub struct SolveCache {
    inner: Mutex<HashMap<String, Arc<Solution>>>,
}

impl SolveCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn solve(&self, cfg: &ExperimentConfig, n: usize) -> Result<Arc<Solution>> {
        let key = serde_json::to_string(&(&cfg.source, &cfg.target, n, cfg.seed, &cfg.solver))?;
        if let Some(s) = self.inner.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let s = Arc::new(solve(cfg, n)?);
        self.inner.lock().unwrap().insert(key, s.clone());
        Ok(s)
    }

    /// Every solution computed so far.
    pub fn solutions(&self) -> Vec<Arc<Solution>> {
        let map = self.inner.lock().unwrap();
        let mut keys: Vec<&String> = map.keys().collect();
        keys.sort();
        keys.into_iter().map(|k| map[k].clone()).collect()
    }
}

/// What an experiment sees: the configuration, both domains and the solved potential.
pub struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub cache: &'a SolveCache,
    pub source: Polygon,
    pub target: Polygon,
    pub sol: Arc<Solution>,
    pub psi: IndexedPotential,
}

impl Context<'_> {
    /// The same problem at `factor` times the targets.
    pub fn refined(&self, factor: usize) -> Result<(Arc<Solution>, IndexedPotential)> {
        let sol = self.cache.solve(self.cfg, self.cfg.n_targets * factor)?;
        let psi = IndexedPotential::new(sol.potential.clone())?;
        Ok((sol, psi))
    }
}

fn checks(cfg: &ExperimentConfig, values: &BTreeMap<&'static str, f64>, residual: f64) -> Vec<Check> {
    let mass = cfg.thresholds.get("mass_residual").copied().unwrap_or(cfg.solver.tol);
    let mut out = vec![Check::new("mass_residual", residual, Comparison::AtMost, mass)];
    for &(name, op) in cfg.experiment.checks() {
        if let Some(&t) = cfg.thresholds.get(name) {
            out.push(Check::new(name, values.get(name).copied().unwrap_or(f64::NAN), op, t));
        }
    }
    out
}

/// Runs the experiment of `cfg`, writing every output into `out_dir`. Solver
/// failures produce a report with [`Status::SolverFail`] rather than an error.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path, cache: &SolveCache) -> Result<Report> {
    cfg.validate()?;
    let source = cfg.source.build()?;
    let target = cfg.target.build()?;
    write_json(&out_dir.join("config.json"), cfg)?;
    let mut report = Report {
        name: cfg.name.clone(),
        experiment: cfg.experiment.kind().into(),
        status: Status::Pass,
        config: cfg.clone(),
        solver: Vec::new(),
        metrics: BTreeMap::new(),
        exponents: Vec::new(),
        checks: Vec::new(),
        files: vec!["config.json".into()],
        notes: Vec::new(),
        error: None,
    };
    let finish = |mut report: Report| -> Result<Report> {
        report.files.push("report.json".into());
        report.files.sort();
        write_json(&out_dir.join("report.json"), &report)?;
        Ok(report)
    };

    let sol = match cache.solve(cfg, cfg.n_targets) {
        Ok(s) => s,
        Err(CliError::Solver(e)) => {
            report.status = Status::SolverFail;
            report.error = Some(e.to_string());
            return finish(report);
        }
        Err(e) => return Err(e),
    };
    report.solver.push(SolverMeta::from(sol.as_ref()));
    write_json(&out_dir.join("solution.json"), &SolutionFile::from(sol.as_ref()))?;
    report.files.push("solution.json".into());

    let psi = IndexedPotential::new(sol.potential.clone())?;
    let ctx = Context { cfg, cache, source, target, sol: sol.clone(), psi };
    info!("running {} on {}", cfg.experiment.kind(), cfg.name);
    let outcome: Outcome = match experiments::run(&ctx) {
        Ok(o) => o,
        Err(CliError::Solver(e)) => {
            report.status = Status::SolverFail;
            report.error = Some(e.to_string());
            return finish(report);
        }
        Err(CliError::Analysis(e)) => {
            report.status = Status::ThresholdFail;
            report.error = Some(e.to_string());
            report.checks = checks(cfg, &BTreeMap::new(), sol.residual);
            return finish(report);
        }
        Err(e) => return Err(e),
    };

    for t in &outcome.tables {
        write_atomic(&out_dir.join(&t.file), &t.to_csv()?)?;
        report.files.push(t.file.clone());
    }
    for (file, svg) in &outcome.svgs {
        write_atomic(&out_dir.join(file), svg.as_bytes())?;
        report.files.push(file.clone());
    }
    report.solver.extend(outcome.extra_solves);
    let residual = report.solver.iter().map(|s| s.residual).fold(0.0, f64::max);
    report.checks = checks(cfg, &outcome.values, residual);
    report.metrics = outcome.metrics;
    for (k, v) in &outcome.values {
        report.metrics.insert((*k).to_string(), *v);
    }
    report.exponents = outcome.exponents;
    report.notes = outcome.notes;
    if report.checks.iter().any(|c| !c.pass) {
        report.status = Status::ThresholdFail;
    }
    finish(report)
}
