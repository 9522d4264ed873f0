//! One solver run: its configuration, execution and on-disk artifacts.
//!
//! A run directory holds `run.json` ([`RunMeta`]), `trace.csv`,
//! `summary.json` and, for LOTUS, `reduction.txt`.

use std::path::{Path, PathBuf};
use std::time::Duration;

use lotus_core::dual::{
    read_trace, run_dd, run_lotus, write_trace, DualConfig, IterationRecord, MappingRule, RunSummary,
};
use lotus_core::smip::parse_instance;
use lotus_core::{InstanceFile, RunConfig, RunResult};
use serde::{Deserialize, Serialize};

use crate::error::{read_to_string, write_file, BenchError};

pub const RUN_FILE: &str = "run.json";
pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const REDUCTION_FILE: &str = "reduction.txt";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dd,
    Lotus,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Dd => "dd",
            Method::Lotus => "lotus",
        }
    }
}

/// Everything that determines a run. Two runs pair up when they share
/// `instance`, `seed` and `budget_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub instance: String,
    /// Pairing label. The solver itself is deterministic.
    pub seed: u64,
    pub method: Method,
    pub budget_s: f64,
    pub fraction: f64,
    pub ws_iterations: usize,
    pub max_iterations: usize,
    pub mapping: MappingRule,
}

impl RunMeta {
    pub fn validate(&self) -> Result<(), BenchError> {
        if !(self.budget_s.is_finite() && self.budget_s > 0.0) {
            return Err(BenchError::Config(format!("budget {} s must be positive", self.budget_s)));
        }
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(BenchError::Config(format!("fraction {} outside (0, 1]", self.fraction)));
        }
        if self.max_iterations == 0 {
            return Err(BenchError::Config("max iterations must be positive".into()));
        }
        Ok(())
    }

    /// Core configuration. Subproblems are solved sequentially so that
    /// iteration times reflect a single thread.
    pub fn run_config(&self, omega: usize) -> RunConfig {
        let defaults = RunConfig::default();
        RunConfig {
            fraction: self.fraction,
            ws_iterations: self.ws_iterations,
            mapping: self.mapping,
            omega: (omega > 0).then_some(omega as f64),
            total_budget: Some(Duration::from_secs_f64(self.budget_s)),
            dual: DualConfig { max_iterations: self.max_iterations, parallel: false, ..defaults.dual },
            recovery: defaults.recovery,
        }
    }
}

pub fn load_instance(path: &Path) -> Result<InstanceFile, BenchError> {
    let text = read_to_string(path)?;
    parse_instance(&text).map_err(|e| BenchError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

pub fn execute(instance: &InstanceFile, meta: &RunMeta) -> Result<RunResult, BenchError> {
    meta.validate()?;
    let problem = instance.to_problem()?;
    let config = meta.run_config(instance.default_omega());
    log::info!(
        "{} on {} (seed {}, |S| = {}, budget {} s)",
        meta.method.as_str(),
        meta.instance,
        meta.seed,
        problem.n_scenarios(),
        meta.budget_s
    );
    let result = match meta.method {
        Method::Dd => run_dd(&problem, &config)?,
        Method::Lotus => run_lotus(&problem, &config)?,
    };
    log::info!(
        "{} finished: {:?}, Z_P = {:?}, Z_D = {:?}",
        meta.method.as_str(),
        result.termination,
        result.summary.best_primal,
        result.summary.best_dual
    );
    Ok(result)
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

pub fn write_run(dir: &Path, meta: &RunMeta, result: &RunResult) -> Result<(), BenchError> {
    write_file(&dir.join(RUN_FILE), &json(meta))?;
    let mut trace = Vec::new();
    write_trace(&result.trace, &mut trace).map_err(|e| BenchError::Write {
        path: dir.join(TRACE_FILE),
        source: std::io::Error::other(e),
    })?;
    write_file(&dir.join(TRACE_FILE), &trace)?;
    write_file(&dir.join(SUMMARY_FILE), &json(&result.summary))?;
    if let Some(r) = &result.reduction {
        write_file(&dir.join(REDUCTION_FILE), r.to_text().as_bytes())?;
    }
    Ok(())
}

/// A run read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedRun {
    pub dir: PathBuf,
    pub meta: RunMeta,
    pub summary: RunSummary,
    pub trace: Vec<IterationRecord>,
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, BenchError> {
    serde_json::from_str(&read_to_string(path)?)
        .map_err(|e| BenchError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

pub fn load_run(dir: &Path) -> Result<LoadedRun, BenchError> {
    let meta = parse_json(&dir.join(RUN_FILE))?;
    let summary = parse_json(&dir.join(SUMMARY_FILE))?;
    let trace_path = dir.join(TRACE_FILE);
    let text = read_to_string(&trace_path)?;
    let trace = read_trace(text.as_bytes())
        .map_err(|e| BenchError::Parse { path: trace_path.clone(), message: e.to_string() })?;
    Ok(LoadedRun { dir: dir.to_path_buf(), meta, summary, trace })
}

/// Every run directory below `root`, in path order.
pub fn discover_runs(root: &Path) -> Result<Vec<LoadedRun>, BenchError> {
    if !root.is_dir() {
        return Err(BenchError::Config(format!("{} is not a directory", root.display())));
    }
    let mut dirs = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let entries = std::fs::read_dir(&dir).map_err(|source| BenchError::Read { path: dir.clone(), source })?;
        for entry in entries {
            let path = entry.map_err(|source| BenchError::Read { path: dir.clone(), source })?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().is_some_and(|n| n == RUN_FILE) {
                dirs.push(dir.clone());
            }
        }
    }
    dirs.sort();
    dirs.iter().map(|d| load_run(d)).collect()
}
