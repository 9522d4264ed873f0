//! Batch experiments: every (instance, seed) pair under every method with a
//! shared budget, followed by the comparison report.

use std::path::{Path, PathBuf};

use lotus_core::dual::MappingRule;
use lotus_core::gen::{generate, manifest_toml, GenConfig};
use lotus_core::smip::serialize_instance;
use lotus_core::InstanceFile;
use serde::{Deserialize, Serialize};

use crate::error::{read_to_string, write_file, BenchError};
use crate::report::{compare_runs, ComparisonReport};
use crate::run::{execute, load_instance, write_run, Method, RunMeta};

pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSource {
    pub name: String,
    /// Instance file; relative paths start at the config file's directory.
    #[serde(default)]
    pub file: Option<PathBuf>,
    /// Generator settings; each experiment seed replaces `seed`.
    #[serde(default)]
    pub generate: Option<GenConfig>,
}

fn default_methods() -> Vec<Method> {
    vec![Method::Dd, Method::Lotus]
}
fn default_fraction() -> f64 {
    0.30
}
fn default_ws_iterations() -> usize {
    10
}
fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn default_grid_step() -> f64 {
    1.0
}
fn default_max_iterations() -> usize {
    200
}
fn default_mapping() -> MappingRule {
    MappingRule::ProbabilityScaled
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instances: Vec<InstanceSource>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// Wall-clock budget of every run.
    pub budget_s: f64,
    #[serde(default = "default_fraction")]
    pub fraction: f64,
    #[serde(default = "default_ws_iterations")]
    pub ws_iterations: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Relative paths start at the config file's directory.
    pub out_dir: PathBuf,
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_mapping")]
    pub mapping: MappingRule,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::Config(m));
        if self.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        if self.instances.is_empty() || self.seeds.is_empty() {
            return bad("instances and seeds must be non-empty".into());
        }
        if !(self.grid_step.is_finite() && self.grid_step > 0.0) {
            return bad(format!("grid step {} must be positive", self.grid_step));
        }
        for (i, src) in self.instances.iter().enumerate() {
            if src.name.is_empty() || src.name.contains(['/', '\\']) {
                return bad(format!("instance {i} needs a plain, non-empty name"));
            }
            if src.file.is_some() == src.generate.is_some() {
                return bad(format!("instance {} needs exactly one of `file` and `generate`", src.name));
            }
        }
        let mut names: Vec<&str> = self.instances.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return bad("instance names must be unique".into());
        }
        self.meta("x", 0, self.methods[0]).validate()
    }

    fn meta(&self, instance: &str, seed: u64, method: Method) -> RunMeta {
        RunMeta {
            instance: instance.to_string(),
            seed,
            method,
            budget_s: self.budget_s,
            fraction: self.fraction,
            ws_iterations: self.ws_iterations,
            max_iterations: self.max_iterations,
            mapping: self.mapping,
        }
    }

    /// Parses and validates a TOML config, resolving relative paths against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let mut config: ExperimentConfig = toml::from_str(&read_to_string(path)?)
            .map_err(|e| BenchError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut config.out_dir);
        for src in &mut config.instances {
            if let Some(f) = &mut src.file {
                resolve(f);
            }
        }
        config.validate()?;
        Ok(config)
    }
}

pub fn pair_dir(out_dir: &Path, instance: &str, seed: u64) -> PathBuf {
    out_dir.join(format!("{instance}-s{seed}"))
}

fn instance_for(src: &InstanceSource, seed: u64, dir: &Path) -> Result<InstanceFile, BenchError> {
    if let Some(file) = &src.file {
        return load_instance(file);
    }
    let gen = GenConfig { seed, ..src.generate.clone().expect("validated source") };
    let instance = InstanceFile::Production(generate(&gen)?);
    write_file(&dir.join("instance.txt"), serialize_instance(&instance).as_bytes())?;
    write_file(&dir.join("instance.txt.manifest.toml"), manifest_toml(&gen).as_bytes())?;
    Ok(instance)
}

/// Runs every job sequentially, then writes `report.json` into `out_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ComparisonReport, BenchError> {
    config.validate()?;
    let mut methods = config.methods.clone();
    methods.sort();
    methods.dedup();
    for src in &config.instances {
        for &seed in &config.seeds {
            let dir = pair_dir(&config.out_dir, &src.name, seed);
            let instance = instance_for(src, seed, &dir)?;
            for &method in &methods {
                let meta = config.meta(&src.name, seed, method);
                let result = execute(&instance, &meta)?;
                write_run(&dir.join(method.as_str()), &meta, &result)?;
            }
        }
    }
    let report = compare_runs(&config.out_dir, config.grid_step)?;
    write_file(&config.out_dir.join(REPORT_FILE), report.to_json().as_bytes())?;
    Ok(report)
}
