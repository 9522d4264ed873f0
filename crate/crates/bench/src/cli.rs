use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use lotus_core::dual::MappingRule;
use lotus_core::gen::{generate, manifest_toml, validate, GenConfig};
use lotus_core::reduction::reduce;
use lotus_core::smip::serialize_instance;
use lotus_core::InstanceFile;

use crate::error::{read_to_string, write_file, BenchError};
use crate::experiment::{run_experiment, ExperimentConfig};
use crate::report::compare_runs;
use crate::run::{execute, load_instance, write_run, Method, RunMeta};

#[derive(Debug, Parser)]
#[command(name = "lotus", version, about = "Warm-started dual decomposition for two-stage stochastic MIPs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance with DD or LOTUS and write its run directory.
    Solve(SolveArgs),
    /// Generate a production-planning instance and its manifest.
    Generate(GenerateArgs),
    /// Pair up run directories and write the comparison report.
    Compare(CompareArgs),
    /// Reduce an instance's scenario set and write the reduction.
    Reduce(ReduceArgs),
    /// Run a batch experiment from a TOML config.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MappingArg {
    Verbatim,
    ProbabilityScaled,
}

impl From<MappingArg> for MappingRule {
    fn from(m: MappingArg) -> Self {
        match m {
            MappingArg::Verbatim => MappingRule::Verbatim,
            MappingArg::ProbabilityScaled => MappingRule::ProbabilityScaled,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long)]
    pub budget_s: f64,
    #[arg(long, default_value_t = 0.30)]
    pub fraction: f64,
    #[arg(long, default_value_t = 10)]
    pub ws_iters: usize,
    /// Pairing label recorded in `run.json`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    #[arg(long, value_enum, default_value = "probability-scaled")]
    pub mapping: MappingArg,
    /// Instance name used for pairing; defaults to the file stem.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// TOML generator settings; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub runs: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Grid step of the ratio series, in seconds.
    #[arg(long, default_value_t = 1.0)]
    pub grid_step: f64,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub fraction: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Feature weight; defaults to the demand dimension.
    #[arg(long)]
    pub omega: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "instance".to_string(), |s| s.to_string_lossy().into_owned())
}

pub fn solve(args: &SolveArgs) -> Result<(), BenchError> {
    let meta = RunMeta {
        instance: args.name.clone().unwrap_or_else(|| stem(&args.instance)),
        seed: args.seed,
        method: args.method,
        budget_s: args.budget_s,
        fraction: args.fraction,
        ws_iterations: args.ws_iters,
        max_iterations: args.max_iters,
        mapping: args.mapping.into(),
    };
    meta.validate()?;
    let instance = load_instance(&args.instance)?;
    let result = execute(&instance, &meta)?;
    write_run(&args.out, &meta, &result)
}

pub fn generate_instance(args: &GenerateArgs) -> Result<(), BenchError> {
    let mut config: GenConfig = match &args.config {
        Some(path) => toml::from_str(&read_to_string(path)?)
            .map_err(|e| BenchError::Parse { path: path.clone(), message: e.to_string() })?,
        None => GenConfig::default(),
    };
    config.seed = args.seed;
    let instance = generate::<f64>(&config)?;
    let report = validate(&instance);
    if !report.passed() {
        log::warn!("generated instance fails checks: {report:?}");
    }
    write_file(&args.out, serialize_instance(&InstanceFile::Production(instance)).as_bytes())?;
    let mut manifest = args.out.clone().into_os_string();
    manifest.push(".manifest.toml");
    write_file(Path::new(&manifest), manifest_toml(&config).as_bytes())
}

pub fn compare(args: &CompareArgs) -> Result<(), BenchError> {
    let report = compare_runs(&args.runs, args.grid_step)?;
    write_file(&args.out, report.to_json().as_bytes())
}

pub fn reduce_instance(args: &ReduceArgs) -> Result<(), BenchError> {
    let instance = load_instance(&args.instance)?;
    let problem = instance.to_problem()?;
    let omega = args.omega.unwrap_or(instance.default_omega().max(1) as f64);
    let (_, result) = reduce(&problem, args.fraction, omega)?;
    log::info!("kept {} of {} scenarios", result.selected.len(), problem.n_scenarios());
    write_file(&args.out, result.to_text().as_bytes())
}

pub fn run(cli: &Cli) -> Result<(), BenchError> {
    match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Generate(a) => generate_instance(a),
        Command::Compare(a) => compare(a),
        Command::Reduce(a) => reduce_instance(a),
        Command::Experiment(a) => run_experiment(&ExperimentConfig::load(&a.config)?).map(|_| ()),
    }
}
