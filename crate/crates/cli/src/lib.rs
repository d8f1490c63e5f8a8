//! The `gcnet` command line.
//!
//! Every subcommand reads a JSON config (see [`config`]) and writes plain
//! CSV/JSON artifacts. Exit codes: 0 success, 2 configuration error, 3 data
//! error, 4 divergence or partial results.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gcnet_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("data: {0}")]
    Data(String),
    /// Training diverged or stopped early; whatever finished was written.
    #[error("{0}")]
    Partial(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Partial(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) => CliError::Config(e.to_string()),
            Error::Diverged { .. } | Error::PathFailed { .. } => CliError::Partial(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "gcnet", version, about = "Sparse-input neural networks with group concave penalties")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a simulated dataset CSV and a truth sidecar JSON.
    Simulate(SimulateArgs),
    /// Fit a regularization path and export group norms and models.
    Path(PathArgs),
    /// Choose (lambda, alpha) on a holdout split and export the best model.
    Tune(PathArgs),
    /// Run replicated simulations and write report files.
    Experiment(ExperimentArgs),
    /// Score a dataset with a saved model.
    Predict(PredictArgs),
}

/// `--set KEY=VALUE`, usable on every config-driven subcommand.
#[derive(Debug, Args, Default)]
pub struct SetArgs {
    /// Override any top-level config field (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = config::parse_set)]
    pub set: Vec<(String, String)>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub config: PathBuf,
    pub out_csv: PathBuf,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub d: Option<String>,
    #[arg(long)]
    pub outcome: Option<String>,
    #[arg(long)]
    pub censoring_rate: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[command(flatten)]
    pub set: SetArgs,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    pub dataset: PathBuf,
    pub config: PathBuf,
    pub out_prefix: PathBuf,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub penalty: Option<String>,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub lambda_min: Option<String>,
    #[arg(long)]
    pub lambda_max: Option<String>,
    #[arg(long)]
    pub num_lambdas: Option<String>,
    #[arg(long)]
    pub epochs_first: Option<String>,
    #[arg(long)]
    pub epochs_rest: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub num_alphas: Option<String>,
    #[arg(long)]
    pub learning_rate: Option<String>,
    #[arg(long)]
    pub refit: Option<String>,
    #[command(flatten)]
    pub set: SetArgs,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    pub config: PathBuf,
    /// Output directory; falls back to the config's `output_dir`.
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub penalty: Option<String>,
    #[arg(long)]
    pub censoring_rate: Option<String>,
    #[arg(long)]
    pub replicates: Option<String>,
    #[arg(long)]
    pub parallel_workers: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub num_lambdas: Option<String>,
    #[arg(long)]
    pub num_alphas: Option<String>,
    #[arg(long)]
    pub epochs_first: Option<String>,
    #[arg(long)]
    pub epochs_rest: Option<String>,
    #[arg(long)]
    pub oracle: Option<String>,
    #[arg(long)]
    pub oracle_epochs: Option<String>,
    #[command(flatten)]
    pub set: SetArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    pub model: PathBuf,
    pub dataset: PathBuf,
    pub out_csv: PathBuf,
}

fn collect(named: &[(&str, &Option<String>)], set: &SetArgs) -> Vec<(String, String)> {
    named
        .iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
        .chain(set.set.iter().cloned())
        .collect()
}

impl SimulateArgs {
    pub fn overrides(&self) -> Vec<(String, String)> {
        collect(
            &[
                ("n", &self.n),
                ("d", &self.d),
                ("outcome", &self.outcome),
                ("censoring_rate", &self.censoring_rate),
                ("seed", &self.seed),
            ],
            &self.set,
        )
    }
}

impl PathArgs {
    pub fn overrides(&self) -> Vec<(String, String)> {
        collect(
            &[
                ("model", &self.model),
                ("seed", &self.seed),
                ("preset", &self.preset),
                ("penalty", &self.penalty),
                ("a", &self.a),
                ("lambda_min", &self.lambda_min),
                ("lambda_max", &self.lambda_max),
                ("num_lambdas", &self.num_lambdas),
                ("epochs_first", &self.epochs_first),
                ("epochs_rest", &self.epochs_rest),
                ("alpha", &self.alpha),
                ("num_alphas", &self.num_alphas),
                ("learning_rate", &self.learning_rate),
                ("refit", &self.refit),
            ],
            &self.set,
        )
    }
}

impl ExperimentArgs {
    pub fn overrides(&self) -> Vec<(String, String)> {
        collect(
            &[
                ("scenario", &self.scenario),
                ("model", &self.model),
                ("penalty", &self.penalty),
                ("censoring_rate", &self.censoring_rate),
                ("replicates", &self.replicates),
                ("parallel_workers", &self.parallel_workers),
                ("seed", &self.seed),
                ("num_lambdas", &self.num_lambdas),
                ("num_alphas", &self.num_alphas),
                ("epochs_first", &self.epochs_first),
                ("epochs_rest", &self.epochs_rest),
                ("oracle", &self.oracle),
                ("oracle_epochs", &self.oracle_epochs),
            ],
            &self.set,
        )
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let summary = match &cli.command {
        Command::Simulate(args) => commands::simulate(&args.config, &args.out_csv, &args.overrides())?,
        Command::Path(args) => commands::path(&args.dataset, &args.config, &args.out_prefix, &args.overrides())?,
        Command::Tune(args) => commands::tune(&args.dataset, &args.config, &args.out_prefix, &args.overrides())?,
        Command::Experiment(args) => {
            let report = commands::experiment(&args.config, args.out_dir.as_deref(), &args.overrides())?;
            let dir = report.config.output_dir.clone().unwrap_or_default();
            commands::experiment_summary(&report, std::path::Path::new(&dir))
        }
        Command::Predict(args) => commands::predict(&args.model, &args.dataset, &args.out_csv)?,
    };
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    println!("{}", summary.message);
    Ok(())
}
