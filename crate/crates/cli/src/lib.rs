//! Command-line frontend: backtests, consistency experiments and self-tests.

pub mod commands;
pub mod config;
pub mod selftest;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::{Overrides, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_DATA: i32 = 2;
/// A consistency verdict or a self-test suite failed.
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "corn",
    version,
    about = "Correlation-driven nonparametric portfolio selection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the expert pool and the baselines, write trajectories and a summary.
    Backtest(RunArgs),
    /// Measure convergence of the growth rate toward the optimum of a synthetic market.
    Consistency(RunArgs),
    /// Check the solver against a grid oracle and the two match rules against each other.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Comma-separated seeds for synthetic input.
    #[arg(long, value_delimiter = ',')]
    pub seed: Option<Vec<u64>>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Expert grid as `W,P`: window lengths 1..=W and P correlation levels.
    #[arg(long, value_parser = config::parse_pool)]
    pub pool: Option<corn_core::PoolSpec>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest |gap| accepted by `consistency`.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Report growth rates in bits per period on the terminal; files stay in nats.
    #[arg(long)]
    pub log2: bool,
    /// Worker threads; 0 lets the runtime decide.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Adds a suite that always fails; exercises the failure path.
    #[arg(long, hide = true)]
    pub inject_failure: bool,
}

impl RunArgs {
    pub fn load(&self) -> Result<RunConfig, CliError> {
        let overrides = Overrides {
            seeds: self.seed.clone(),
            n: self.n,
            pool: self.pool,
            tol: self.tol,
            out: self.out.clone(),
            threshold: self.threshold,
            jobs: self.jobs,
            log2: self.log2,
        };
        RunConfig::load(&self.config, overrides)
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Backtest(args) => args.load().and_then(|c| commands::backtest(&c)).map(|_| EXIT_OK),
        Command::Consistency(args) => args.load().and_then(|c| commands::consistency(&c)).map(|v| {
            if v.failed() {
                EXIT_CHECK_FAILED
            } else {
                EXIT_OK
            }
        }),
        Command::Selftest(args) => Ok(if selftest::run(args.seed, args.inject_failure) {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }),
    };
    result.unwrap_or_else(|e| {
        eprintln!("corn: {e}");
        e.exit_code()
    })
}
