//! `rvqc` — batch front end. Exit codes: 0 success, 1 computation or
//! verification failure, 2 configuration error.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ExperimentConfig, Overrides};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Compute(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "rvqc",
    version,
    about = "Field-mediated variational circuits: couplings, noise bounds, transpilation and training"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<String>,
    /// Base seed (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of training runs (overrides `train.num_runs`).
    #[arg(long, global = true)]
    runs: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Write Δ and W matrices plus a pair summary.
    Couplings,
    /// Report the noise fidelity bound and check it on sampled states.
    Bound,
    /// Build and verify a pair-gate plan.
    Transpile,
    /// Train the circuit towards the QFT.
    Train,
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    cfg.apply(&Overrides { output_dir: cli.out.clone(), seed: cli.seed, runs: cli.runs });
    if cfg.seed > i64::MAX as u64 {
        return Err(CliError::Config(format!("seed {} exceeds {}", cfg.seed, i64::MAX)));
    }
    match cli.command {
        Command::Couplings => commands::couplings(&cfg),
        Command::Bound => commands::bound(&cfg),
        Command::Transpile => commands::transpile(&cfg),
        Command::Train => commands::train(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("rvqc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
