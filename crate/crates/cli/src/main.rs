//! `sqg`: run the SQG solver, the iterate sequences and the inequality checks.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 guard abort, 3 failed
//! verdict, 4 I/O or other runtime error.

mod commands;
mod config;
mod failure;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{IterateArgs, NormsArgs, SimulateArgs};
use verify::VerifyArgs;

#[derive(Debug, Parser)]
#[command(name = "sqg", version, about = "Dissipative SQG solver and harmonic analysis checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

/// Flags accepted by every command; they override config file values.
#[derive(Debug, clap::Args)]
pub struct Global {
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Grid points per side.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Dissipation exponent γ in (0,2].
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true, env = "SQG_OUT_DIR", default_value = "sqg-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate from the configured initial data; writes series.csv, steps.csv, final_state.sqgf.
    Simulate(SimulateArgs),
    /// Run one inequality check and write its report.
    Verify(VerifyArgs),
    /// Galerkin or Picard iterate sequence with fitted contraction rate.
    Iterate(IterateArgs),
    /// Norms of a stored field.
    Norms(NormsArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => commands::cmd_simulate(&cli.global, a),
        Command::Verify(a) => verify::verify(&cli.global, a),
        Command::Iterate(a) => commands::cmd_iterate(&cli.global, a),
        Command::Norms(a) => commands::cmd_norms(&cli.global, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code())
        }
    }
}
