//! `reinsync`: simulate interacting reinforced urn systems, enumerate the
//! zeros of their drift field and check the predicted fluctuations.
//!
//! Exit codes: 0 on success, 2 for invalid configuration or input, 1 for
//! runtime failures.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Context, InvalidInput};
use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "reinsync", version, about = "Interacting reinforced processes: simulation and equilibria")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the base seed of the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Caps the number of worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Trajectory of replication 0 and terminal report of every replication.
    Simulate(Common),
    /// Zeros of the drift field with stability and fluctuation exponents.
    Equilibria(Common),
    /// Drift and potential on a grid (two agents only).
    Field(Common),
    /// Monte Carlo attribution of terminal states to zeros.
    Mc(Common),
    /// Empirical covariance against the predicted limit covariance.
    CltCheck(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, fn(&Context) -> anyhow::Result<String>) = match &cli.command {
        Command::Simulate(c) => (c, commands::simulate),
        Command::Equilibria(c) => (c, commands::equilibria_cmd),
        Command::Field(c) => (c, commands::field),
        Command::Mc(c) => (c, commands::mc),
        Command::CltCheck(c) => (c, commands::clt_check),
    };
    let (config, params) = match ExperimentConfig::load(&common.config) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(k) = common.threads {
        if k == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let ctx = Context { seed: common.seed.unwrap_or(config.seed), config, params, out: common.out.clone() };
    match run(&ctx) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) if e.is::<InvalidInput>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
