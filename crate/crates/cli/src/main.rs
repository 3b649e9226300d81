//! Command-line driver for the CBF solver and verification harness.

mod config;
mod convergence;
mod error;
mod run;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::CliError;

#[derive(Parser)]
#[command(
    name = "cbf",
    version,
    about = "Pseudo-spectral solver for convective Brinkman–Forchheimer flow"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the random seed (IC and verification sampler).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to output.directory from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record ‖Au‖² and the weighted gradient integral.
    #[arg(long)]
    extended_diagnostics: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the configured problem.
    Run(Common),
    /// Run the verification checks.
    Verify(Common),
    /// Refinement study over the dt and/or N ladders.
    Convergence(Common),
    /// Canned Taylor–Green decay compared with the exact solution.
    TaylorGreen {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(common: &Common) -> Result<(RunConfig, PathBuf), CliError> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.ic.seed = seed;
    }
    if common.extended_diagnostics {
        cfg.output.extended_diagnostics = true;
    }
    let out = common.out.clone().unwrap_or_else(|| cfg.output.directory.clone());
    Ok((cfg, out))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(c) => {
            let (cfg, out) = load(&c)?;
            run::cmd_run(&cfg, &out)
        }
        Command::Verify(c) => {
            let (cfg, out) = load(&c)?;
            verify::cmd_verify(&cfg, c.seed, &out)
        }
        Command::Convergence(c) => {
            let (cfg, out) = load(&c)?;
            convergence::cmd_convergence(&cfg, &out)
        }
        Command::TaylorGreen { out } => {
            let cfg = RunConfig::taylor_green();
            let out = out.unwrap_or_else(|| cfg.output.directory.clone());
            run::cmd_taylor_green(&cfg, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
