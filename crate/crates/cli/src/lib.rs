//! Command-line front end for the XVA engine.

pub mod config;
pub mod error;
pub mod format;
pub mod run;

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{parse_config, RunSpec};
pub use error::{CliError, Result};
pub use run::Outcome;

#[derive(Debug, Parser)]
#[command(name = "xva", version, about = "Bilateral XVA pricing by fixed-point PDE iteration")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Counterparty-risk-free, without-provision and with-provision values at the probes.
    Price(Args),
    /// Iterate the fixed point and tabulate probe values and sup-norm errors per step.
    ConvergeTable(Args),
    /// Price once per value of the `[sweep]` parameter.
    Sweep(Args),
    /// Solve for the forward price with zero value at inception.
    FairForward(Args),
}

#[derive(Debug, Clone, clap::Args)]
pub struct Args {
    /// Run configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn load(path: &std::path::Path) -> Result<RunSpec> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    parse_config(&text)
}

type Runner = fn(&RunSpec, &std::path::Path) -> Result<Outcome>;

pub fn execute(command: &Command) -> Result<Outcome> {
    let (args, f): (&Args, Runner) = match command {
        Command::Price(a) => (a, run::price),
        Command::ConvergeTable(a) => (a, run::converge_table),
        Command::Sweep(a) => (a, run::sweep),
        Command::FairForward(a) => (a, run::fair_forward),
    };
    let spec = load(&args.config)?;
    f(&spec, &args.out)
}
