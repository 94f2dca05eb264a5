//! `hsolve`: config-driven runs of the Hardy–Sobolev system solvers.
//!
//! Every subcommand takes a flat `key = value` config file; see the crate
//! README for the key table. Failures exit with distinct status codes:
//! 2 unreadable config, 3 malformed config or unknown key/command,
//! 4 missing key, 5 out-of-range value, 6 violated structural hypothesis,
//! 7 solver failure, 8 output I/O failure.

use clap::{Parser, Subcommand};
use hardy_sobolev::driver::{run_with_command, Command, Config};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "hsolve",
    version,
    about = "Ground and bound states of coupled Hardy-Sobolev elliptic systems"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Print the derived constants (Hardy threshold, critical exponents,
    /// best constants, energy levels, coupling exponents) for a config.
    Constants { config: PathBuf },
    /// Check every structural hypothesis the config must satisfy and print
    /// a report.
    Validate { config: PathBuf },
    /// Multistart Nehari descent for the ground state; writes result.json,
    /// trace.csv, and the profiles.
    SolveGround { config: PathBuf },
    /// Mountain-pass deformation search between the semitrivial wells;
    /// writes result.json, trace.csv, and the profiles.
    SolveMp { config: PathBuf },
    /// Ground-state search across the `nu_list` coupling strengths; writes
    /// sweep.csv.
    Sweep { config: PathBuf },
    /// Classify the parameter regime from closed forms; writes regime.json.
    Regime { config: PathBuf },
}

fn main() {
    let cli = Cli::parse();
    let (command, path) = match &cli.command {
        CliCommand::Constants { config } => (Command::Constants, config),
        CliCommand::Validate { config } => (Command::Validate, config),
        CliCommand::SolveGround { config } => (Command::SolveGround, config),
        CliCommand::SolveMp { config } => (Command::SolveMp, config),
        CliCommand::Sweep { config } => (Command::Sweep, config),
        CliCommand::Regime { config } => (Command::Regime, config),
    };
    let run = Config::from_file(path).and_then(|cfg| run_with_command(&cfg, command));
    if let Err(err) = run {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
