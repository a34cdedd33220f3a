//! Command-line front end.

mod commands;
mod config;

use std::ffi::OsString;

use clap::{Parser, Subcommand};

pub use config::{RunConfig, ShotSpec};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "ci-seeker",
    version,
    about = "Excited states and conical intersections on a simulated quantum register"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest states of one Hamiltonian
    Solve(RunConfig),
    /// Energies on a grid spanning the branching plane
    Scan(RunConfig),
    /// Minimum-energy crossing point search
    Meci(RunConfig),
}

/// Whether a command met its convergence target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    NotConverged,
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_NOT_CONVERGED: u8 = 2;

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("CI_SEEKER_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::arg(format!(
            "CI_SEEKER_THREADS must be a positive integer, got '{raw}'"
        ))
    })?;
    // a pool may already exist when called twice in one process
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

pub fn execute(command: Command) -> Result<Outcome> {
    configure_threads()?;
    match command {
        Command::Solve(cfg) => commands::solve(cfg.resolve()?),
        Command::Scan(cfg) => commands::scan(cfg.resolve()?),
        Command::Meci(cfg) => commands::meci(cfg.resolve()?),
    }
}

fn one_line(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            eprintln!("error: usage: {}", one_line(&e.to_string()));
            return EXIT_INPUT;
        }
    };
    match execute(cli.command) {
        Ok(Outcome::Converged) => EXIT_OK,
        Ok(Outcome::NotConverged) => EXIT_NOT_CONVERGED,
        Err(e) => {
            eprintln!("error: {}: {}", e.kind(), one_line(&e.to_string()));
            EXIT_INPUT
        }
    }
}
