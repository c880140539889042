//! `qps`: discrete phase-space toolkit for prime-dimensional spin
//! systems. Verifies operator-basis axioms and group laws, enumerates
//! structure constants, integrates spin-chain dynamics in coefficient
//! space, and converts between state representations.

mod commands;
mod config;
mod error;
mod io;

use clap::{Parser, Subcommand};

use crate::commands::{EvolveArgs, GammaArgs, TransformArgs, VerifyArgs};
use crate::error::Result;

#[derive(Parser)]
#[command(
    name = "qps",
    version,
    about = "Discrete phase-space transforms, structure constants, and spin dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check group laws and operator-basis axioms.
    Verify(VerifyArgs),
    /// Enumerate structure constants.
    Gamma(GammaArgs),
    /// Integrate a configured spin-chain run.
    Evolve(EvolveArgs),
    /// Convert between matrix and coefficient-grid files.
    Transform(TransformArgs),
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Verify(args) => commands::cmd_verify(args),
        Command::Gamma(args) => commands::cmd_gamma(args),
        Command::Evolve(args) => commands::cmd_evolve(args),
        Command::Transform(args) => commands::cmd_transform(args),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
