//! `hubbard-rg`: fixed points, scans, collapse fits and switch reports for
//! the block-renormalized Hubbard model on the triangular lattice.
//!
//! Exit status: 0 on success, 1 for invalid input, 2 for a numerical failure.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::FileLayer;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "hubbard-rg", version, about = "Block renormalization and entanglement scaling of the triangular-lattice Hubbard model")]
struct Cli {
    /// key=value file supplying any flag; flags given on the command line win
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Unstable fixed point of u -> u' with du'/du and nu
    #[command(allow_negative_numbers = true)]
    FixedPoint(commands::fixed_point::Args),
    /// Observables over a u grid and a set of levels, one CSV per observable
    #[command(allow_negative_numbers = true)]
    Scan(commands::scan::Args),
    /// Fit (u_c, nu, y_E) to curves from a CSV and write the master curve
    #[command(allow_negative_numbers = true)]
    Collapse(commands::collapse::Args),
    /// E_bb on both sides of the transition and the width of the step
    #[command(allow_negative_numbers = true)]
    SwitchReport(commands::switch::Args),
    /// Per-level couplings, kept energies and descent matrices of one flow
    #[command(allow_negative_numbers = true)]
    Trajectory(commands::trajectory::Args),
    /// Sites, bonds and neighbour directions of the 7-site block as JSON
    #[command(allow_negative_numbers = true)]
    GeometryDump(commands::geometry::Args),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileLayer::load(path)?,
        None => FileLayer::default(),
    };
    match &cli.command {
        Command::FixedPoint(a) => commands::fixed_point::run(a, &file),
        Command::Scan(a) => commands::scan::run(a, &file),
        Command::Collapse(a) => commands::collapse::run(a, &file),
        Command::SwitchReport(a) => commands::switch::run(a, &file),
        Command::Trajectory(a) => commands::trajectory::run(a, &file),
        Command::GeometryDump(a) => commands::geometry::run(a, &file),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("hubbard-rg: {e}");
        std::process::exit(e.exit_code());
    }
}
