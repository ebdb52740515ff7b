//! `symtomo`: Wigner maps, tomograms, inversion, the Pauli demonstration and the invariant suite.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "symtomo", version, about = "Symplectic tomography of one-dimensional pure states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the Wigner function of a state.
    Wigner(commands::WignerArgs),
    /// Compute one tomogram or an equispaced angle sweep.
    Tomogram(commands::TomogramArgs),
    /// Reconstruct the Wigner function from a tomogram sweep.
    Invert(commands::InvertArgs),
    /// Show the sign ambiguity of the Gaussian covariance and its resolution.
    PauliDemo(commands::PauliArgs),
    /// Run the invariant suite and print a pass/fail table.
    Check(commands::CheckArgs),
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("TOMO_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("TOMO_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let outcome = match &cli.command {
        Command::Wigner(a) => commands::wigner(a).map(|_| true),
        Command::Tomogram(a) => commands::tomogram(a).map(|_| true),
        Command::Invert(a) => commands::invert(a).map(|_| true),
        Command::PauliDemo(a) => commands::pauli_demo(a).map(|_| true),
        Command::Check(a) => commands::check(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
