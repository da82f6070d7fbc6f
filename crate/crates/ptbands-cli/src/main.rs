//! Command-line front end: band tables, dispersion data, bound spectra,
//! and the verification report.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 incomplete scan without `--force`.

use clap::{Parser, Subcommand};
use ptbands_cli::args::{CommonArgs, SpectrumArgs, VerifyArgs};
use ptbands_cli::commands;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ptbands", version, about = "Band structure of a periodic Pöschl-Teller lattice")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Locate allowed bands and gaps in an energy window
    Bands(CommonArgs),
    /// Tabulate the discriminant D(E) over an energy grid
    Dispersion(CommonArgs),
    /// Bound levels of the single well, optionally oracle-verified
    Spectrum(SpectrumArgs),
    /// Run the verification suite and emit a JSON report
    Verify(VerifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Bands(args) => commands::bands(&args),
        Cmd::Dispersion(args) => commands::dispersion(&args),
        Cmd::Spectrum(args) => commands::spectrum(&args),
        Cmd::Verify(args) => commands::verify(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("ptbands: {err:#}");
            ExitCode::from(2)
        }
    }
}
