//! Flag sets shared by the subcommands. All value flags are optional at
//! the clap layer; requiredness and validation happen after the merge
//! with the optional `--config` file (flags win).

use clap::Args;
use std::path::PathBuf;

#[derive(Args, Default)]
pub struct CommonArgs {
    /// Well index (positive integer)
    #[arg(long)]
    pub l: Option<u32>,
    /// Inverse well width α > 0
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Half-period a > 0 (cell is [-a, a], lattice period 2a)
    #[arg(long)]
    pub a: Option<f64>,
    /// Lower end of the energy window
    #[arg(long, allow_negative_numbers = true)]
    pub emin: Option<f64>,
    /// Upper end of the energy window
    #[arg(long, allow_negative_numbers = true)]
    pub emax: Option<f64>,
    /// Number of grid points / base scan resolution
    #[arg(long)]
    pub samples: Option<usize>,
    /// Band-edge refinement tolerance (relative)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output format: csv or json
    #[arg(long)]
    pub format: Option<String>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value configuration file; command-line flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Proceed despite incomplete-scan warnings
    #[arg(long)]
    pub force: bool,
    /// Write a gnuplot sidecar script next to the CSV output
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Args, Default)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub l: Option<u32>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    /// Also run the shooting oracle and report differences
    #[arg(long)]
    pub verify: bool,
    /// Shooting bisection tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Truncation half-width of the shooting domain (≥ 10/α)
    #[arg(long = "half-width")]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write a gnuplot sidecar script next to the CSV output
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Args, Default)]
pub struct VerifyArgs {
    #[arg(long)]
    pub l: Option<u32>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub emin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub emax: Option<f64>,
    /// Discriminant sweep resolution
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}
