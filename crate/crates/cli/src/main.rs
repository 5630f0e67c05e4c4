mod commands;
mod error;
mod matrix_file;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::output::Format;

/// Numerical radius bounds, positivity certificates and dilations for dense
/// complex matrices.
#[derive(Debug, Parser)]
#[command(name = "numrad", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Relative tolerance for positivity certificates.
    #[arg(long, global = true, env = "NUMRAD_TOL", default_value_t = numrad_core::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Numerical radius, operator norm and maximizing angle.
    Radius { matrix: PathBuf },
    /// Boundary points of the numerical range as CSV.
    Range {
        matrix: PathBuf,
        #[arg(long, default_value_t = 360)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-n block positivity verdicts for the norm (1) or radius (2) tests.
    Certify {
        matrix: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        theorem: u8,
        #[arg(long)]
        n: usize,
        /// Largest n scanned when looking for a refutation.
        #[arg(long, default_value_t = numrad_core::certify::DEFAULT_CAP)]
        cap: usize,
    },
    /// Witness H, factors X and Y, contraction C and isometry V.
    Ando {
        matrix: PathBuf,
        #[arg(long, default_value_t = numrad_core::ando::DEFAULT_MAX_ITERS)]
        iters: usize,
        /// Output files are <prefix>_H.json, <prefix>_X.json, ...
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Finite unitary dilation of a contraction.
    Dilate {
        matrix: PathBuf,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare ‖p(A)‖ with the sup of |p| on the unit circle.
    Vonneumann {
        matrix: PathBuf,
        /// Coefficients b0,b1,... (real or complex such as 1+2i).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        poly: Vec<String>,
        #[arg(long, default_value_t = numrad_core::dilation::DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Cross-check all certificates on a random corpus.
    Sweep {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        dim: usize,
        /// `radius=V` or `norm=V`.
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "ginibre")]
        ensemble: String,
        #[arg(long, default_value_t = numrad_core::certify::DEFAULT_CAP)]
        cap: usize,
    },
    /// Reference values for the shift matrices.
    Golden,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
