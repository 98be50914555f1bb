//! `zetalab`: batch front end for the zeta correlation lab.
//!
//! Exit status: 0 on success or a passed check, 1 on a failed check or a
//! numerical failure, 2 on a usage error.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use zetalab::LabError;

/// Invalid invocation: bad flag, missing parameter or violated precondition.
#[derive(Debug)]
pub struct UsageError(pub String);

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e.0)
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        use LabError::*;
        match e {
            InvalidWindow(..) | OutOfRange(_) | NotPrime(_) | NotCoprime { .. } | TooLarge(_) | PreconditionViolated(_)
            | BadConstants { .. } | DegenerateShifts { .. } | InvalidShift(_) | WindowTooSmall { .. } | UnsupportedRange(_)
            | OverflowRisk(_) | PoleAtOne { .. } | PoleAtNonpositiveInteger(_) | ParseError { .. } | NonMonotonic { .. }
            | BadMagic | TruncatedFile | Io(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "zetalab", version, about = "Numerical laboratory for shifted zeta sums over nontrivial zeros")]
pub struct Cli {
    /// Configuration file of `key = value` lines; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads; 1 gives bit-reproducible reports.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON report file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// CSV report file, for commands with a CSV schema.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Suppress the text report on standard output.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Zero catalogs: compute, import, verify.
    #[command(subcommand)]
    Zeros(ZerosCommand),
    /// Zero sum Σ x^ρ ζ(ρ+iy1) conj ζ(ρ+iy2) over a window.
    Sum(SumArgs),
    /// Zero sum against its predicted main term at height T.
    Theorem21(Theorem21Args),
    /// Elementary estimate checks.
    Lemmas(LemmasArgs),
    /// Truncated Perron formula against exact coefficient sums.
    Perron(PerronArgs),
    /// Rectangle contour identity over a zero window.
    Contour(ContourArgs),
    /// Stationary-phase integral against its main term.
    Gonek(GonekArgs),
    /// Parameter-growth scan of the window-size bound.
    Appendix(AppendixArgs),
    /// Dirichlet characters and Gauss sums modulo a prime.
    Chars(CharsArgs),
}

#[derive(Subcommand, Debug)]
pub enum ZerosCommand {
    /// Locate all zeros in [t-min, t-max].
    Find(FindArgs),
    /// Import an ordinate list (one per line, '#' comments) into a cache.
    Import(ImportArgs),
    /// Check a cached catalog against a reference list or a recomputation.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct FindArgs {
    #[arg(long = "t-min")]
    pub t_min: Option<f64>,
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    /// Cache file to write; defaults to a file under ZETALAB_CACHE_DIR.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ImportArgs {
    /// Ordinate list to read.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Cache file to write; defaults to a file under ZETALAB_CACHE_DIR.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Cache file to check.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Ordinate list to compare against; recomputes the window when absent.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Largest accepted ordinate difference.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Number of leading ordinates compared against the reference.
    #[arg(long)]
    pub count: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SumArgs {
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub t2: Option<f64>,
    /// Prime x.
    #[arg(long)]
    pub x: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y2: Option<f64>,
    /// Zero cache covering the window; computed when absent.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Theorem21Args {
    /// Height T; the window is [T, (1 + ε)T] with ε = exp(−C√log T).
    #[arg(long = "T")]
    pub big_t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y2: Option<f64>,
    /// Constant C in ε = exp(−C√log T).
    #[arg(long = "C")]
    pub big_c: Option<f64>,
    /// Extend short windows to 25 zeros instead of refusing them.
    #[arg(long)]
    pub pad: bool,
    /// Comma-separated heights for the trend report; replaces --T.
    #[arg(long)]
    pub heights: Option<String>,
    /// Zero cache covering the window; computed when absent.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LemmasArgs {
    /// Check id: 3.14, 3.15, 3.16, 3.17, 3.18, 3.19 or all.
    #[arg(long)]
    pub which: Option<String>,
    /// Upper end of the exhaustive range (divisor-log check).
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    /// Comma-separated X grid (mean-value and shifted divisor-sum checks).
    #[arg(long = "x-grid")]
    pub x_grid: Option<String>,
    /// Y ≤ cX with c in (0, 1) (mean-value check).
    #[arg(long)]
    pub c: Option<f64>,
    /// Lower end A of a single range (divisor reciprocal sum); default is a 20-pair grid.
    #[arg(long)]
    pub a: Option<f64>,
    /// Upper end B of a single range (divisor reciprocal sum).
    #[arg(long)]
    pub b: Option<f64>,
    /// Y rule: x_over_log_x, sqrt_x or a fraction f with Y = fX (shifted divisor sums).
    #[arg(long = "y-rule")]
    pub y_rule: Option<String>,
    /// Modulus x (resonance sums).
    #[arg(long)]
    pub x: Option<f64>,
    /// Comma-separated t grid (resonance sums).
    #[arg(long = "t-grid")]
    pub t_grid: Option<String>,
}

#[derive(Args, Debug)]
pub struct PerronArgs {
    /// unit, pair_unit or triple_lambda.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Summation cutoff X.
    #[arg(long = "X")]
    pub big_x: Option<f64>,
    /// Truncation height W (the first rung of a ladder).
    #[arg(long = "W")]
    pub w: Option<f64>,
    /// Number of W-doublings; 0 runs a single check.
    #[arg(long)]
    pub octaves: Option<usize>,
    /// Prime modulus of a twisting character.
    #[arg(long = "twist-modulus")]
    pub twist_modulus: Option<u64>,
    /// Index of the twisting character.
    #[arg(long = "twist-character")]
    pub twist_character: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ContourArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub y1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y2: Option<f64>,
    /// Prime x.
    #[arg(long)]
    pub x: Option<u64>,
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub t2: Option<f64>,
    /// Left edge abscissa; defaults to ½ − 1/log log T.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Right edge abscissa; defaults to 1 + 1/log x.
    #[arg(long)]
    pub c: Option<f64>,
    /// Zero cache covering the window; computed when absent.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GonekArgs {
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Stationary point u.
    #[arg(long)]
    pub u: Option<f64>,
    /// Power of the logarithm.
    #[arg(long)]
    pub m: Option<u32>,
}

#[derive(Args, Debug)]
pub struct AppendixArgs {
    /// sqrt_window or banks_eps.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long = "C")]
    pub big_c: Option<f64>,
    #[arg(long = "C-prime")]
    pub c_prime: Option<f64>,
    #[arg(long = "c")]
    pub small_c: Option<f64>,
    /// Comma-separated exponents k (banks_eps).
    #[arg(long)]
    pub ks: Option<String>,
    /// Comma-separated T grid inside [1e6, 1e16].
    #[arg(long = "t-grid")]
    pub t_grid: Option<String>,
}

#[derive(Args, Debug)]
pub struct CharsArgs {
    /// Odd prime modulus ≤ 101.
    #[arg(long)]
    pub x: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Failure(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
    }
}
