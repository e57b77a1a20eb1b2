use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opjump_core::precision::{DEFAULT_BITS, DEFAULT_FD_STEP};

use crate::format::Decimal;

#[derive(Debug, Parser)]
#[command(name = "opjump", version, about = "Recurrence coefficients for the Hermite weight with a jump")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate the difference equations: CSV n,alpha,beta_n,r,R
    Iterate(IterateArgs),
    /// Orthogonalize the exact moments: CSV n,alpha,beta_n,r,R,h,D
    Oracle(OracleArgs),
    /// Run verification suites and print a JSON report
    Verify(VerifyArgs),
    /// Scan alpha_n over a grid of jump locations
    Scan(ScanArgs),
    /// Fit the large-n phase at x̃ = 0 and check the asymptotes
    Asymptote(AsymptoteArgs),
    /// Taylor approximations of alpha_n around x̃ = 0
    Taylor(TaylorArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Significant digits in CSV/JSON output
    #[arg(long, default_value_t = 30)]
    pub digits: usize,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Weight {
    /// Jump height, |beta| < 2
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Decimal,
    /// Jump location
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub xjump: Decimal,
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[command(flatten)]
    pub weight: Weight,
    /// Largest index N
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_BITS)]
    pub bits: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub weight: Weight,
    /// Largest index N (at most 64)
    #[arg(long)]
    pub n: usize,
    /// Oracle precision; defaults to max(512, 16 N)
    #[arg(long)]
    pub oracle_bits: Option<u32>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    Universal,
    Compat,
    Toda,
    Painleve,
    Hankel,
    Freenergy,
    Asymptote,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suites to run (comma separated)
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub suite: Vec<Suite>,
    #[command(flatten)]
    pub weight: Weight,
    /// Largest index checked
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_BITS)]
    pub bits: u32,
    /// Oracle precision; defaults to max(512, 16 N)
    #[arg(long)]
    pub oracle_bits: Option<u32>,
    /// Finest finite-difference step
    #[arg(long, default_value_t = DEFAULT_FD_STEP)]
    pub fd_step: f64,
    /// Upper end of the phase-fit range (asymptote suite)
    #[arg(long, default_value_t = 10_000)]
    pub fit_max: usize,
    /// Largest n in the asymptote order check
    #[arg(long, default_value_t = 1_000_000)]
    pub check_max: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// b^{-1} (n/2)^{1/2} alpha_n
    #[value(name = "1")]
    One,
    /// b^{-1} alpha_n
    #[value(name = "2")]
    Two,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Decimal,
    #[arg(long, allow_hyphen_values = true)]
    pub xmin: Decimal,
    #[arg(long, allow_hyphen_values = true)]
    pub xmax: Decimal,
    /// Number of grid points, including both ends
    #[arg(long)]
    pub steps: usize,
    /// Indices to record (comma separated)
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_enum, default_value = "2")]
    pub fig: Figure,
    #[arg(long, default_value_t = DEFAULT_BITS)]
    pub bits: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct AsymptoteArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Decimal,
    /// Largest iterated index; the phase is fitted on [fit-min, N]
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub fit_min: usize,
    /// Largest n in the order check
    #[arg(long, default_value_t = 1_000_000)]
    pub check_max: usize,
    #[arg(long, default_value_t = DEFAULT_BITS)]
    pub bits: u32,
    /// Per-n CSV of iterated and asymptotic values
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TaylorArgs {
    #[command(flatten)]
    pub weight: Weight,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_BITS)]
    pub bits: u32,
    #[command(flatten)]
    pub output: Output,
}
