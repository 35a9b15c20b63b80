use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dipolefield::io::Format;
use dipolefield::limit::Grid;
use dipolefield::montecarlo::Binning;
use dipolefield::OrientationMode;

#[derive(Debug, Parser)]
#[command(name = "dipolefield", version, about = "Field statistics inside a random uniform distribution of dipoles")]
pub struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print D∞, Γ = πD∞, the shift g_c and the physical-unit coefficients.
    Constants(ConstantsArgs),
    /// Write limiting density curves, one file per ε.
    Analytic(AnalyticArgs),
    /// Run direct simulations, one histogram file per ε.
    Simulate(SimulateArgs),
    /// Compare a histogram file with a curve file.
    Compare(CompareArgs),
}

fn parse_mode(s: &str) -> Result<OrientationMode, String> {
    s.parse().map_err(|e: dipolefield::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: dipolefield::Error| e.to_string())
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    s.parse().map_err(|e: dipolefield::Error| e.to_string())
}

fn parse_bins(s: &str) -> Result<Binning, String> {
    s.parse().map_err(|e: dipolefield::Error| e.to_string())
}

#[derive(Debug, Args, Default)]
pub struct OutputArgs {
    #[arg(long, value_parser = parse_format)]
    pub format: Option<Format>,
    /// Output file (constants, compare) or directory (analytic, simulate).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    /// Orientation law; both when omitted.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<OrientationMode>,
    /// Absolute tolerance of the quadrature check of g_c.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<OrientationMode>,
    /// Excluded-volume values, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub epsilon: Option<Vec<f64>>,
    /// Grid as min:max:points.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<Grid>,
    /// Inversion tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Center the ε = 0 Lorentzian here instead of at g_c.
    #[arg(long, allow_hyphen_values = true)]
    pub shift: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<OrientationMode>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub epsilon: Option<Vec<f64>>,
    #[arg(long)]
    pub n_dipoles: Option<u64>,
    #[arg(long)]
    pub realizations: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Binning as min:max:count.
    #[arg(long, value_parser = parse_bins, allow_hyphen_values = true)]
    pub bins: Option<Binning>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Histogram file written by `simulate`.
    #[arg(long, value_name = "FILE")]
    pub histogram: PathBuf,
    /// Curve file written by `analytic`.
    #[arg(long, value_name = "FILE")]
    pub curve: PathBuf,
    /// Largest allowed per-bin |z|.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}
