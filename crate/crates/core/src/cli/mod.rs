//! Command-line front end: density tables, posterior sampling, risk curves,
//! predictive scores and the simulation study.
//!
//! Every subcommand accepts `--config <file.json>`, a flat JSON object whose
//! keys are the long flag names. Flags given on the command line override
//! the file. The merged settings and seed are written into every output.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use config::merge_with_config;

/// Process exit status for a successful run.
pub const EXIT_OK: u8 = 0;
/// Bad input, such as an unknown flag or an unreadable file.
pub const EXIT_USAGE: u8 = 2;
/// A chain diverged or a numerical routine failed.
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "hths", version, about = "Heavy-tailed horseshoe shrinkage priors")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Flat JSON file with default values for the command's flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prior densities of γ, τ, p or φ on a grid.
    Density(DensityArgs),
    /// Run the Gibbs sampler on a data file.
    Sample(SampleArgs),
    /// Kullback-Leibler risk bounds over sample sizes.
    Risk(RiskArgs),
    /// Log marginal likelihood and its score over observations.
    Predictive(PredictiveArgs),
    /// The sparse-signal simulation study.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    Gamma,
    Tau,
    P,
    Phi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    Linear,
    Log,
    /// Log-spaced magnitudes from `--from` to `--to`, mirrored to negative
    /// values; `--points` counts both signs.
    Symlog,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct DensityArgs {
    /// Prior families (repeat or comma-separate); all that apply by default.
    #[arg(long, value_delimiter = ',')]
    pub family: Vec<String>,
    /// Variable whose density is tabulated.
    #[arg(long = "var", value_enum)]
    #[serde(rename = "var")]
    pub variable: Option<Variable>,
    /// Evaluate at these points instead of a grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub at: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub scale: Option<GridScale>,
    /// Mix over the decision parameter by quadrature (needed for HTHS_lambda).
    #[arg(long)]
    pub quadrature: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct SampleArgs {
    #[arg(long)]
    pub family: Option<String>,
    /// Observations: one number per line, or a CSV file with `--column`.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// CSV column to read, by header name or zero-based index.
    #[arg(long)]
    pub column: Option<String>,
    /// Write the retained draws to this binary file.
    #[arg(long)]
    pub draws: Option<PathBuf>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub retained: Option<usize>,
    #[arg(long)]
    pub thinning: Option<usize>,
    #[arg(long)]
    pub slice_width: Option<f64>,
    /// Pin globals, e.g. `mu=0,sigma2=1,z=1`.
    #[arg(long)]
    pub fix_globals: Option<String>,
    /// Store only φ and the globals, not the local scales.
    #[arg(long)]
    pub no_locals: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub mu_mean: Option<f64>,
    #[arg(long)]
    pub mu_scale: Option<f64>,
    #[arg(long)]
    pub sigma2_shape: Option<f64>,
    #[arg(long)]
    pub sigma2_rate: Option<f64>,
    #[arg(long)]
    pub z_shape: Option<f64>,
    #[arg(long)]
    pub z_rate: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct RiskArgs {
    #[arg(long, value_delimiter = ',')]
    pub family: Vec<String>,
    /// Centre of the KL neighbourhood.
    #[arg(long, allow_hyphen_values = true)]
    pub phi0: Option<f64>,
    /// Sample sizes; a log-spaced grid from 10 to 10^6 by default.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u64>,
    /// Points per decade of the default grid.
    #[arg(long)]
    pub per_decade: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct PredictiveArgs {
    #[arg(long, value_delimiter = ',')]
    pub family: Vec<String>,
    /// Observations; a symmetric log grid on 0.01..100 by default.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub y: Vec<f64>,
    /// Points per sign of the default grid.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct SimulateArgs {
    /// Sparsity levels; 0.2, 0.05 and 0.01 by default.
    #[arg(long, value_delimiter = ',')]
    pub eta: Vec<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu_true: Option<f64>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub retained: Option<usize>,
    #[arg(long)]
    pub thinning: Option<usize>,
    /// 20 replicates and full-length chains.
    #[arg(long)]
    pub paper_scale: bool,
    /// Also write the aligned text table to this file.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

/// Failure of a CLI run, mapped onto an exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_numeric() { EXIT_NUMERIC } else { EXIT_USAGE };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { code: EXIT_USAGE, message: e.to_string() }
    }
}

impl CliError {
    pub(crate) fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }
}

/// Parse `args` (program name first), run the command and return its status.
/// Diagnostics go to `stderr`; results go to `--output` or `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { write!(stdout, "{rendered}") } else { write!(stderr, "{rendered}") };
            return code;
        }
    };
    match commands::dispatch(cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

/// Entry point for the `hths` binary.
pub fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    ExitCode::from(run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock()))
}
