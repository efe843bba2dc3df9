//! Command-line surface. The parsed [`Cli`] value is the experiment
//! configuration and is echoed verbatim into every manifest.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Clone, PartialEq, Serialize)]
#[command(
    name = "wigner",
    version,
    about = "Monte Carlo and quadrature experiments on hermitian Wigner matrices",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct GlobalArgs {
    /// Master seed; realization k draws from stream (seed, k).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads. Results do not depend on this value.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    /// Output CSV path. The manifest goes next to it with a .json extension.
    /// Without it the main table is printed to stdout and the manifest to
    /// stderr.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key=value file; `[name]` sections apply to one subcommand, keys above
    /// the first section to all. Command-line flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Sample matrices and write their spectra.
    Sample(SampleArgs),
    /// Eigenvalue counts in energy windows, or the average density of states.
    Dos(DosArgs),
    /// Empirical Stieltjes transform against m_sc.
    Stieltjes(StieltjesArgs),
    /// Eigenvector delocalization statistics.
    Deloc(DelocArgs),
    /// Unfolded two-point function near a bulk energy.
    Spacing(SpacingArgs),
    /// Dyson Brownian motion paths.
    Dbm(DbmArgs),
    /// Compensated heat flow of an entry density.
    Flow(FlowArgs),
    /// Correlation kernel of the Gaussian-divisible ensemble.
    Kernel(KernelArgs),
    /// Exact-identity suite.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sample(_) => "sample",
            Command::Dos(_) => "dos",
            Command::Stieltjes(_) => "stieltjes",
            Command::Deloc(_) => "deloc",
            Command::Spacing(_) => "spacing",
            Command::Dbm(_) => "dbm",
            Command::Flow(_) => "flow",
            Command::Kernel(_) => "kernel",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleArgs {
    /// Matrix dimension.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// gaussian, rademacher, uniform or grid:<csv path>.
    #[arg(long, default_value = "gaussian")]
    pub law: String,
    /// Gaussian component: H = H0 + sqrt(t) V.
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    /// Realizations.
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct DosArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Window centers.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0")]
    pub e: Vec<f64>,
    /// Microscopic windows of width K/N.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<f64>,
    /// Windows of absolute width eta.
    #[arg(long, value_delimiter = ',')]
    pub eta: Vec<f64>,
    /// Windows of width eps/N, or with --average the imaginary parts eps/N.
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
    /// Report (1/pi) E Im m_N(E + i eps/N) instead of window counts.
    #[arg(long)]
    pub average: bool,
    /// Also report P(|estimate - rho_sc(E)| >= delta) per window.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct StieltjesArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0")]
    pub e: Vec<f64>,
    /// Absolute imaginary parts.
    #[arg(long, value_delimiter = ',')]
    pub eta: Vec<f64>,
    /// Imaginary parts in units of 1/N.
    #[arg(long, value_delimiter = ',')]
    pub eta_scaled: Vec<f64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct DelocArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Norm exponent, a number >= 1 or "inf".
    #[arg(long, default_value = "inf")]
    pub p: String,
    /// Bulk is |mu| <= 2 - margin.
    #[arg(long, default_value_t = 0.2)]
    pub bulk_margin: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpacingSource {
    /// Spectra of the configured ensemble.
    Ensemble,
    /// Unit-intensity Poisson points.
    Poisson,
    /// Independent semicircle-distributed points.
    IidSemicircle,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct SpacingArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub e: f64,
    /// Half-width W of the unfolded window.
    #[arg(long, default_value_t = 100.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 0.1)]
    pub bin_width: f64,
    #[arg(long, value_enum, default_value_t = SpacingSource::Ensemble)]
    pub source: SpacingSource,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct DbmArgs {
    /// Matrix dimension (ignored when --y is given).
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Law of the Wigner starting matrix.
    #[arg(long, default_value = "gaussian")]
    pub law: String,
    /// Start from diag(y) instead of a Wigner matrix.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub y: Vec<f64>,
    /// Observation times, starting at 0.
    #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.5,1")]
    pub times: Vec<f64>,
    /// Independent paths.
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct FlowArgs {
    /// Standard deviation of the Gaussian h (ignored with --density).
    #[arg(long, default_value_t = 2.0)]
    pub sigma: f64,
    /// Density CSV (x,h rows on a uniform grid).
    #[arg(long)]
    pub density: Option<PathBuf>,
    /// Grid covers [-half_width, half_width].
    #[arg(long, default_value_t = 24.0)]
    pub grid_half_width: f64,
    #[arg(long, default_value_t = 1201)]
    pub points: usize,
    /// Compensation orders n.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    pub orders: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2")]
    pub times: Vec<f64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize)]
pub struct KernelArgs {
    /// Size of y (ignored with --y-file).
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub t: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub e: f64,
    /// Spectrum of H0, one value per line; semicircle quantiles otherwise.
    #[arg(long)]
    pub y_file: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub x1: f64,
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        default_value = "0,0.25,0.5,0.75,1,1.25,1.5,1.75,2"
    )]
    pub x2: Vec<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Truncation half-length S.
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}
