use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "grenboot",
    version,
    about = "Grenander fits, smoothed-bootstrap intervals and bands, and Chernoff-limit Monte Carlo"
)]
pub struct Cli {
    /// Worker threads; overrides GRENBOOT_THREADS. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Draw a synthetic sample from a named density.
    Gen(GenArgs),
    /// Fit the Grenander estimator to a data file.
    Fit(FitArgs),
    /// Smoothed-bootstrap confidence interval for f(t0).
    Ci(CiArgs),
    /// Smoothed-bootstrap L1 confidence band.
    Band(BandArgs),
    /// Monte Carlo estimates of the Chernoff-limit constants.
    Limits(LimitsArgs),
    /// Simulation studies.
    #[command(subcommand)]
    Experiment(Experiment),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Fit(_) => "fit",
            Command::Ci(_) => "ci",
            Command::Band(_) => "band",
            Command::Limits(_) => "limits",
            Command::Experiment(e) => match e {
                Experiment::Coverage(_) => "experiment coverage",
                Experiment::Inconsistency(_) => "experiment inconsistency",
                Experiment::Rate(_) => "experiment rate",
                Experiment::L1clt(_) => "experiment l1clt",
            },
        }
    }

    pub fn out(&self) -> &PathBuf {
        match self {
            Command::Gen(a) => &a.out,
            Command::Fit(a) => &a.out,
            Command::Ci(a) => &a.out,
            Command::Band(a) => &a.out,
            Command::Limits(a) => &a.out,
            Command::Experiment(e) => match e {
                Experiment::Coverage(a) => &a.common.out,
                Experiment::Inconsistency(a) => &a.common.out,
                Experiment::Rate(a) => &a.common.out,
                Experiment::L1clt(a) => &a.common.out,
            },
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Gen(a) => Some(a.seed),
            Command::Fit(_) => None,
            Command::Ci(a) => Some(a.seed),
            Command::Band(a) => Some(a.seed),
            Command::Limits(a) => Some(a.seed),
            Command::Experiment(e) => Some(match e {
                Experiment::Coverage(a) => a.common.seed,
                Experiment::Inconsistency(a) => a.common.seed,
                Experiment::Rate(a) => a.common.seed,
                Experiment::L1clt(a) => a.common.seed,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelName {
    Epanechnikov,
    Biweight,
}

impl KernelName {
    pub fn kernel(self) -> grenboot::Kernel {
        match self {
            KernelName::Epanechnikov => grenboot::Kernel::epanechnikov(),
            KernelName::Biweight => grenboot::Kernel::biweight(),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    /// uniform, triangular or trunc-exp(RATE).
    #[arg(long)]
    pub density: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output directory; the sample goes to data.txt.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the smoothed estimate on this many grid points to smooth.csv.
    #[arg(long)]
    pub smooth_grid: Option<usize>,
    /// Kernel for --smooth-grid.
    #[arg(long, value_enum, default_value_t = KernelName::Biweight)]
    pub kernel: KernelName,
    /// Bandwidth exponent for --smooth-grid, in (0, 1/3).
    #[arg(long, default_value_t = 0.30)]
    pub alpha: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CiArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub t0: f64,
    /// Nominal coverage.
    #[arg(long, default_value_t = 0.90)]
    pub level: f64,
    /// Bootstrap replicates.
    #[arg(long, default_value_t = 1000)]
    pub boot: usize,
    /// Bandwidth exponent, in (0, 1/3).
    #[arg(long, default_value_t = 0.30)]
    pub alpha: f64,
    /// Bandwidth scale R in h = R n^(-alpha).
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, value_enum, default_value_t = KernelName::Epanechnikov)]
    pub kernel: KernelName,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct BandArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, default_value_t = 300)]
    pub boot: usize,
    /// Supersample size; defaults to max(10n, min(n^1.5, budget)).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 50_000)]
    pub budget: usize,
    /// Bandwidth exponent, in (1/6, 1/5).
    #[arg(long, default_value_t = 0.18)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, value_enum, default_value_t = KernelName::Biweight)]
    pub kernel: KernelName,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct LimitsArgs {
    /// Grid step.
    #[arg(long, default_value_t = 0.002)]
    pub delta: f64,
    /// Argmax window W for the xi process.
    #[arg(long, default_value_t = 3.0)]
    pub window: f64,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    /// Largest covariance lag.
    #[arg(long, default_value_t = 8.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 0.25)]
    pub lag_step: f64,
    #[arg(long, default_value_t = 20)]
    pub batches: usize,
    /// Also compare doubled and single Chernoff draws (scaling.json).
    #[arg(long)]
    pub check_scaling: bool,
    /// Path half-width L for the scaling check.
    #[arg(long, default_value_t = 3.0)]
    pub scaling_half_width: f64,
    #[arg(long, default_value_t = 20_000)]
    pub scaling_paths: usize,
    /// Write the scaling draws to draws.csv.
    #[arg(long, requires = "check_scaling")]
    pub dump_draws: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    /// Coverage of pointwise intervals or L1 bands.
    Coverage(CoverageArgs),
    /// Naive-bootstrap inconsistency at a point.
    Inconsistency(InconsistencyArgs),
    /// Convergence rates of the kernel and Grenander estimators.
    Rate(RateArgs),
    /// Standardized L1 errors against the normal limit.
    L1clt(L1CltArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// Truth: uniform, triangular or trunc-exp(RATE).
    #[arg(long, default_value = "triangular")]
    pub truth: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverageMode {
    Pointwise,
    Band,
}

#[derive(Debug, Args, Serialize)]
pub struct CoverageArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = CoverageMode::Pointwise)]
    pub mode: CoverageMode,
    /// Sample size; defaults to 500 (pointwise) or 1000 (band).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub t0: f64,
    /// Nominal coverage; defaults to 0.90 (pointwise) or 0.95 (band).
    #[arg(long)]
    pub level: Option<f64>,
    /// Bootstrap replicates per data set; defaults to 200 (pointwise) or 300 (band).
    #[arg(long)]
    pub boot: Option<usize>,
    /// Data replicates.
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    /// Supersample size for bands; defaults to 20n.
    #[arg(long)]
    pub m: Option<usize>,
    /// Defaults to epanechnikov (pointwise) or biweight (band).
    #[arg(long, value_enum)]
    pub kernel: Option<KernelName>,
    /// Bandwidth exponent; defaults to 0.30 (pointwise) or 0.18 (band).
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct InconsistencyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// limits.json supplying the Chernoff variance.
    #[arg(long)]
    pub constants: PathBuf,
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub t0: f64,
    #[arg(long, default_value_t = 2000)]
    pub reps: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct RateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', default_values_t = grenboot::experiment::RateConfig::default_sizes())]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
    #[arg(long, value_enum, default_value_t = KernelName::Biweight)]
    pub kernel: KernelName,
    #[arg(long, default_value_t = 0.18)]
    pub alpha: f64,
    /// Point for the Grenander error.
    #[arg(long, default_value_t = 0.5)]
    pub t0: f64,
    /// Grid points for the sup norms.
    #[arg(long, default_value_t = 1001)]
    pub grid: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct L1CltArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// limits.json supplying E|xi(0)| and sigma^2.
    #[arg(long)]
    pub constants: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
}
