use rayon::prelude::*;
use serde::Serialize;

use super::{check_probability, empirical_quantile, replicate_csv};
use crate::bandwidth::{BandwidthRule, Regime};
use crate::density::Density;
use crate::distance::l1_distance;
use crate::error::{Error, Result};
use crate::kernel::{Kernel, KernelLevel};
use crate::resample::RejectionSampler;
use crate::rng::RngStream;
use crate::sample::Sample;
use crate::smoother::SmoothedDensity;
use crate::step::{grenander_fit, StepDensity};

pub const MIN_BAND_REPLICATES: usize = 50;
/// Smallest admissible `m/n` for the supersample.
pub const MIN_SUPERSAMPLE_RATIO: usize = 10;

/// L1 confidence band `{g : ∫|f̂ₙ − g| ≤ radius}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L1BandResult {
    pub n: usize,
    pub level: f64,
    pub replicates: usize,
    /// Supersample size.
    pub m: usize,
    /// `μ̂ₙ,ₘ`.
    pub mu_hat: f64,
    /// `Ĉ_α`, the upper `α` quantile of the standardized replicates.
    pub c_hat: f64,
    /// `n^{−1/3} μ̂ₙ,ₘ + n^{−1/2} Ĉ_α`; negative means the band is empty.
    pub radius: f64,
    pub empty: bool,
    pub bandwidth: f64,
    pub kernel: String,
    pub center_breakpoints: Vec<f64>,
    pub center_heights: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    #[serde(skip)]
    pub center: StepDensity,
    /// `S_b = n^{1/6}(n^{1/3}∫|f̃ₙ* − f̃ₙ| − μ̂ₙ,ₘ)`.
    #[serde(skip)]
    pub statistics: Vec<f64>,
}

impl L1BandResult {
    pub fn statistics_csv(&self) -> String {
        replicate_csv("statistic", &self.statistics)
    }
}

/// `max(10n, min(⌈n^{3/2}⌉, budget))`.
pub fn default_supersample_size(n: usize, budget: usize) -> usize {
    let growth = (n as f64).powf(1.5).ceil() as usize;
    (MIN_SUPERSAMPLE_RATIO * n).max(growth.min(budget))
}

fn check_supersample(m: usize, n: usize) -> Result<()> {
    if m <= n {
        return Err(Error::InvalidParameter(format!(
            "supersample size m = {m} must exceed n = {n}"
        )));
    }
    Ok(())
}

/// `m^{1/3} ∫|f̃ₙ,ₘ** − f̃ₙ|` for one Grenander-fitted supersample of size `m`
/// drawn from `f̃ₙ`.
pub fn supersample_mu_hat(sd: &SmoothedDensity, m: usize, rng: &mut RngStream) -> Result<f64> {
    check_supersample(m, sd.sample_size())?;
    sd.kernel().require(KernelLevel::B6)?;
    let draw = RejectionSampler::for_smoothed(sd)?.sample(m, rng)?;
    Ok((m as f64).cbrt() * l1_distance(&grenander_fit(&draw)?, sd)?)
}

/// Smoothed-bootstrap L1 band around the Grenander fit.
///
/// The supersample uses `rng.substream(0)`; replicate `b` uses
/// `rng.substream(1).substream(b)`.
pub fn l1_band(
    sample: &Sample,
    alpha_level: f64,
    replicates: usize,
    m: usize,
    kernel: &Kernel,
    rule: &BandwidthRule,
    rng: &RngStream,
) -> Result<L1BandResult> {
    check_probability(alpha_level, "alpha_level")?;
    if rule.regime != Regime::L1 {
        return Err(Error::InvalidParameter(
            "L1 bands need an L1-regime bandwidth".into(),
        ));
    }
    BandwidthRule::new(rule.alpha, rule.scale, Regime::L1)?;
    if replicates < MIN_BAND_REPLICATES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_BAND_REPLICATES} bootstrap replicates, got {replicates}"
        )));
    }
    let n = sample.len();
    check_supersample(m, n)?;
    if m < MIN_SUPERSAMPLE_RATIO * n {
        return Err(Error::InvalidParameter(format!(
            "supersample size m = {m} is below {MIN_SUPERSAMPLE_RATIO}n = {}",
            MIN_SUPERSAMPLE_RATIO * n
        )));
    }
    kernel.require(KernelLevel::B6)?;

    let nf = n as f64;
    let smoothed = SmoothedDensity::fit(sample, kernel.clone(), rule)?;
    let mu_hat = supersample_mu_hat(&smoothed, m, &mut rng.substream(0))?;
    let sampler = RejectionSampler::for_smoothed(&smoothed)?;
    let replicate_rng = rng.substream(1);
    let statistics = (0..replicates as u64)
        .into_par_iter()
        .map(|b| {
            let draw = sampler.sample(n, &mut replicate_rng.substream(b))?;
            let l1 = l1_distance(&grenander_fit(&draw)?, &smoothed)?;
            Ok(nf.powf(1.0 / 6.0) * (nf.cbrt() * l1 - mu_hat))
        })
        .collect::<Result<Vec<f64>>>()?;

    let c_hat = empirical_quantile(&statistics, 1.0 - alpha_level)?;
    let radius = mu_hat / nf.cbrt() + c_hat / nf.sqrt();
    let center = grenander_fit(sample)?;
    let empty = radius < 0.0;
    Ok(L1BandResult {
        n,
        level: 1.0 - alpha_level,
        replicates,
        m,
        mu_hat,
        c_hat,
        radius,
        empty,
        bandwidth: smoothed.bandwidth(),
        kernel: kernel.name().to_string(),
        center_breakpoints: center.breakpoints().to_vec(),
        center_heights: center.heights().to_vec(),
        warning: empty.then(|| format!("negative radius {radius}: the band is empty")),
        center,
        statistics,
    })
}

/// Whether `∫|f̂ₙ − g| ≤ radius`; always false for an empty band.
pub fn band_contains<G: Density + ?Sized>(band: &L1BandResult, g: &G) -> Result<bool> {
    if band.radius < 0.0 {
        return Ok(false);
    }
    Ok(l1_distance(&band.center, g)? <= band.radius)
}
