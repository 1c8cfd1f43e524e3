//! Simulation studies: interval and band coverage, the naive bootstrap's
//! inconsistency, convergence rates of the smoothed estimate, and the L1
//! central limit theorem.
//!
//! Each study draws data replicate `r` from `rng.substream(r)` and returns a
//! serializable summary plus a per-replicate CSV table.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::analytic::AnalyticDensity;
use crate::bandwidth::BandwidthRule;
use crate::density::{Density, Differentiable};
use crate::distance::{l1_distance, mu_shape_integral, rate_constant_c, sup_distance};
use crate::error::{Error, Result};
use crate::inference::{band_contains, l1_band, smoothed_pointwise_ci};
use crate::kernel::{Kernel, KernelLevel};
use crate::limit::LimitConstants;
use crate::resample::{multinomial_bootstrap, sample_from_analytic};
use crate::rng::RngStream;
use crate::smoother::SmoothedDensity;
use crate::stats::{
    binomial_standard_error, correlation, ks_critical_one_sample, ks_one_sample, mean, median,
    ols_slope, std_dev, variance, variance_standard_error,
};
use crate::step::grenander_fit;

/// Level of the goodness-of-fit tests reported by the studies.
pub const KS_LEVEL: f64 = 0.01;
/// Two-sided normal quantile for 95% Monte Carlo intervals.
const Z_95: f64 = 1.959963984540054;

fn require_replicates(count: usize, min: usize, what: &str) -> Result<()> {
    if count < min {
        Err(Error::InvalidParameter(format!(
            "{what} needs at least {min} replicates, got {count}"
        )))
    } else {
        Ok(())
    }
}

fn table<R>(header: &str, rows: &[R], line: impl Fn(&mut String, usize, &R)) -> String {
    let mut out = format!("{header}\n");
    for (i, r) in rows.iter().enumerate() {
        line(&mut out, i, r);
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Pointwise coverage

#[derive(Debug, Clone, Serialize)]
pub struct PointwiseCoverageConfig {
    pub truth: AnalyticDensity,
    pub n: usize,
    pub t0: f64,
    pub alpha_level: f64,
    pub bootstrap_replicates: usize,
    pub data_replicates: usize,
    pub kernel: Kernel,
    pub bandwidth: BandwidthRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointwiseCoverageRow {
    pub lower: f64,
    pub upper: f64,
    pub grenander_value: f64,
    pub smoothed_value: f64,
    pub covered: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointwiseCoverage {
    pub config: PointwiseCoverageConfig,
    pub truth_value: f64,
    pub coverage: f64,
    pub coverage_se: f64,
    pub median_width: f64,
    #[serde(skip)]
    pub rows: Vec<PointwiseCoverageRow>,
}

impl PointwiseCoverage {
    pub fn to_csv(&self) -> String {
        table(
            "replicate,lower,upper,width,grenander_value,smoothed_value,covered",
            &self.rows,
            |out, i, r| {
                let _ = write!(
                    out,
                    "{i},{},{},{},{},{},{}",
                    r.lower,
                    r.upper,
                    r.upper - r.lower,
                    r.grenander_value,
                    r.smoothed_value,
                    r.covered as u8
                );
            },
        )
    }
}

/// Replicate `r` draws data from `substream(r).substream(0)` and
/// bootstraps with `substream(r).substream(1)`.
pub fn pointwise_coverage(
    config: &PointwiseCoverageConfig,
    rng: &RngStream,
) -> Result<PointwiseCoverage> {
    require_replicates(config.data_replicates, 1, "coverage")?;
    let truth_value = config.truth.eval(config.t0);
    let rows = (0..config.data_replicates as u64)
        .into_par_iter()
        .map(|r| {
            let r = rng.substream(r);
            let data = sample_from_analytic(&config.truth, config.n, &mut r.substream(0))?;
            let ci = smoothed_pointwise_ci(
                &data,
                config.t0,
                config.alpha_level,
                config.bootstrap_replicates,
                &config.kernel,
                &config.bandwidth,
                &r.substream(1),
            )?;
            Ok(PointwiseCoverageRow {
                lower: ci.lower,
                upper: ci.upper,
                grenander_value: ci.grenander_value,
                smoothed_value: ci.smoothed_value,
                covered: ci.contains(truth_value),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let coverage = rows.iter().filter(|r| r.covered).count() as f64 / rows.len() as f64;
    let widths: Vec<f64> = rows.iter().map(|r| r.upper - r.lower).collect();
    Ok(PointwiseCoverage {
        config: config.clone(),
        truth_value,
        coverage,
        coverage_se: binomial_standard_error(coverage, rows.len()),
        median_width: median(&widths)?,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Band coverage

#[derive(Debug, Clone, Serialize)]
pub struct BandCoverageConfig {
    pub truth: AnalyticDensity,
    pub n: usize,
    pub alpha_level: f64,
    pub bootstrap_replicates: usize,
    pub supersample: usize,
    pub data_replicates: usize,
    pub kernel: Kernel,
    pub bandwidth: BandwidthRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandCoverageRow {
    pub mu_hat: f64,
    pub c_hat: f64,
    pub radius: f64,
    /// `∫|f̂ₙ − f|` for the true `f`.
    pub distance: f64,
    pub covered: bool,
    /// Mean of the band's standardized replicates `S_b`.
    pub statistic_mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BandCoverage {
    pub config: BandCoverageConfig,
    pub coverage: f64,
    pub coverage_se: f64,
    pub empty_bands: usize,
    pub median_radius: f64,
    /// Mean and standard deviation of all `S_b` pooled across bands.
    pub pooled_statistic_mean: f64,
    pub pooled_statistic_sd: f64,
    pub pooled_statistic_count: usize,
    #[serde(skip)]
    pub rows: Vec<BandCoverageRow>,
}

impl BandCoverage {
    pub fn to_csv(&self) -> String {
        table(
            "replicate,mu_hat,c_hat,radius,distance,covered,statistic_mean",
            &self.rows,
            |out, i, r| {
                let _ = write!(
                    out,
                    "{i},{},{},{},{},{},{}",
                    r.mu_hat, r.c_hat, r.radius, r.distance, r.covered as u8, r.statistic_mean
                );
            },
        )
    }
}

/// Replicate `r` draws data from `substream(r).substream(0)` and builds the
/// band with `substream(r).substream(1)`.
pub fn band_coverage(config: &BandCoverageConfig, rng: &RngStream) -> Result<BandCoverage> {
    require_replicates(config.data_replicates, 1, "coverage")?;
    let results = (0..config.data_replicates as u64)
        .into_par_iter()
        .map(|r| {
            let r = rng.substream(r);
            let data = sample_from_analytic(&config.truth, config.n, &mut r.substream(0))?;
            let band = l1_band(
                &data,
                config.alpha_level,
                config.bootstrap_replicates,
                config.supersample,
                &config.kernel,
                &config.bandwidth,
                &r.substream(1),
            )?;
            let row = BandCoverageRow {
                mu_hat: band.mu_hat,
                c_hat: band.c_hat,
                radius: band.radius,
                distance: l1_distance(&band.center, &config.truth)?,
                covered: band_contains(&band, &config.truth)?,
                statistic_mean: mean(&band.statistics)?,
            };
            Ok((row, band.statistics))
        })
        .collect::<Result<Vec<_>>>()?;
    let pooled: Vec<f64> = results.iter().flat_map(|(_, s)| s.iter().copied()).collect();
    let rows: Vec<BandCoverageRow> = results.into_iter().map(|(r, _)| r).collect();
    let coverage = rows.iter().filter(|r| r.covered).count() as f64 / rows.len() as f64;
    let radii: Vec<f64> = rows.iter().map(|r| r.radius).collect();
    Ok(BandCoverage {
        config: config.clone(),
        coverage,
        coverage_se: binomial_standard_error(coverage, rows.len()),
        empty_bands: rows.iter().filter(|r| r.radius < 0.0).count(),
        median_radius: median(&radii)?,
        pooled_statistic_mean: mean(&pooled)?,
        pooled_statistic_sd: std_dev(&pooled)?,
        pooled_statistic_count: pooled.len(),
        rows,
    })
}

// ---------------------------------------------------------------------------
// Naive bootstrap inconsistency

#[derive(Debug, Clone, Serialize)]
pub struct InconsistencyConfig {
    pub truth: AnalyticDensity,
    pub n: usize,
    pub t0: f64,
    pub replicates: usize,
    /// `V̂ar(ℂ)` and its standard error, from the limit simulation.
    pub chernoff_var: f64,
    pub chernoff_var_se: f64,
}

impl InconsistencyConfig {
    pub fn with_constants(
        truth: AnalyticDensity,
        n: usize,
        t0: f64,
        replicates: usize,
        constants: &LimitConstants,
    ) -> Self {
        InconsistencyConfig {
            truth,
            n,
            t0,
            replicates,
            chernoff_var: constants.chernoff_var,
            chernoff_var_se: constants.chernoff_var_se,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InconsistencyRow {
    /// `n^{1/3}(f̂ₙ(t0) − f(t0))`.
    pub sampling: f64,
    /// `n^{1/3}(f̂ₙ*(t0) − f̂ₙ(t0))`.
    pub bootstrap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Inconsistency {
    pub config: InconsistencyConfig,
    pub rate_constant: f64,
    /// `c(t0)² V̂ar(ℂ)`.
    pub reference_variance: f64,
    pub sampling_variance: f64,
    pub bootstrap_variance: f64,
    /// `Var[n^{1/3}(f̂ₙ*(t0) − f(t0))]`.
    pub total_variance: f64,
    /// `total_variance / reference_variance`; the limit is `2^{2/3}`.
    pub variance_ratio: f64,
    pub variance_ratio_lower: f64,
    pub variance_ratio_upper: f64,
    /// `sampling_variance / reference_variance`; the limit is 1.
    pub sampling_ratio: f64,
    /// Correlation of the bootstrap and sampling deviations.
    pub correlation: f64,
    #[serde(skip)]
    pub rows: Vec<InconsistencyRow>,
}

impl Inconsistency {
    pub fn to_csv(&self) -> String {
        table("replicate,sampling,bootstrap,total", &self.rows, |out, i, r| {
            let _ = write!(out, "{i},{},{},{}", r.sampling, r.bootstrap, r.sampling + r.bootstrap);
        })
    }
}

/// Joint replicate `r`: data from `substream(r).substream(0)`, one naive
/// resample from `substream(r).substream(1)`.
pub fn inconsistency(config: &InconsistencyConfig, rng: &RngStream) -> Result<Inconsistency> {
    require_replicates(config.replicates, 3, "the inconsistency study")?;
    let t0 = config.t0;
    let scale = (config.n as f64).cbrt();
    let f0 = config.truth.eval(t0);
    let rows = (0..config.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let r = rng.substream(r);
            let data = sample_from_analytic(&config.truth, config.n, &mut r.substream(0))?;
            let fit = grenander_fit(&data)?.value(t0);
            let resample = multinomial_bootstrap(&data, &mut r.substream(1));
            let boot = grenander_fit(&resample)?.value(t0);
            Ok(InconsistencyRow {
                sampling: scale * (fit - f0),
                bootstrap: scale * (boot - fit),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let sampling: Vec<f64> = rows.iter().map(|r| r.sampling).collect();
    let bootstrap: Vec<f64> = rows.iter().map(|r| r.bootstrap).collect();
    let total: Vec<f64> = rows.iter().map(|r| r.sampling + r.bootstrap).collect();
    let c = rate_constant_c(&config.truth, t0)?;
    let reference = c * c * config.chernoff_var;
    let total_variance = variance(&total)?;
    let ratio = total_variance / reference;
    let rel = ((variance_standard_error(&total)? / total_variance).powi(2)
        + (config.chernoff_var_se / config.chernoff_var).powi(2))
    .sqrt();
    let sampling_variance = variance(&sampling)?;
    Ok(Inconsistency {
        config: config.clone(),
        rate_constant: c,
        reference_variance: reference,
        sampling_variance,
        bootstrap_variance: variance(&bootstrap)?,
        total_variance,
        variance_ratio: ratio,
        variance_ratio_lower: ratio * (1.0 - Z_95 * rel),
        variance_ratio_upper: ratio * (1.0 + Z_95 * rel),
        sampling_ratio: sampling_variance / reference,
        correlation: correlation(&sampling, &bootstrap)?,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Convergence rates

#[derive(Debug, Clone, Serialize)]
pub struct RateConfig {
    pub truth: AnalyticDensity,
    pub sizes: Vec<usize>,
    pub replicates: usize,
    pub kernel: Kernel,
    pub bandwidth: BandwidthRule,
    /// Point for the Grenander error.
    pub t0: f64,
    pub grid_size: usize,
}

impl RateConfig {
    /// `n = 10^3, 10^{3.5}, 10^4, 10^{4.5}`, rounded.
    pub fn default_sizes() -> Vec<usize> {
        [3.0, 3.5, 4.0, 4.5]
            .iter()
            .map(|e: &f64| 10f64.powf(*e).round() as usize)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub n: usize,
    pub replicate: usize,
    /// `sup |f̃ₙ − f|`.
    pub sup_error: f64,
    /// `sup |f̃ₙ' − f'|` over grid points where `f̃ₙ > 0`.
    pub derivative_error: f64,
    /// `|f̂ₙ(t0) − f(t0)|`.
    pub grenander_error: f64,
    /// `max |f̃ₙ''|` over the grid; `None` when the kernel lacks B5–B6.
    pub second_derivative_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateLevel {
    pub n: usize,
    pub median_sup_error: f64,
    pub median_derivative_error: f64,
    pub median_grenander_error: f64,
    /// `n^{1/3}` times the median sup error.
    pub scaled_sup_error: f64,
    pub median_second_derivative_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slope {
    pub slope: f64,
    pub standard_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Rates {
    pub config: RateConfig,
    pub levels: Vec<RateLevel>,
    /// Log–log slopes of the medians against `n`.
    pub sup_slope: Slope,
    pub derivative_slope: Slope,
    pub grenander_slope: Slope,
    pub scaled_sup_decreasing: bool,
    #[serde(skip)]
    pub rows: Vec<RateRow>,
}

impl Rates {
    pub fn to_csv(&self) -> String {
        table(
            "n,replicate,sup_error,derivative_error,grenander_error,second_derivative_max",
            &self.rows,
            |out, _, r| {
                let _ = write!(
                    out,
                    "{},{},{},{},{},",
                    r.n, r.replicate, r.sup_error, r.derivative_error, r.grenander_error
                );
                if let Some(v) = r.second_derivative_max {
                    let _ = write!(out, "{v}");
                }
            },
        )
    }
}

fn derivative_sup_error<G: Differentiable>(
    sd: &SmoothedDensity,
    truth: &G,
    grid_size: usize,
) -> f64 {
    let last = (grid_size - 1) as f64;
    (0..grid_size)
        .map(|i| i as f64 / last)
        .filter(|&t| sd.value(t) > 0.0)
        .map(|t| (sd.derivative(t) - truth.derivative(t)).abs())
        .fold(0.0, f64::max)
}

fn second_derivative_max(sd: &SmoothedDensity, grid_size: usize) -> Result<f64> {
    let last = (grid_size - 1) as f64;
    (0..grid_size).try_fold(0.0, |m: f64, i| {
        Ok(m.max(sd.derivative_estimate(i as f64 / last, 2)?.abs()))
    })
}

fn slope(ns: &[f64], values: &[f64]) -> Result<Slope> {
    let x: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (slope, standard_error) = ols_slope(&x, &y)?;
    Ok(Slope {
        slope,
        standard_error,
    })
}

/// Replicate `r` at size index `i` draws from `substream(i).substream(r)`.
pub fn rates(config: &RateConfig, rng: &RngStream) -> Result<Rates> {
    require_replicates(config.replicates, 1, "the rate study")?;
    if config.sizes.len() < 2 {
        return Err(Error::InvalidParameter("the rate study needs two sample sizes".into()));
    }
    if config.grid_size < 2 {
        return Err(Error::InvalidParameter("grid_size must be at least 2".into()));
    }
    let f0 = config.truth.eval(config.t0);
    let curvature = config.kernel.require(KernelLevel::B6).is_ok();
    let jobs: Vec<(usize, usize)> = (0..config.sizes.len())
        .flat_map(|i| (0..config.replicates).map(move |r| (i, r)))
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(i, r)| {
            let n = config.sizes[i];
            let mut stream = rng.substream(i as u64).substream(r as u64);
            let data = sample_from_analytic(&config.truth, n, &mut stream)?;
            let sd = SmoothedDensity::fit(&data, config.kernel.clone(), &config.bandwidth)?;
            Ok(RateRow {
                n,
                replicate: r,
                sup_error: sup_distance(&sd, &config.truth, config.grid_size)?,
                derivative_error: derivative_sup_error(&sd, &config.truth, config.grid_size),
                grenander_error: (grenander_fit(&data)?.value(config.t0) - f0).abs(),
                second_derivative_max: curvature
                    .then(|| second_derivative_max(&sd, config.grid_size))
                    .transpose()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let levels = config
        .sizes
        .iter()
        .map(|&n| {
            let of = |f: fn(&RateRow) -> f64| -> Result<f64> {
                let v: Vec<f64> = rows.iter().filter(|r| r.n == n).map(f).collect();
                median(&v)
            };
            let sup = of(|r| r.sup_error)?;
            Ok(RateLevel {
                n,
                median_sup_error: sup,
                median_derivative_error: of(|r| r.derivative_error)?,
                median_grenander_error: of(|r| r.grenander_error)?,
                scaled_sup_error: (n as f64).cbrt() * sup,
                median_second_derivative_max: curvature
                    .then(|| {
                        let v: Vec<f64> = rows
                            .iter()
                            .filter(|r| r.n == n)
                            .filter_map(|r| r.second_derivative_max)
                            .collect();
                        median(&v)
                    })
                    .transpose()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ns: Vec<f64> = levels.iter().map(|l| l.n as f64).collect();
    let col = |f: fn(&RateLevel) -> f64| -> Vec<f64> { levels.iter().map(f).collect() };
    Ok(Rates {
        config: config.clone(),
        sup_slope: slope(&ns, &col(|l| l.median_sup_error))?,
        derivative_slope: slope(&ns, &col(|l| l.median_derivative_error))?,
        grenander_slope: slope(&ns, &col(|l| l.median_grenander_error))?,
        scaled_sup_decreasing: levels
            .windows(2)
            .all(|w| w[1].scaled_sup_error < w[0].scaled_sup_error),
        levels,
        rows,
    })
}

// ---------------------------------------------------------------------------
// L1 central limit theorem

#[derive(Debug, Clone, Serialize)]
pub struct L1CltConfig {
    pub truth: AnalyticDensity,
    pub n: usize,
    pub replicates: usize,
    pub abs_xi_mean: f64,
    pub sigma2: f64,
}

impl L1CltConfig {
    pub fn with_constants(
        truth: AnalyticDensity,
        n: usize,
        replicates: usize,
        constants: &LimitConstants,
    ) -> Self {
        L1CltConfig {
            truth,
            n,
            replicates,
            abs_xi_mean: constants.abs_xi_mean,
            sigma2: constants.sigma2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L1CltRow {
    pub l1_error: f64,
    /// `n^{1/6}(n^{1/3}∫|f̂ₙ − f| − μ(f))`.
    pub statistic: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct L1Clt {
    pub config: L1CltConfig,
    /// `μ(f)`.
    pub mu: f64,
    pub statistic_mean: f64,
    pub statistic_variance: f64,
    /// KS distance of the statistics from `N(0, σ̂²)`.
    pub ks: f64,
    pub ks_critical: f64,
    #[serde(skip)]
    pub rows: Vec<L1CltRow>,
}

impl L1Clt {
    pub fn to_csv(&self) -> String {
        table("replicate,l1_error,statistic", &self.rows, |out, i, r| {
            let _ = write!(out, "{i},{},{}", r.l1_error, r.statistic);
        })
    }
}

/// Replicate `r` draws data from `substream(r)`.
pub fn l1_clt(config: &L1CltConfig, rng: &RngStream) -> Result<L1Clt> {
    require_replicates(config.replicates, 2, "the L1 CLT study")?;
    if !(config.sigma2 > 0.0) {
        return Err(Error::InvalidParameter("sigma2 must be positive".into()));
    }
    let nf = config.n as f64;
    let mu = 2.0 * config.abs_xi_mean * mu_shape_integral(&config.truth)?;
    let rows = (0..config.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let data = sample_from_analytic(&config.truth, config.n, &mut rng.substream(r))?;
            let l1 = l1_distance(&grenander_fit(&data)?, &config.truth)?;
            Ok(L1CltRow {
                l1_error: l1,
                statistic: nf.powf(1.0 / 6.0) * (nf.cbrt() * l1 - mu),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let stats: Vec<f64> = rows.iter().map(|r| r.statistic).collect();
    let normal = Normal::new(0.0, config.sigma2.sqrt())
        .map_err(|e| Error::InvalidParameter(format!("reference normal: {e}")))?;
    Ok(L1Clt {
        config: config.clone(),
        mu,
        statistic_mean: mean(&stats)?,
        statistic_variance: variance(&stats)?,
        ks: ks_one_sample(&stats, |x| normal.cdf(x))?,
        ks_critical: ks_critical_one_sample(stats.len(), KS_LEVEL),
        rows,
    })
}
