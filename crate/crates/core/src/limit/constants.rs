use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::path::{check_boundary_rate, simulate_path, xi_values};
use crate::density::Differentiable;
use crate::distance::mu_shape_integral;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::stats::{covariance, mean, std_dev, variance};

/// Simulation settings for [`estimate_constants`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitConfig {
    pub delta: f64,
    /// Search window `W` for each `ξ(t)`.
    pub window: f64,
    pub paths: usize,
    /// Covariance lags run over `[0, x_max]`.
    pub x_max: f64,
    pub lag_step: f64,
    pub batches: usize,
}

impl Default for LimitConfig {
    fn default() -> Self {
        LimitConfig {
            delta: 0.002,
            window: 3.0,
            paths: 10_000,
            x_max: 8.0,
            lag_step: 0.25,
            batches: 20,
        }
    }
}

impl LimitConfig {
    /// Path half-width `W + x_max`, enough for every lag's window.
    pub fn half_width(&self) -> f64 {
        self.window + self.x_max
    }

    pub fn lags(&self) -> Vec<f64> {
        let steps = (self.x_max / self.lag_step).round() as usize;
        (0..=steps).map(|j| j as f64 * self.lag_step).collect()
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !(positive(self.delta) && positive(self.window) && positive(self.lag_step)) {
            return Err(Error::InvalidParameter(
                "delta, window and lag step must be positive".into(),
            ));
        }
        if !(self.x_max >= self.lag_step && self.x_max.is_finite()) {
            return Err(Error::InvalidParameter("x_max must be at least one lag step".into()));
        }
        if self.batches < 2 || self.paths < 2 * self.batches {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 batches of 2 paths, got {} paths in {} batches",
                self.paths, self.batches
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovariancePoint {
    pub lag: f64,
    /// Across-path covariance of `|ξ(0)|` and `|ξ(lag)|`.
    pub covariance: f64,
    pub standard_error: f64,
}

/// Monte Carlo estimates of the limit constants with batch-means errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitConstants {
    /// `Ê|ξ(0)|`.
    pub abs_xi_mean: f64,
    pub abs_xi_mean_se: f64,
    /// `V̂ar(ℂ)`.
    pub chernoff_var: f64,
    pub chernoff_var_se: f64,
    /// `σ̂² = 8 ∫₀^{x_max} cov(|ξ(0)|, |ξ(x)|) dx`.
    pub sigma2: f64,
    pub sigma2_se: f64,
    pub boundary_hits: usize,
    pub config: LimitConfig,
    pub covariance: Vec<CovariancePoint>,
}

/// Trapezoid rule on a uniform grid.
fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => step * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

struct Estimates {
    abs_mean: f64,
    var: f64,
    covs: Vec<f64>,
    sigma2: f64,
}

/// `rows[p]` holds `ξ(lag_j)` for path `p`.
fn estimate(rows: &[Vec<f64>], step: f64) -> Result<Estimates> {
    let lags = rows[0].len();
    let column = |j: usize| -> Vec<f64> { rows.iter().map(|r| r[j].abs()).collect() };
    let origin: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let abs_origin = column(0);
    let covs = (0..lags)
        .map(|j| covariance(&abs_origin, &column(j)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Estimates {
        abs_mean: mean(&abs_origin)?,
        var: variance(&origin)?,
        sigma2: 8.0 * trapezoid(&covs, step),
        covs,
    })
}

/// `Ê|ξ(0)|`, `V̂ar(ℂ)` and `σ̂²` from `config.paths` paths; path `p` uses
/// `rng.substream(p)`. Errors are the spread of per-batch estimates.
pub fn estimate_constants(config: &LimitConfig, rng: &RngStream) -> Result<LimitConstants> {
    config.validate()?;
    let lags = config.lags();
    let half_width = config.half_width();
    let draws = (0..config.paths as u64)
        .into_par_iter()
        .map(|p| {
            let path = simulate_path(config.delta, half_width, &mut rng.substream(p))?;
            xi_values(&path, &lags, config.window)
        })
        .collect::<Result<Vec<_>>>()?;
    let hits = draws.iter().flatten().filter(|a| a.boundary_hit).count();
    check_boundary_rate(hits, draws.len() * lags.len())?;
    let rows: Vec<Vec<f64>> = draws
        .into_iter()
        .map(|r| r.into_iter().map(|a| a.location).collect())
        .collect();

    let whole = estimate(&rows, config.lag_step)?;
    let size = rows.len() / config.batches;
    let per_batch = rows
        .chunks_exact(size)
        .take(config.batches)
        .map(|b| estimate(b, config.lag_step))
        .collect::<Result<Vec<_>>>()?;
    let se = |f: &dyn Fn(&Estimates) -> f64| -> Result<f64> {
        let v: Vec<f64> = per_batch.iter().map(f).collect();
        Ok(std_dev(&v)? / (config.batches as f64).sqrt())
    };
    let covariance = lags
        .iter()
        .enumerate()
        .map(|(j, &lag)| {
            Ok(CovariancePoint {
                lag,
                covariance: whole.covs[j],
                standard_error: se(&|e| e.covs[j])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(LimitConstants {
        abs_xi_mean: whole.abs_mean,
        abs_xi_mean_se: se(&|e| e.abs_mean)?,
        chernoff_var: whole.var,
        chernoff_var_se: se(&|e| e.var)?,
        sigma2: whole.sigma2,
        sigma2_se: se(&|e| e.sigma2)?,
        boundary_hits: hits,
        config: *config,
        covariance,
    })
}

/// `μ(g) = 2 Ê|ξ(0)| ∫₀¹ |½ ġ g|^{1/3}`.
pub fn mu_of_density<G: Differentiable + ?Sized>(g: &G, constants: &LimitConstants) -> Result<f64> {
    Ok(2.0 * constants.abs_xi_mean * mu_shape_integral(g)?)
}
