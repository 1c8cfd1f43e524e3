//! Closed-form monotone densities used as ground truth in simulations.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::density::{Density, Differentiable, LinearPiece};
use crate::error::{Error, Result};

/// Densities on `[0, 1]` with closed-form derivatives, CDF and inverse CDF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum AnalyticDensity {
    /// `g(t) = 1`.
    Uniform,
    /// `g(t) = 2(1 − t)`.
    Triangular,
    /// `g(t) = λ e^{−λt} / (1 − e^{−λ})`.
    TruncatedExponential { rate: f64 },
}

impl AnalyticDensity {
    pub fn truncated_exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "truncated exponential rate must be positive, got {rate}"
            )));
        }
        Ok(AnalyticDensity::TruncatedExponential { rate })
    }

    fn trunc_exp_norm(rate: f64) -> f64 {
        // 1 − e^{−λ}
        -(-rate).exp_m1()
    }

    pub fn eval(&self, t: f64) -> f64 {
        if !(0.0..=1.0).contains(&t) {
            return 0.0;
        }
        match *self {
            AnalyticDensity::Uniform => 1.0,
            AnalyticDensity::Triangular => 2.0 * (1.0 - t),
            AnalyticDensity::TruncatedExponential { rate } => {
                rate * (-rate * t).exp() / Self::trunc_exp_norm(rate)
            }
        }
    }

    pub fn first_derivative(&self, t: f64) -> f64 {
        match *self {
            AnalyticDensity::Uniform => 0.0,
            AnalyticDensity::Triangular => -2.0,
            AnalyticDensity::TruncatedExponential { rate } => -rate * self.eval(t),
        }
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        match *self {
            AnalyticDensity::Uniform | AnalyticDensity::Triangular => 0.0,
            AnalyticDensity::TruncatedExponential { rate } => rate * rate * self.eval(t),
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match *self {
            AnalyticDensity::Uniform => t,
            AnalyticDensity::Triangular => t * (2.0 - t),
            AnalyticDensity::TruncatedExponential { rate } => {
                -(-rate * t).exp_m1() / Self::trunc_exp_norm(rate)
            }
        }
    }

    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match *self {
            AnalyticDensity::Uniform => u,
            AnalyticDensity::Triangular => 1.0 - (1.0 - u).sqrt(),
            AnalyticDensity::TruncatedExponential { rate } => {
                (-(u * (-rate).exp_m1()).ln_1p() / rate).clamp(0.0, 1.0)
            }
        }
    }

    /// Non-increasing and bounded on `[0, 1]`.
    pub fn satisfies_a1(&self) -> bool {
        true
    }

    /// Derivative bounded away from 0 and infinity in absolute value.
    pub fn satisfies_a2(&self) -> bool {
        !matches!(self, AnalyticDensity::Uniform)
    }

    /// Derivative continuous at `t0`.
    pub fn satisfies_a3_at(&self, t0: f64) -> bool {
        t0 > 0.0 && t0 < 1.0
    }

    /// Bounded second derivative.
    pub fn satisfies_a3_prime(&self) -> bool {
        true
    }
}

impl Density for AnalyticDensity {
    fn value(&self, t: f64) -> f64 {
        self.eval(t)
    }

    fn linear_pieces(&self) -> Option<Vec<LinearPiece>> {
        let (value, slope) = match self {
            AnalyticDensity::Uniform => (1.0, 0.0),
            AnalyticDensity::Triangular => (2.0, -2.0),
            AnalyticDensity::TruncatedExponential { .. } => return None,
        };
        Some(vec![LinearPiece {
            start: 0.0,
            end: 1.0,
            value,
            slope,
        }])
    }
}

impl Differentiable for AnalyticDensity {
    fn derivative(&self, t: f64) -> f64 {
        self.first_derivative(t)
    }
}

impl fmt::Display for AnalyticDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticDensity::Uniform => write!(f, "uniform"),
            AnalyticDensity::Triangular => write!(f, "triangular"),
            AnalyticDensity::TruncatedExponential { rate } => write!(f, "trunc-exp:{rate}"),
        }
    }
}

/// Parses `uniform`, `triangular`, `trunc-exp` (rate 1), `trunc-exp:RATE` or
/// `trunc-exp(RATE)`.
impl FromStr for AnalyticDensity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "uniform" => return Ok(AnalyticDensity::Uniform),
            "triangular" => return Ok(AnalyticDensity::Triangular),
            "trunc-exp" => return AnalyticDensity::truncated_exponential(1.0),
            _ => {}
        }
        let rate = s
            .strip_prefix("trunc-exp:")
            .or_else(|| s.strip_prefix("trunc-exp(").and_then(|r| r.strip_suffix(')')));
        match rate.map(str::parse::<f64>) {
            Some(Ok(rate)) => AnalyticDensity::truncated_exponential(rate),
            _ => Err(Error::InvalidParameter(format!(
                "unknown density `{s}`; expected uniform, triangular or trunc-exp(RATE)"
            ))),
        }
    }
}
