//! Compactly supported smoothing kernels and verification of the regularity
//! conditions the smoothed bootstrap relies on.
//!
//! Conditions, all on the support `[-1, 1]`:
//!
//! | id | requirement |
//! |----|-------------|
//! | B1 | `K ≥ 0`, zero outside `[-1, 1]` |
//! | B2 | `K` bounded, `∫K = 1` |
//! | B3 | `K̇` bounded, `v K̇(v) ≤ 0`, `∫K̇ = 0`, `∫v K̇ = −1` |
//! | B4 | `|K̇|` uniformly bounded |
//! | B5 | `∫v K = 0`, `∫K̈ = 0`, `∫v K̈ = 0` |
//! | B6 | `|d/dv K̈|` uniformly bounded |
//!
//! Kernels given as polynomials on the support (Epanechnikov, biweight) get
//! exact moments, which override the quadrature residuals in the pass/fail
//! decision.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, DEFAULT_MAX_DEPTH};

/// Residual below which a condition counts as satisfied.
pub const CONDITION_TOLERANCE: f64 = 1e-6;
const CHECK_GRID: usize = 100_000;
const MOMENT_TOLERANCE: f64 = 1e-10;

/// Evaluators for a kernel that is not a polynomial on its support. Each
/// function is only called on `[-1, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct KernelFns {
    pub value: fn(f64) -> f64,
    pub first: fn(f64) -> f64,
    pub second: fn(f64) -> f64,
    pub third: fn(f64) -> f64,
}

#[derive(Debug, Clone)]
enum Shape {
    /// Ascending coefficients of `K, K̇, K̈, K⃛`, and of `∫_{-1}^v K`.
    Polynomial {
        derivatives: [Vec<f64>; 4],
        antiderivative: Vec<f64>,
    },
    Custom(KernelFns),
}

#[derive(Debug, Clone)]
pub struct Kernel {
    name: String,
    shape: Shape,
    level: OnceLock<Option<KernelLevel>>,
}

/// Which block of conditions to verify.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum KernelLevel {
    /// B1–B4: enough for pointwise inference.
    B4,
    /// B1–B6: required for L1 inference and second-derivative estimates.
    B6,
}

fn poly_eval(coeffs: &[f64], v: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * v + c)
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect()
}

/// `∫_{-1}^{1} v^{shift} p(v) dv`.
fn poly_moment(coeffs: &[f64], shift: usize) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let p = k + shift;
            if p % 2 == 0 {
                2.0 * c / (p as f64 + 1.0)
            } else {
                0.0
            }
        })
        .sum()
}

impl Kernel {
    /// A kernel equal to `Σ coeffs[k] v^k` on `[-1, 1]` and zero outside.
    pub fn polynomial(name: impl Into<String>, coeffs: Vec<f64>) -> Result<Kernel> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "polynomial kernel needs finite coefficients".into(),
            ));
        }
        let d1 = poly_derivative(&coeffs);
        let d2 = poly_derivative(&d1);
        let d3 = poly_derivative(&d2);
        let mut antiderivative: Vec<f64> = std::iter::once(0.0)
            .chain(coeffs.iter().enumerate().map(|(k, c)| c / (k as f64 + 1.0)))
            .collect();
        antiderivative[0] = -poly_eval(&antiderivative, -1.0);
        Ok(Kernel {
            name: name.into(),
            shape: Shape::Polynomial {
                derivatives: [coeffs, d1, d2, d3],
                antiderivative,
            },
            level: OnceLock::new(),
        })
    }

    pub fn custom(name: impl Into<String>, fns: KernelFns) -> Kernel {
        Kernel {
            name: name.into(),
            shape: Shape::Custom(fns),
            level: OnceLock::new(),
        }
    }

    /// `K(v) = (3/4)(1 − v²)`; satisfies B1–B4 but not B5.
    pub fn epanechnikov() -> Kernel {
        Kernel::polynomial("epanechnikov", vec![0.75, 0.0, -0.75]).unwrap()
    }

    /// `K(v) = (15/16)(1 − v²)²`; satisfies B1–B6.
    pub fn biweight() -> Kernel {
        let c = 15.0 / 16.0;
        Kernel::polynomial("biweight", vec![c, 0.0, -2.0 * c, 0.0, c]).unwrap()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `K^{(order)}(v)` for `order ≤ 3`; zero outside `[-1, 1]`.
    pub fn derivative(&self, v: f64, order: usize) -> f64 {
        if !(-1.0..=1.0).contains(&v) {
            return 0.0;
        }
        match &self.shape {
            Shape::Polynomial { derivatives, .. } => poly_eval(&derivatives[order], v),
            Shape::Custom(f) => match order {
                0 => (f.value)(v),
                1 => (f.first)(v),
                2 => (f.second)(v),
                3 => (f.third)(v),
                _ => panic!("kernel derivatives are available up to order 3"),
            },
        }
    }

    pub fn value(&self, v: f64) -> f64 {
        self.derivative(v, 0)
    }

    /// `∫_{-1}^{v} K`.
    pub fn cdf(&self, v: f64) -> f64 {
        if v <= -1.0 {
            return 0.0;
        }
        let v = v.min(1.0);
        match &self.shape {
            Shape::Polynomial { antiderivative, .. } => poly_eval(antiderivative, v),
            Shape::Custom(f) => adaptive_simpson(f.value, -1.0, v, 1e-12, DEFAULT_MAX_DEPTH)
                .unwrap_or(f64::NAN),
        }
    }

    /// Ascending coefficients of `K^{(order)}` on the support, for polynomial
    /// kernels.
    pub fn polynomial_coefficients(&self, order: usize) -> Option<&[f64]> {
        match &self.shape {
            Shape::Polynomial { derivatives, .. } => derivatives.get(order).map(Vec::as_slice),
            Shape::Custom(_) => None,
        }
    }

    /// Highest condition block this kernel satisfies, computed once.
    pub fn level(&self) -> Option<KernelLevel> {
        *self.level.get_or_init(|| {
            let passes = |level| {
                check_kernel_conditions(self, level)
                    .map(|r| r.passed())
                    .unwrap_or(false)
            };
            if passes(KernelLevel::B6) {
                Some(KernelLevel::B6)
            } else if passes(KernelLevel::B4) {
                Some(KernelLevel::B4)
            } else {
                None
            }
        })
    }

    /// Errors unless the kernel satisfies `level`.
    pub fn require(&self, level: KernelLevel) -> Result<()> {
        if self.level().is_some_and(|l| l >= level) {
            Ok(())
        } else {
            let condition = match level {
                KernelLevel::B4 => "conditions B1-B4",
                KernelLevel::B6 => "conditions B1-B6",
            };
            Err(Error::KernelCondition {
                kernel: self.name.clone(),
                condition: condition.into(),
            })
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Serializes as the kernel's name.
impl Serialize for Kernel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name)
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kernel> {
        match s {
            "epanechnikov" => Ok(Kernel::epanechnikov()),
            "biweight" => Ok(Kernel::biweight()),
            other => Err(Error::InvalidParameter(format!(
                "unknown kernel `{other}`; expected epanechnikov or biweight"
            ))),
        }
    }
}

/// Outcome of one condition.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionCheck {
    pub condition: &'static str,
    pub requirement: &'static str,
    /// Numerically computed quantity (integral by adaptive Simpson, or grid
    /// extremum).
    pub value: f64,
    /// Distance of `value` from the requirement.
    pub residual: f64,
    /// Exact residual when the kernel has closed-form moments.
    pub analytic_residual: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    pub kernel: String,
    pub level: KernelLevel,
    pub checks: Vec<ConditionCheck>,
}

impl KernelReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Verifies B1–B4 (and B5–B6 when `level` is [`KernelLevel::B6`]).
pub fn check_kernel_conditions(kernel: &Kernel, level: KernelLevel) -> Result<KernelReport> {
    let grid: Vec<f64> = (0..CHECK_GRID)
        .map(|i| -1.0 + 2.0 * (i as f64 + 0.5) / CHECK_GRID as f64)
        .collect();
    let grid_fold = |f: &dyn Fn(f64) -> f64, init: f64, pick: fn(f64, f64) -> f64| -> Result<f64> {
        let mut acc = init;
        for &v in &grid {
            let x = f(v);
            if !x.is_finite() {
                return Err(Error::NonFinite(format!(
                    "evaluating kernel `{}` at {v}",
                    kernel.name
                )));
            }
            acc = pick(acc, x);
        }
        Ok(acc)
    };
    let integral = |f: &dyn Fn(f64) -> f64| {
        adaptive_simpson(f, -1.0, 1.0, MOMENT_TOLERANCE, DEFAULT_MAX_DEPTH)
    };
    let coeffs = |order| kernel.polynomial_coefficients(order);
    let k = |order: usize| move |v: f64| kernel.derivative(v, order);

    let mut checks = Vec::new();
    let mut push = |condition, requirement, value: f64, residual: f64, analytic: Option<f64>| {
        let decisive = analytic.unwrap_or(residual);
        checks.push(ConditionCheck {
            condition,
            requirement,
            value,
            residual,
            analytic_residual: analytic,
            passed: decisive.is_finite() && decisive < CONDITION_TOLERANCE,
        });
    };
    let bounded = |max: f64| if max.is_finite() { 0.0 } else { f64::INFINITY };

    let min_k = grid_fold(&k(0), f64::INFINITY, f64::min)?;
    push("B1", "K(v) >= 0 on [-1, 1]", min_k, (-min_k).max(0.0), None);

    let max_k = grid_fold(&|v| kernel.value(v).abs(), 0.0, f64::max)?;
    push("B2", "K bounded", max_k, bounded(max_k), None);
    let mass = integral(&k(0))?;
    let exact = coeffs(0).map(|c| (poly_moment(c, 0) - 1.0).abs());
    push("B2", "integral of K equals 1", mass, (mass - 1.0).abs(), exact);

    let max_d1 = grid_fold(&|v| kernel.derivative(v, 1).abs(), 0.0, f64::max)?;
    push("B3", "K' bounded", max_d1, bounded(max_d1), None);
    let sign = grid_fold(&|v| v * kernel.derivative(v, 1), f64::NEG_INFINITY, f64::max)?;
    push("B3", "v K'(v) <= 0", sign, sign.max(0.0), None);
    let d1_mass = integral(&k(1))?;
    let exact = coeffs(1).map(|c| poly_moment(c, 0).abs());
    push("B3", "integral of K' equals 0", d1_mass, d1_mass.abs(), exact);
    let d1_moment = integral(&|v| v * kernel.derivative(v, 1))?;
    let exact = coeffs(1).map(|c| (poly_moment(c, 1) + 1.0).abs());
    push("B3", "integral of v K' equals -1", d1_moment, (d1_moment + 1.0).abs(), exact);

    push("B4", "|K'| uniformly bounded", max_d1, bounded(max_d1), None);

    if level == KernelLevel::B6 {
        let first = integral(&|v| v * kernel.value(v))?;
        let exact = coeffs(0).map(|c| poly_moment(c, 1).abs());
        push("B5", "integral of v K equals 0", first, first.abs(), exact);
        let d2_mass = integral(&k(2))?;
        let exact = coeffs(2).map(|c| poly_moment(c, 0).abs());
        push("B5", "integral of K'' equals 0", d2_mass, d2_mass.abs(), exact);
        let d2_moment = integral(&|v| v * kernel.derivative(v, 2))?;
        let exact = coeffs(2).map(|c| poly_moment(c, 1).abs());
        push("B5", "integral of v K'' equals 0", d2_moment, d2_moment.abs(), exact);
        let max_d3 = grid_fold(&|v| kernel.derivative(v, 3).abs(), 0.0, f64::max)?;
        push("B6", "|K'''| uniformly bounded", max_d3, bounded(max_d3), None);
    }

    Ok(KernelReport {
        kernel: kernel.name.clone(),
        level,
        checks,
    })
}
