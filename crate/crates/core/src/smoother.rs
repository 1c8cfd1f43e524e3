//! Boundary-corrected kernel density estimator.
//!
//! On `[h, 1 − h]` the estimate is the usual kernel sum
//! `f̌(t) = (nh)⁻¹ Σ K((t − Xᵢ)/h)`. On `[0, h)` and `(1 − h, 1]` it is
//! continued linearly from the seam with slope `min(f̌'(seam), 0)`, so the
//! extension never increases. The final estimate is the positive part
//! renormalised to unit mass:
//!
//! ```text
//! f̃(t) = max(f̌(t), 0) / Z₊,   Z₊ = ∫₀¹ max(f̌(s), 0) ds
//! ```
//!
//! Because the kernel is non-negative, the interior sum and the left
//! extension are never negative; only the right extension can cross zero.
//!
//! Polynomial kernels are evaluated from prefix sums of the sample's powers,
//! so each evaluation costs two binary searches and a handful of flops.
//! Powers are taken about the centre of the observation's own block of
//! width `h`, which keeps the Taylor shift short and the sums well
//! conditioned at any bandwidth.

use crate::bandwidth::BandwidthRule;
use crate::density::{Density, Differentiable};
use crate::error::{Error, Result};
use crate::kernel::{Kernel, KernelLevel};
use crate::quadrature::integrate_partition;
use crate::sample::Sample;

const DEGENERATE_MASS: f64 = 1e-12;
const INTERIOR_TOLERANCE: f64 = 1e-10;
/// Slack for floating-point round-off when checking `t ∈ [h, 1 − h]`.
const SEAM_SLACK: f64 = 1e-12;

/// Linear continuation `value + slope·(t − anchor)` beyond a seam.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Extension {
    anchor: f64,
    value: f64,
    slope: f64,
}

impl Extension {
    fn at(&self, t: f64) -> f64 {
        self.value + (t - self.anchor) * self.slope
    }
}

/// `prefix[j][i] = Σ_{l < i} w_l^j` with `w_l = (X_l − c_k)/h`, where
/// `c_k = (k + ½)h` is the centre of the block holding `X_l`.
#[derive(Debug, Clone)]
struct PowerSums {
    prefix: Vec<Vec<f64>>,
    /// `starts[k]` is the first index in block `k`; one sentinel at the end.
    starts: Vec<usize>,
    h: f64,
}

impl PowerSums {
    fn new(values: &[f64], degree: usize, h: f64) -> Self {
        let blocks = (1.0 / h).floor() as usize + 1;
        let starts: Vec<usize> = (0..=blocks)
            .map(|k| values.partition_point(|&x| x < k as f64 * h))
            .collect();
        let mut w = vec![0.0; values.len()];
        for k in 0..blocks {
            let c = (k as f64 + 0.5) * h;
            for i in starts[k]..starts[k + 1] {
                w[i] = (values[i] - c) / h;
            }
        }
        let prefix = (0..=degree)
            .map(|j| {
                let mut acc = 0.0;
                std::iter::once(0.0)
                    .chain(w.iter().map(|&wi| {
                        acc += wi.powi(j as i32);
                        acc
                    }))
                    .collect()
            })
            .collect();
        PowerSums { prefix, starts, h }
    }

    /// `Σ p((t − Xᵢ)/h)` over indices `lo..hi`, given `p`'s coefficients.
    fn sum(&self, coeffs: &[f64], t: f64, lo: usize, hi: usize) -> f64 {
        let first = self.starts.partition_point(|&s| s <= lo) - 1;
        let mut total = 0.0;
        for k in first..self.starts.len() - 1 {
            let (a, b) = (lo.max(self.starts[k]), hi.min(self.starts[k + 1]));
            if a >= hi {
                break;
            }
            if a >= b {
                continue;
            }
            // Σᵢ p(u − wᵢ) = Σ_j [p^{(j)}(u)/j!] (−1)^j Σᵢ wᵢ^j, u = (t − c_k)/h.
            let u = (t - (k as f64 + 0.5) * self.h) / self.h;
            for (j, tj) in taylor_coefficients(coeffs, u).iter().enumerate() {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                total += sign * tj * (self.prefix[j][b] - self.prefix[j][a]);
            }
        }
        total
    }
}

#[derive(Debug, Clone)]
pub struct SmoothedDensity {
    values: Vec<f64>,
    kernel: Kernel,
    h: f64,
    sums: Option<PowerSums>,
    left: Extension,
    right: Extension,
    zero_crossing: Option<f64>,
    normalizer: f64,
}

impl SmoothedDensity {
    /// Fits with the bandwidth `rule` prescribes for this sample size.
    pub fn fit(sample: &Sample, kernel: Kernel, rule: &BandwidthRule) -> Result<Self> {
        let h = rule.bandwidth(sample.len())?;
        Self::with_bandwidth(sample, kernel, h)
    }

    pub fn with_bandwidth(sample: &Sample, kernel: Kernel, h: f64) -> Result<Self> {
        if !(h > 0.0 && h <= 0.5) {
            return Err(Error::Domain {
                name: "bandwidth",
                value: h,
                domain: "(0, 1/2]",
            });
        }
        let values = sample.values().to_vec();
        let sums = kernel
            .polynomial_coefficients(0)
            .map(|c| PowerSums::new(&values, c.len() - 1, h));
        let mut sd = SmoothedDensity {
            values,
            kernel,
            h,
            sums,
            left: Extension {
                anchor: h,
                value: 0.0,
                slope: 0.0,
            },
            right: Extension {
                anchor: 1.0 - h,
                value: 0.0,
                slope: 0.0,
            },
            zero_crossing: None,
            normalizer: 1.0,
        };
        sd.left.value = sd.raw(h, 0);
        sd.left.slope = sd.raw(h, 1).min(0.0);
        sd.right.value = sd.raw(1.0 - h, 0);
        sd.right.slope = sd.raw(1.0 - h, 1).min(0.0);
        if [sd.left.value, sd.left.slope, sd.right.value, sd.right.slope]
            .iter()
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("evaluating the kernel estimate at its seams".into()));
        }
        if sd.right.slope < 0.0 {
            let root = sd.right.anchor - sd.right.value / sd.right.slope;
            if root < 1.0 {
                sd.zero_crossing = Some(root);
            }
        }
        sd.normalizer = sd.positive_mass()?;
        if !(sd.normalizer > DEGENERATE_MASS) {
            return Err(Error::Degenerate(format!(
                "positive part of the kernel estimate has mass {}",
                sd.normalizer
            )));
        }
        Ok(sd)
    }

    fn positive_mass(&self) -> Result<f64> {
        let h = self.h;
        let n = self.values.len() as f64;
        let interior = if self.sums.is_some() {
            // ∫_h^{1−h} f̌ = n⁻¹ Σ [K_cdf((1−h−Xᵢ)/h) − K_cdf((h−Xᵢ)/h)]
            self.values
                .iter()
                .map(|&x| self.kernel.cdf((1.0 - h - x) / h) - self.kernel.cdf((h - x) / h))
                .sum::<f64>()
                / n
        } else {
            // Split at the edges of every kernel support so each piece is smooth.
            let mut cuts = vec![h, 1.0 - h];
            cuts.extend(
                self.values
                    .iter()
                    .flat_map(|&x| [x - h, x + h])
                    .filter(|&c| c > h && c < 1.0 - h),
            );
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            integrate_partition(|t| self.raw(t, 0), &cuts, INTERIOR_TOLERANCE)?
        };
        let left = self.left.value * h - 0.5 * self.left.slope * h * h;
        let width = self.zero_crossing.unwrap_or(1.0) - self.right.anchor;
        let right = self.right.value * width + 0.5 * self.right.slope * width * width;
        Ok(interior + left + right)
    }

    /// `Σᵢ K^{(order)}((t − Xᵢ)/h)` over observations within `h` of `t`.
    fn kernel_sum(&self, t: f64, order: usize) -> f64 {
        let h = self.h;
        let lo = self.values.partition_point(|&x| x < t - h);
        let hi = self.values.partition_point(|&x| x <= t + h);
        if lo == hi {
            return 0.0;
        }
        match (&self.sums, self.kernel.polynomial_coefficients(order)) {
            (Some(sums), Some(coeffs)) => sums.sum(coeffs, t, lo, hi),
            _ => self.values[lo..hi]
                .iter()
                .map(|&x| self.kernel.derivative((t - x) / h, order))
                .sum(),
        }
    }

    /// Interior estimate or its derivative, without domain checks.
    fn raw(&self, t: f64, order: usize) -> f64 {
        let n = self.values.len() as f64;
        self.kernel_sum(t, order) / (n * self.h.powi(order as i32 + 1))
    }

    /// Boundary-extended `f̌`, without domain checks.
    pub(crate) fn extended(&self, t: f64) -> f64 {
        if t < self.h {
            self.left.at(t)
        } else if t > 1.0 - self.h {
            self.right.at(t)
        } else {
            self.raw(t, 0)
        }
    }

    /// Slope of the boundary-extended `f̌` (the clamped slope on the
    /// extensions), without domain checks.
    pub(crate) fn extended_slope(&self, t: f64) -> f64 {
        if t < self.h {
            self.left.slope
        } else if t > 1.0 - self.h {
            self.right.slope
        } else {
            self.raw(t, 1)
        }
    }

    /// `max(f̌(t), 0)`: the unnormalised target of the smoothed bootstrap.
    pub fn positive_part(&self, t: f64) -> f64 {
        if (0.0..=1.0).contains(&t) {
            self.extended(t).max(0.0)
        } else {
            0.0
        }
    }

    fn check_unit(t: f64) -> Result<()> {
        if (0.0..=1.0).contains(&t) {
            Ok(())
        } else {
            Err(Error::Domain {
                name: "t",
                value: t,
                domain: "[0, 1]",
            })
        }
    }

    fn check_interior(&self, t: f64) -> Result<()> {
        if t >= self.h - SEAM_SLACK && t <= 1.0 - self.h + SEAM_SLACK {
            Ok(())
        } else {
            Err(Error::Domain {
                name: "t",
                value: t,
                domain: "[h, 1 - h]; use extended_estimate near the boundary",
            })
        }
    }

    /// `f̌(t) = (nh)⁻¹ Σ K((t − Xᵢ)/h)` for `t ∈ [h, 1 − h]`.
    pub fn raw_estimate(&self, t: f64) -> Result<f64> {
        self.check_interior(t)?;
        Ok(self.raw(t, 0))
    }

    /// Interior derivative of order 1 or 2 (`K̇/h²`, `K̈/h³` sums).
    pub fn raw_derivative(&self, t: f64, order: usize) -> Result<f64> {
        check_order(order)?;
        self.check_interior(t)?;
        Ok(self.raw(t, order))
    }

    /// `f̌` with the linear boundary extensions, on `[0, 1]`.
    pub fn extended_estimate(&self, t: f64) -> Result<f64> {
        Self::check_unit(t)?;
        Ok(self.extended(t))
    }

    /// `f̃(t) = max(f̌(t), 0) / Z₊` on `[0, 1]`.
    pub fn normalized_estimate(&self, t: f64) -> Result<f64> {
        Self::check_unit(t)?;
        Ok(self.positive_part(t) / self.normalizer)
    }

    /// Derivative of `f̃` of order 1 or 2.
    ///
    /// On the extensions the first derivative is the clamped slope and the
    /// second is 0; where `f̌ < 0` (truncated) both are 0. Order 2 needs a
    /// kernel satisfying B1–B6.
    pub fn derivative_estimate(&self, t: f64, order: usize) -> Result<f64> {
        check_order(order)?;
        Self::check_unit(t)?;
        if order == 2 {
            self.kernel.require(KernelLevel::B6)?;
        }
        Ok(self.normalized_derivative(t, order))
    }

    fn normalized_derivative(&self, t: f64, order: usize) -> f64 {
        if self.extended(t) < 0.0 {
            return 0.0;
        }
        let in_extension = t < self.h || t > 1.0 - self.h;
        let d = match (order, in_extension) {
            (1, _) => self.extended_slope(t),
            (_, true) => 0.0,
            _ => self.raw(t, order),
        };
        d / self.normalizer
    }

    /// `Z₊ = ∫₀¹ max(f̌, 0)`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn sample_size(&self) -> usize {
        self.values.len()
    }

    /// Where the right extension reaches zero, if it does so before 1.
    pub fn zero_crossing(&self) -> Option<f64> {
        self.zero_crossing
    }

    /// `t,value,deriv1,deriv2` for `f̃ₙ` on `points` equispaced points of
    /// `[0, 1]`; `deriv2` is left empty for kernels without B5–B6.
    pub fn grid_csv(&self, points: usize) -> Result<String> {
        use std::fmt::Write as _;
        if points < 2 {
            return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
        }
        let curvature = self.kernel.require(KernelLevel::B6).is_ok();
        let mut out = String::from("t,value,deriv1,deriv2\n");
        let last = (points - 1) as f64;
        for i in 0..points {
            let t = i as f64 / last;
            let _ = write!(
                out,
                "{t},{},{},",
                self.value(t),
                self.normalized_derivative(t, 1)
            );
            if curvature {
                let _ = write!(out, "{}", self.normalized_derivative(t, 2));
            }
            out.push('\n');
        }
        Ok(out)
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 1 || order == 2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "derivative order must be 1 or 2, got {order}"
        )))
    }
}

/// Coefficients `p^{(j)}(a)/j!` by repeated synthetic division.
fn taylor_coefficients(coeffs: &[f64], a: f64) -> Vec<f64> {
    let mut work = coeffs.to_vec();
    let d = work.len();
    for j in 0..d {
        for k in (j..d - 1).rev() {
            work[k] += a * work[k + 1];
        }
    }
    work
}

impl Density for SmoothedDensity {
    fn value(&self, t: f64) -> f64 {
        self.positive_part(t) / self.normalizer
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = vec![self.h, 1.0 - self.h];
        b.extend(self.zero_crossing);
        b.retain(|&t| t > 0.0 && t < 1.0);
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

impl Differentiable for SmoothedDensity {
    fn derivative(&self, t: f64) -> f64 {
        if (0.0..=1.0).contains(&t) {
            self.normalized_derivative(t, 1)
        } else {
            0.0
        }
    }
}
