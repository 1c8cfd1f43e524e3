use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::path::{chernoff_draw, check_boundary_rate, doubled_draw, simulate_path};
use crate::error::Result;
use crate::rng::RngStream;
use crate::stats::{
    ks_critical_two_sample, ks_two_sample, mean, std_dev, variance, variance_standard_error,
};

/// Level of the Kolmogorov–Smirnov comparisons in the report.
pub const KS_LEVEL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub delta: f64,
    pub half_width: f64,
    pub paths: usize,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            delta: 0.002,
            half_width: 3.0,
            paths: 20_000,
        }
    }
}

/// Single versus doubled-noise argmax draws.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub config: ScalingConfig,
    pub single_mean: f64,
    pub single_sd: f64,
    pub single_var: f64,
    pub doubled_var: f64,
    /// `Var(doubled)/Var(single)`; the limit law predicts `2^{2/3}`.
    pub variance_ratio: f64,
    pub variance_ratio_se: f64,
    pub target_ratio: f64,
    /// KS distance between `doubled/2^{1/3}` and the single draws.
    pub ks_scaled: f64,
    /// KS distance between the single draws and their negation.
    pub ks_symmetry: f64,
    pub ks_critical: f64,
    pub boundary_hits: usize,
    #[serde(skip)]
    pub single: Vec<f64>,
    #[serde(skip)]
    pub doubled: Vec<f64>,
}

impl ScalingReport {
    pub fn draws_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("replicate,single,doubled\n");
        for (i, (s, d)) in self.single.iter().zip(&self.doubled).enumerate() {
            let _ = writeln!(out, "{i},{s},{d}");
        }
        out
    }
}

/// Replicate `i` draws one single path and two doubled-noise paths from
/// `rng.substream(i)`, so the two samples are independent.
pub fn scaling_check(config: &ScalingConfig, rng: &RngStream) -> Result<ScalingReport> {
    let pairs = (0..config.paths as u64)
        .into_par_iter()
        .map(|i| {
            let r = rng.substream(i);
            let path = |j| simulate_path(config.delta, config.half_width, &mut r.substream(j));
            let single = chernoff_draw(&path(0)?);
            let doubled = doubled_draw(&path(1)?, &path(2)?)?;
            Ok((single, doubled))
        })
        .collect::<Result<Vec<_>>>()?;
    let hits = pairs
        .iter()
        .map(|(s, d)| s.boundary_hit as usize + d.boundary_hit as usize)
        .sum();
    check_boundary_rate(hits, 2 * pairs.len())?;

    let single: Vec<f64> = pairs.iter().map(|p| p.0.location).collect();
    let doubled: Vec<f64> = pairs.iter().map(|p| p.1.location).collect();
    let (vs, vd) = (variance(&single)?, variance(&doubled)?);
    let ratio = vd / vs;
    let rel_s = variance_standard_error(&single)? / vs;
    let rel_d = variance_standard_error(&doubled)? / vd;
    let cube_root_two = 2f64.cbrt();
    let scaled: Vec<f64> = doubled.iter().map(|d| d / cube_root_two).collect();
    let negated: Vec<f64> = single.iter().map(|s| -s).collect();
    let n = single.len();
    Ok(ScalingReport {
        config: *config,
        single_mean: mean(&single)?,
        single_sd: std_dev(&single)?,
        single_var: vs,
        doubled_var: vd,
        variance_ratio: ratio,
        variance_ratio_se: ratio * (rel_s * rel_s + rel_d * rel_d).sqrt(),
        target_ratio: cube_root_two * cube_root_two,
        ks_scaled: ks_two_sample(&scaled, &single)?,
        ks_symmetry: ks_two_sample(&single, &negated)?,
        ks_critical: ks_critical_two_sample(n, n, KS_LEVEL),
        boundary_hits: hits,
        single,
        doubled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_deterministic() {
        let c = ScalingConfig {
            delta: 0.01,
            half_width: 3.0,
            paths: 200,
        };
        let a = scaling_check(&c, &RngStream::new(1)).unwrap();
        assert_eq!(a, scaling_check(&c, &RngStream::new(1)).unwrap());
        assert_eq!(a.single.len(), 200);
        assert!(a.variance_ratio > 0.0 && a.variance_ratio_se > 0.0);
        assert!(a.draws_csv().starts_with("replicate,single,doubled\n0,"));
    }
}
