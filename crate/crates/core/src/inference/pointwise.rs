use rayon::prelude::*;
use serde::Serialize;

use super::{check_open_unit, check_probability, empirical_quantile, replicate_csv};
use crate::bandwidth::{BandwidthRule, Regime};
use crate::density::Density;
use crate::error::{Error, Result};
use crate::kernel::{Kernel, KernelLevel};
use crate::resample::{multinomial_bootstrap, RejectionSampler};
use crate::rng::RngStream;
use crate::sample::Sample;
use crate::smoother::SmoothedDensity;
use crate::step::grenander_fit;

pub const MIN_CI_REPLICATES: usize = 20;

/// Smoothed-bootstrap interval for `f(t0)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointwiseCIResult {
    pub t0: f64,
    pub n: usize,
    /// `f̂ₙ(t0)`, the center of the interval.
    pub grenander_value: f64,
    /// `f̃ₙ(t0)`, the center of the bootstrap world.
    pub smoothed_value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Nominal coverage `1 − α`.
    pub level: f64,
    pub replicates: usize,
    pub bandwidth: f64,
    pub kernel: String,
    /// `n^{1/3}(f̃ₙ*(t0) − f̃ₙ(t0))`, one per replicate.
    #[serde(skip)]
    pub deviations: Vec<f64>,
}

impl PointwiseCIResult {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn deviations_csv(&self) -> String {
        replicate_csv("deviation", &self.deviations)
    }
}

/// Interval `[f̂ₙ(t0) − n^{−1/3} q_{1−α/2}, f̂ₙ(t0) − n^{−1/3} q_{α/2}]` from
/// the quantiles of smoothed-bootstrap deviations.
///
/// Replicate `b` draws `n` points from `f̃ₙ` with `rng.substream(b)`.
pub fn smoothed_pointwise_ci(
    sample: &Sample,
    t0: f64,
    alpha_level: f64,
    replicates: usize,
    kernel: &Kernel,
    rule: &BandwidthRule,
    rng: &RngStream,
) -> Result<PointwiseCIResult> {
    check_open_unit(t0)?;
    check_probability(alpha_level, "alpha_level")?;
    if rule.regime != Regime::Pointwise {
        return Err(Error::InvalidParameter(
            "pointwise intervals need a pointwise-regime bandwidth".into(),
        ));
    }
    BandwidthRule::new(rule.alpha, rule.scale, Regime::Pointwise)?;
    if replicates < MIN_CI_REPLICATES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_CI_REPLICATES} bootstrap replicates, got {replicates}"
        )));
    }
    kernel.require(KernelLevel::B4)?;

    let n = sample.len();
    let scale = (n as f64).cbrt();
    let grenander = grenander_fit(sample)?;
    let smoothed = SmoothedDensity::fit(sample, kernel.clone(), rule)?;
    let center = smoothed.value(t0);
    let sampler = RejectionSampler::for_smoothed(&smoothed)?;

    let deviations = (0..replicates as u64)
        .into_par_iter()
        .map(|b| {
            let draw = sampler.sample(n, &mut rng.substream(b))?;
            Ok(scale * (grenander_fit(&draw)?.value(t0) - center))
        })
        .collect::<Result<Vec<f64>>>()?;

    let q_hi = empirical_quantile(&deviations, 1.0 - alpha_level / 2.0)?;
    let q_lo = empirical_quantile(&deviations, alpha_level / 2.0)?;
    let g = grenander.value(t0);
    Ok(PointwiseCIResult {
        t0,
        n,
        grenander_value: g,
        smoothed_value: center,
        lower: g - q_hi / scale,
        upper: g - q_lo / scale,
        level: 1.0 - alpha_level,
        replicates,
        bandwidth: smoothed.bandwidth(),
        kernel: kernel.name().to_string(),
        deviations,
    })
}

/// `n^{1/3}(f̂ₙ*(t0) − f̂ₙ(t0))` over `replicates` multinomial resamples.
pub fn naive_bootstrap_deviations(
    sample: &Sample,
    t0: f64,
    replicates: usize,
    rng: &RngStream,
) -> Result<Vec<f64>> {
    check_open_unit(t0)?;
    let scale = (sample.len() as f64).cbrt();
    let center = grenander_fit(sample)?.value(t0);
    (0..replicates as u64)
        .into_par_iter()
        .map(|b| {
            let draw = multinomial_bootstrap(sample, &mut rng.substream(b));
            Ok(scale * (grenander_fit(&draw)?.value(t0) - center))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::AnalyticDensity;
    use crate::resample::sample_from_analytic;
    use crate::stats::median;

    fn data(n: usize, seed: u64) -> Sample {
        sample_from_analytic(&AnalyticDensity::Triangular, n, &mut RngStream::new(seed)).unwrap()
    }

    #[test]
    fn interval_brackets_the_median_pivot() {
        let s = data(300, 1);
        let rule = BandwidthRule::default_for(Regime::Pointwise);
        let ci = smoothed_pointwise_ci(&s, 0.5, 0.1, 100, &Kernel::biweight(), &rule, &RngStream::new(2))
            .unwrap();
        assert!(ci.lower <= ci.upper);
        assert_eq!(ci.deviations.len(), 100);
        let pivot = ci.grenander_value - median(&ci.deviations).unwrap() / 300f64.cbrt();
        assert!(ci.lower <= pivot && pivot <= ci.upper);
    }

    #[test]
    fn reproducible_per_seed() {
        let s = data(100, 3);
        let rule = BandwidthRule::default_for(Regime::Pointwise);
        let run = |seed| {
            smoothed_pointwise_ci(&s, 0.3, 0.1, 20, &Kernel::epanechnikov(), &rule, &RngStream::new(seed))
                .unwrap()
        };
        assert_eq!(run(9), run(9));
        assert_ne!(run(9).deviations, run(10).deviations);
    }

    #[test]
    fn parameter_gates() {
        let s = data(50, 4);
        let k = Kernel::biweight();
        let rng = RngStream::new(0);
        let rule = BandwidthRule::default_for(Regime::Pointwise);
        assert!(smoothed_pointwise_ci(&s, 0.5, 0.1, 19, &k, &rule, &rng).is_err());
        assert!(smoothed_pointwise_ci(&s, 0.0, 0.1, 20, &k, &rule, &rng).is_err());
        assert!(smoothed_pointwise_ci(&s, 0.5, 1.0, 20, &k, &rule, &rng).is_err());
        let l1 = BandwidthRule::default_for(Regime::L1);
        assert!(smoothed_pointwise_ci(&s, 0.5, 0.1, 20, &k, &l1, &rng).is_err());
    }

    #[test]
    fn naive_deviations_vanish_for_one_point() {
        let s = Sample::new(vec![0.4]).unwrap();
        let d = naive_bootstrap_deviations(&s, 0.5, 10, &RngStream::new(1)).unwrap();
        assert_eq!(d, vec![0.0; 10]);
        let s = data(200, 5);
        let a = naive_bootstrap_deviations(&s, 0.5, 10, &RngStream::new(1)).unwrap();
        assert_eq!(a, naive_bootstrap_deviations(&s, 0.5, 10, &RngStream::new(1)).unwrap());
        assert_ne!(a, naive_bootstrap_deviations(&s, 0.5, 10, &RngStream::new(2)).unwrap());
    }
}
