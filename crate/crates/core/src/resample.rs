//! Synthetic data, the naive bootstrap, subsampling and rejection sampling
//! from the smoothed estimate.

use rand::seq::index;
use rand::Rng;

use crate::analytic::AnalyticDensity;
use crate::error::{check_finite, Error, Result};
use crate::rng::RngStream;
use crate::sample::Sample;
use crate::smoother::SmoothedDensity;

/// Grid used to bound the smoothed estimate from above.
pub const ENVELOPE_GRID: usize = 4096;
/// Candidates drawn before the acceptance rate is checked.
pub const BURN_IN: u64 = 10_000;
/// Acceptance rates below this after the burn-in signal a broken envelope.
pub const MIN_ACCEPTANCE: f64 = 1e-4;

fn require_positive(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter("sample size must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `n` inverse-CDF transforms of uniforms on `(0, 1)`, sorted.
pub fn sample_from_analytic(g: &AnalyticDensity, n: usize, rng: &mut RngStream) -> Result<Sample> {
    require_positive(n)?;
    let values = (0..n)
        .map(|_| {
            let t = g.inverse_cdf(rng.open01());
            check_finite(t, "inverting the CDF")
        })
        .collect::<Result<Vec<_>>>()?;
    Sample::new(values)
}

/// `n` draws with replacement from the sample, sorted.
pub fn multinomial_bootstrap(sample: &Sample, rng: &mut RngStream) -> Sample {
    let v = sample.values();
    let draws = (0..v.len()).map(|_| v[rng.random_range(0..v.len())]).collect();
    Sample::from_generated(draws)
}

/// `m` observations at distinct positions, chosen uniformly, sorted.
pub fn subsample_without_replacement(
    sample: &Sample,
    m: usize,
    rng: &mut RngStream,
) -> Result<Sample> {
    let n = sample.len();
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!(
            "subsample size must lie in [1, {n}], got {m}"
        )));
    }
    let v = sample.values();
    let picks = index::sample(rng, n, m).into_iter().map(|i| v[i]).collect();
    Ok(Sample::from_generated(picks))
}

/// A non-negative function on `[0, 1]` known up to normalisation.
pub trait UnnormalizedTarget {
    fn target(&self, t: f64) -> f64;
}

impl UnnormalizedTarget for SmoothedDensity {
    fn target(&self, t: f64) -> f64 {
        self.positive_part(t)
    }
}

impl<F: Fn(f64) -> f64> UnnormalizedTarget for F {
    fn target(&self, t: f64) -> f64 {
        self(t)
    }
}

/// Upper bound on `max(f̌, 0)`: the grid maximum padded by the grid's
/// largest slope times the cell width.
pub fn envelope_bound(sd: &SmoothedDensity) -> Result<f64> {
    let cells = (ENVELOPE_GRID - 1) as f64;
    let mut peak: f64 = 0.0;
    let mut lipschitz: f64 = 0.0;
    for i in 0..ENVELOPE_GRID {
        let t = i as f64 / cells;
        let v = check_finite(sd.positive_part(t), "bounding the smoothed estimate")?;
        let d = check_finite(sd.extended_slope(t), "bounding the smoothed estimate")?;
        peak = peak.max(v);
        lipschitz = lipschitz.max(d.abs());
    }
    Ok(peak + lipschitz / cells)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectionStats {
    pub candidates: u64,
    pub accepted: u64,
}

impl RejectionStats {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.candidates as f64
    }
}

/// Uniform-proposal rejection sampler under a constant envelope.
#[derive(Debug, Clone)]
pub struct RejectionSampler<T> {
    target: T,
    envelope: f64,
}

impl<T: UnnormalizedTarget> RejectionSampler<T> {
    pub fn new(target: T, envelope: f64) -> Result<Self> {
        if !(envelope.is_finite() && envelope > 0.0) {
            return Err(Error::Envelope(format!(
                "envelope must be positive and finite, got {envelope}"
            )));
        }
        Ok(RejectionSampler { target, envelope })
    }

    pub fn envelope(&self) -> f64 {
        self.envelope
    }

    pub fn sample(&self, n: usize, rng: &mut RngStream) -> Result<Sample> {
        self.sample_with_stats(n, rng).map(|(s, _)| s)
    }

    pub fn sample_with_stats(
        &self,
        n: usize,
        rng: &mut RngStream,
    ) -> Result<(Sample, RejectionStats)> {
        require_positive(n)?;
        let mut accepted = Vec::with_capacity(n);
        let mut candidates: u64 = 0;
        while accepted.len() < n {
            let t = rng.open01();
            let u = rng.open01() * self.envelope;
            candidates += 1;
            let y = self.target.target(t);
            if !(y <= self.envelope) {
                return Err(Error::Envelope(format!(
                    "target {y} at t = {t} exceeds the envelope {}",
                    self.envelope
                )));
            }
            if u <= y {
                accepted.push(t);
            }
            if candidates == BURN_IN && (accepted.len() as f64 / BURN_IN as f64) < MIN_ACCEPTANCE {
                return Err(Error::Envelope(format!(
                    "accepted {} of {BURN_IN} candidates",
                    accepted.len()
                )));
            }
        }
        let stats = RejectionStats {
            candidates,
            accepted: n as u64,
        };
        Ok((Sample::from_generated(accepted), stats))
    }
}

impl<'a> RejectionSampler<&'a SmoothedDensity> {
    /// Sampler for `f̃ₙ` with the grid envelope of [`envelope_bound`].
    pub fn for_smoothed(sd: &'a SmoothedDensity) -> Result<Self> {
        RejectionSampler::new(sd, envelope_bound(sd)?)
    }
}

impl UnnormalizedTarget for &SmoothedDensity {
    fn target(&self, t: f64) -> f64 {
        self.positive_part(t)
    }
}

/// `n` draws from `f̃ₙ`, sorted.
pub fn rejection_sample(sd: &SmoothedDensity, n: usize, rng: &mut RngStream) -> Result<Sample> {
    RejectionSampler::for_smoothed(sd)?.sample(n, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Kernel;

    #[test]
    fn single_point_resample() {
        let s = Sample::new(vec![0.3]).unwrap();
        let mut rng = RngStream::new(1);
        assert_eq!(multinomial_bootstrap(&s, &mut rng).values(), &[0.3]);
    }

    #[test]
    fn bootstrap_draws_from_the_sample() {
        let s = Sample::new(vec![0.1, 0.2, 0.2, 0.9]).unwrap();
        let mut rng = RngStream::new(2);
        for _ in 0..50 {
            let b = multinomial_bootstrap(&s, &mut rng);
            assert_eq!(b.len(), 4);
            assert!(b.values().iter().all(|v| s.values().contains(v)));
        }
    }

    #[test]
    fn subsample_bounds() {
        let s = Sample::new(vec![0.4, 0.1, 0.7]).unwrap();
        let mut rng = RngStream::new(3);
        assert_eq!(subsample_without_replacement(&s, 3, &mut rng).unwrap(), s);
        assert!(subsample_without_replacement(&s, 0, &mut rng).is_err());
        assert!(subsample_without_replacement(&s, 4, &mut rng).is_err());
    }

    #[test]
    fn exact_and_slack_envelopes() {
        let mut rng = RngStream::new(4);
        let (_, stats) = RejectionSampler::new(|_: f64| 1.0, 1.0)
            .unwrap()
            .sample_with_stats(1000, &mut rng)
            .unwrap();
        assert_eq!(stats.candidates, 1000);

        let (_, stats) = RejectionSampler::new(|_: f64| 1.0, 2.0)
            .unwrap()
            .sample_with_stats(20_000, &mut rng)
            .unwrap();
        assert!((stats.acceptance_rate() - 0.5).abs() < 0.01);
    }

    #[test]
    fn broken_envelopes_are_reported() {
        let mut rng = RngStream::new(5);
        let low = RejectionSampler::new(|_: f64| 2.0, 1.0).unwrap();
        assert!(matches!(low.sample(10, &mut rng), Err(Error::Envelope(_))));
        let starved = RejectionSampler::new(|t: f64| if t < 1e-9 { 1.0 } else { 0.0 }, 1.0).unwrap();
        assert!(matches!(starved.sample(1, &mut rng), Err(Error::Envelope(_))));
        assert!(RejectionSampler::new(|_: f64| 1.0, 0.0).is_err());
    }

    #[test]
    fn single_point_envelope_covers_the_peak() {
        let s = Sample::new(vec![0.5]).unwrap();
        let sd = SmoothedDensity::with_bandwidth(&s, Kernel::epanechnikov(), 0.2).unwrap();
        assert!(envelope_bound(&sd).unwrap() >= 3.75);
    }

    #[test]
    fn analytic_draws_are_sorted_and_in_range() {
        let mut rng = RngStream::new(6);
        let s = sample_from_analytic(&AnalyticDensity::Triangular, 500, &mut rng).unwrap();
        assert!(s.values().windows(2).all(|w| w[0] <= w[1]));
        assert!(s.min() > 0.0 && s.max() < 1.0);
        assert!(sample_from_analytic(&AnalyticDensity::Uniform, 0, &mut rng).is_err());
    }
}
