//! Bootstrap inference for monotone densities.
//!
//! Every procedure takes a parent [`RngStream`](crate::RngStream) and hands
//! replicate `b` its own substream, so parallel and serial runs produce the
//! same records.

mod band;
mod pointwise;

pub use band::{
    band_contains, default_supersample_size, l1_band, supersample_mu_hat, L1BandResult,
    MIN_BAND_REPLICATES, MIN_SUPERSAMPLE_RATIO,
};
pub use pointwise::{
    naive_bootstrap_deviations, smoothed_pointwise_ci, PointwiseCIResult, MIN_CI_REPLICATES,
};

use crate::error::{Error, Result};

/// Order statistic `k = ⌈pB⌉` of `values` (1-based).
///
/// ```
/// let v: Vec<f64> = (1..=100).map(f64::from).collect();
/// assert_eq!(grenboot::inference::empirical_quantile(&v, 0.95).unwrap(), 95.0);
/// assert_eq!(grenboot::inference::empirical_quantile(&v, 0.01).unwrap(), 1.0);
/// ```
pub fn empirical_quantile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    check_probability(p, "p")?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let b = sorted.len();
    // Guard against p·B landing a hair above an integer through rounding.
    let k = ((p * b as f64) - 1e-9).ceil().clamp(1.0, b as f64) as usize;
    Ok(sorted[k - 1])
}

pub(crate) fn check_probability(p: f64, name: &'static str) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value: p,
            domain: "(0, 1)",
        })
    }
}

pub(crate) fn check_open_unit(t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "t0",
            value: t,
            domain: "(0, 1)",
        })
    }
}

/// `index,value` rows under the given header.
pub(crate) fn replicate_csv(header: &str, values: &[f64]) -> String {
    use std::fmt::Write as _;
    let mut out = format!("replicate,{header}\n");
    for (b, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{b},{v}");
    }
    out
}
