//! Monotone density estimation on `[0, 1]` and bootstrap inference for it.
//!
//! The crate covers the Grenander estimator (left derivative of the least
//! concave majorant of the empirical CDF), a boundary-corrected kernel
//! smoother, the smoothed bootstrap for pointwise intervals and L1 bands,
//! and Monte Carlo for the Chernoff-type limits that calibrate them.
//!
//! ```
//! use grenboot::{grenander_fit, Sample};
//!
//! let sample = Sample::new(vec![0.25, 0.75]).unwrap();
//! let fit = grenander_fit(&sample).unwrap();
//! assert_eq!(fit.heights(), &[2.0, 1.0, 0.0]);
//! ```

pub mod analytic;
pub mod bandwidth;
pub mod density;
pub mod distance;
pub mod error;
pub mod experiment;
pub mod inference;
pub mod kernel;
pub mod limit;
pub mod majorant;
pub mod quadrature;
pub mod resample;
pub mod rng;
pub mod sample;
pub mod smoother;
pub mod stats;
pub mod step;

pub use analytic::AnalyticDensity;
pub use bandwidth::{BandwidthRule, Regime};
pub use density::{Density, Differentiable, LinearPiece};
pub use distance::{l1_distance, mu_shape_integral, rate_constant_c, sup_distance};
pub use error::{Error, Result};
pub use kernel::{check_kernel_conditions, Kernel, KernelFns, KernelLevel, KernelReport};
pub use majorant::{least_concave_majorant, ConcaveMajorant};
pub use resample::{
    envelope_bound, multinomial_bootstrap, rejection_sample, sample_from_analytic,
    subsample_without_replacement, RejectionSampler, UnnormalizedTarget,
};
pub use rng::RngStream;
pub use sample::{empirical_cdf, EmpiricalCdf, Sample};
pub use smoother::SmoothedDensity;
pub use step::{grenander_fit, StepDensity};
