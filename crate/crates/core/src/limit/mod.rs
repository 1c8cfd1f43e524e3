//! Monte Carlo for the limit laws: Chernoff's distribution
//! `ℂ = argmax_h {Z(h) − h²}`, its doubled-noise variant, the stationary
//! process `ξ(t) = argmax_h {Z(t + h) − Z(t) − h²}` and the constants
//! `E|ξ(0)|`, `Var(ℂ)` and `σ² = 8 ∫₀^∞ cov(|ξ(0)|, |ξ(x)|) dx`.
//!
//! Argmaxes are taken over a grid of step `δ`; ties go to the leftmost
//! point.

mod constants;
mod path;
mod scaling;

pub use constants::{
    estimate_constants, mu_of_density, CovariancePoint, LimitConfig, LimitConstants,
};
pub use path::{
    chernoff_batch, chernoff_draw, check_boundary_rate, doubled_draw, simulate_path, xi_values,
    Argmax, PathGrid, MAX_BOUNDARY_RATE,
};
pub use scaling::{scaling_check, ScalingConfig, ScalingReport, KS_LEVEL};
