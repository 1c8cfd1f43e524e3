//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

pub const DEFAULT_MAX_DEPTH: u32 = 30;

/// Levels always subdivided before the error test is trusted, so narrow
/// features are not missed by the first five samples.
const MIN_DEPTH: u32 = 3;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Subdivision stops at `max_depth`; the estimate at that depth is accepted.
/// Any non-finite evaluation is an error.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut eval = |t: f64| -> Result<f64> {
        let v = f(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("integrating at t = {t}")))
        }
    };
    let fa = eval(a)?;
    let fb = eval(b)?;
    let m = 0.5 * (a + b);
    let fm = eval(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(&mut eval, [a, m, b], [fa, fm, fb], whole, tol, 0, max_depth)
}

fn step<F: FnMut(f64) -> Result<f64>>(
    f: &mut F,
    [a, m, b]: [f64; 3],
    [fa, fm, fb]: [f64; 3],
    whole: f64,
    tol: f64,
    depth: u32,
    max_depth: u32,
) -> Result<f64> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth >= max_depth || (depth >= MIN_DEPTH && delta.abs() <= 15.0 * tol) {
        return Ok(left + right + delta / 15.0);
    }
    Ok(step(f, [a, lm, m], [fa, flm, fm], left, 0.5 * tol, depth + 1, max_depth)?
        + step(f, [m, rm, b], [fm, frm, fb], right, 0.5 * tol, depth + 1, max_depth)?)
}

/// Integrates over consecutive intervals of the sorted `points`, sharing
/// `tol` in proportion to interval length.
pub fn integrate_partition<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    tol: f64,
) -> Result<f64> {
    let (Some(&first), Some(&last)) = (points.first(), points.last()) else {
        return Ok(0.0);
    };
    let span = last - first;
    let mut total = 0.0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            let share = tol * (w[1] - w[0]) / span;
            total += adaptive_simpson(&mut f, w[0], w[1], share, DEFAULT_MAX_DEPTH)?;
        }
    }
    Ok(total)
}

/// Sorted, deduplicated `[a, b]` plus the interior points of `extra`.
pub(crate) fn partition(a: f64, b: f64, extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts: Vec<f64> = std::iter::once(a)
        .chain(extra.into_iter().filter(|&t| t > a && t < b))
        .chain(std::iter::once(b))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12, 30).unwrap();
        assert!((v - 0.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_function() {
        let v = adaptive_simpson(f64::sin, 0.0, std::f64::consts::PI, 1e-10, 30).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn kink_and_endpoint_singularity() {
        let v = adaptive_simpson(|x| (x - 0.3).abs(), 0.0, 1.0, 1e-10, 30).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-9);
        // ∫ (1 − t)^{1/3} = 3/4
        let v = adaptive_simpson(|x| (1.0 - x).cbrt(), 0.0, 1.0, 1e-8, 30).unwrap();
        assert!((v - 0.75).abs() < 1e-7);
    }

    #[test]
    fn non_finite_is_an_error() {
        assert!(adaptive_simpson(|x| 1.0 / (x - 0.5), 0.0, 1.0, 1e-8, 30).is_err());
    }

    #[test]
    fn partitioned_step() {
        let pts = partition(0.0, 1.0, [0.25, 0.75, 2.0]);
        assert_eq!(pts, vec![0.0, 0.25, 0.75, 1.0]);
        let f = |t: f64| (t - 0.25).abs() + (t - 0.75).abs();
        let v = integrate_partition(f, &pts, 1e-12).unwrap();
        assert!((v - 0.625).abs() < 1e-12);
    }
}
