//! Distances between densities and the analytic constants of the limit theory.

use crate::density::{Density, Differentiable, LinearPiece};
use crate::error::{check_finite, Error, Result};
use crate::quadrature::{adaptive_simpson, partition, DEFAULT_MAX_DEPTH};

/// Absolute tolerance for quadrature-based L1 distances and shape integrals.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

/// `∫₀¹ |a − b|`.
///
/// Exact when both sides are piecewise linear; otherwise adaptive Simpson on
/// the merged breakpoint partition, with one-sided evaluation at each piece's
/// left end.
pub fn l1_distance<A: Density + ?Sized, B: Density + ?Sized>(a: &A, b: &B) -> Result<f64> {
    if let (Some(pa), Some(pb)) = (a.linear_pieces(), b.linear_pieces()) {
        return l1_linear(&pa, &pb);
    }
    let points = partition(
        0.0,
        1.0,
        a.breakpoints().into_iter().chain(b.breakpoints()),
    );
    let mut total = 0.0;
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let share = QUADRATURE_TOLERANCE * (hi - lo);
        let gap = |t: f64| {
            if t == lo {
                (a.value_right(t) - b.value_right(t)).abs()
            } else {
                (a.value(t) - b.value(t)).abs()
            }
        };
        total += adaptive_simpson(gap, lo, hi, share, DEFAULT_MAX_DEPTH)?;
    }
    Ok(total)
}

fn piece_at(pieces: &[LinearPiece], t: f64) -> &LinearPiece {
    let j = pieces.partition_point(|p| p.end < t);
    &pieces[j.min(pieces.len() - 1)]
}

fn l1_linear(a: &[LinearPiece], b: &[LinearPiece]) -> Result<f64> {
    let points = partition(
        0.0,
        1.0,
        a.iter().chain(b).flat_map(|p| [p.start, p.end]),
    );
    let mut total = 0.0;
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let (pa, pb) = (piece_at(a, mid), piece_at(b, mid));
        let d0 = check_finite(pa.at(lo) - pb.at(lo), "evaluating an L1 integrand")?;
        let d1 = check_finite(pa.at(hi) - pb.at(hi), "evaluating an L1 integrand")?;
        let width = hi - lo;
        total += if d0 * d1 >= 0.0 {
            0.5 * (d0.abs() + d1.abs()) * width
        } else {
            let root = width * d0 / (d0 - d1);
            0.5 * (d0.abs() * root + d1.abs() * (width - root))
        };
    }
    Ok(total)
}

/// Maximum of `|a − b|` over a uniform grid of `grid_size` points together
/// with every breakpoint of either side, probed from the left and the right.
pub fn sup_distance<A: Density + ?Sized, B: Density + ?Sized>(
    a: &A,
    b: &B,
    grid_size: usize,
) -> Result<f64> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter("grid_size must be at least 2".into()));
    }
    let last = (grid_size - 1) as f64;
    let grid = (0..grid_size).map(|i| i as f64 / last);
    let kinks: Vec<f64> = a
        .breakpoints()
        .into_iter()
        .chain(b.breakpoints())
        .filter(|t| (0.0..=1.0).contains(t))
        .collect();

    let mut best: f64 = 0.0;
    for t in grid.chain(kinks.iter().copied()) {
        let left = check_finite((a.value(t) - b.value(t)).abs(), "evaluating a sup distance")?;
        best = best.max(left);
        if t < 1.0 {
            let right = check_finite(
                (a.value_right(t) - b.value_right(t)).abs(),
                "evaluating a sup distance",
            )?;
            best = best.max(right);
        }
    }
    Ok(best)
}

/// Local scale `|4 ġ(t) g(t)|^{1/3}` of the pointwise limit at `t ∈ (0, 1)`.
///
/// Returns 0 where the derivative vanishes, which is exactly where the
/// cube-root asymptotics break down.
pub fn rate_constant_c<G: Differentiable + ?Sized>(g: &G, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain {
            name: "t",
            value: t,
            domain: "(0, 1)",
        });
    }
    check_finite(
        (4.0 * g.derivative(t) * g.value(t)).abs().cbrt(),
        "evaluating the rate constant",
    )
}

/// `∫₀¹ |½ ġ(t) g(t)|^{1/3} dt`, the density-dependent factor of the L1
/// centering constant.
pub fn mu_shape_integral<G: Differentiable + ?Sized>(g: &G) -> Result<f64> {
    let points = partition(0.0, 1.0, g.breakpoints());
    let mut total = 0.0;
    for w in points.windows(2) {
        let share = QUADRATURE_TOLERANCE * (w[1] - w[0]);
        total += adaptive_simpson(
            |t| (0.5 * g.derivative(t) * g.value(t)).abs().cbrt(),
            w[0],
            w[1],
            share,
            DEFAULT_MAX_DEPTH,
        )?;
    }
    Ok(total)
}
