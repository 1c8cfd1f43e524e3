use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Largest tolerated fraction of draws whose argmax sits on the window edge.
pub const MAX_BOUNDARY_RATE: f64 = 1e-3;

/// Two-sided Brownian motion sampled on `{−kδ, …, 0, …, kδ}` with `Z(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGrid {
    delta: f64,
    cells: usize,
    values: Vec<f64>,
}

impl PathGrid {
    /// Wraps explicit grid values; `values[cells]` must be 0. Useful for
    /// deterministic test paths.
    pub fn from_values(delta: f64, values: Vec<f64>) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Domain {
                name: "delta",
                value: delta,
                domain: "(0, ∞)",
            });
        }
        if values.len() % 2 == 0 || values.len() < 3 {
            return Err(Error::InvalidParameter(
                "a path grid needs an odd number (≥ 3) of values".into(),
            ));
        }
        let cells = values.len() / 2;
        if values[cells] != 0.0 {
            return Err(Error::InvalidParameter("the path must vanish at 0".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("building a path grid".into()));
        }
        Ok(PathGrid {
            delta,
            cells,
            values,
        })
    }

    /// The path `Z ≡ 0` on `[−L, L]`.
    pub fn zero(delta: f64, half_width: f64) -> Result<Self> {
        let cells = cells_for(delta, half_width)?;
        Self::from_values(delta, vec![0.0; 2 * cells + 1])
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Grid points on each side of 0.
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn half_width(&self) -> f64 {
        self.cells as f64 * self.delta
    }

    /// `Z` at grid offset `i ∈ [−k, k]`.
    pub fn at(&self, i: isize) -> f64 {
        self.values[(self.cells as isize + i) as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `h ↦ Z(−h)`.
    pub fn reflected(&self) -> PathGrid {
        let mut values = self.values.clone();
        values.reverse();
        PathGrid { values, ..*self }
    }
}

fn cells_for(delta: f64, half_width: f64) -> Result<usize> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain {
            name: "delta",
            value: delta,
            domain: "(0, ∞)",
        });
    }
    if !(half_width >= delta && half_width.is_finite()) {
        return Err(Error::Domain {
            name: "half_width",
            value: half_width,
            domain: "[delta, ∞)",
        });
    }
    Ok((half_width / delta).round() as usize)
}

/// Gaussian increments of variance `δ`, summed outward from 0 on each side.
pub fn simulate_path(delta: f64, half_width: f64, rng: &mut RngStream) -> Result<PathGrid> {
    let cells = cells_for(delta, half_width)?;
    let sd = delta.sqrt();
    let mut values = vec![0.0; 2 * cells + 1];
    let mut z = 0.0;
    for v in &mut values[cells + 1..] {
        z += sd * rng.standard_normal();
        *v = z;
    }
    z = 0.0;
    for v in values[..cells].iter_mut().rev() {
        z += sd * rng.standard_normal();
        *v = z;
    }
    Ok(PathGrid {
        delta,
        cells,
        values,
    })
}

/// A grid maximizer and whether it fell on the edge of the search window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Argmax {
    pub location: f64,
    pub boundary_hit: bool,
}

/// Leftmost maximizer of `value(d) − (dδ)²` over offsets `d ∈ [−w, w]`.
fn parabolic_argmax(delta: f64, w: isize, value: impl Fn(isize) -> f64) -> Argmax {
    let mut best_d = -w;
    let mut best = f64::NEG_INFINITY;
    for d in -w..=w {
        let h = d as f64 * delta;
        let v = value(d) - h * h;
        if v > best {
            best = v;
            best_d = d;
        }
    }
    Argmax {
        location: best_d as f64 * delta,
        boundary_hit: best_d.abs() == w,
    }
}

/// `argmax_h {Z(h) − h²}` over the whole grid.
pub fn chernoff_draw(path: &PathGrid) -> Argmax {
    parabolic_argmax(path.delta, path.cells as isize, |d| path.at(d))
}

/// `argmax_h {Z₁(h) + Z₂(h) − h²}`, equal in law to `2^{1/3}ℂ`.
pub fn doubled_draw(path1: &PathGrid, path2: &PathGrid) -> Result<Argmax> {
    if path1.delta != path2.delta || path1.cells != path2.cells {
        return Err(Error::InvalidParameter(
            "doubled draws need paths on the same grid".into(),
        ));
    }
    Ok(parabolic_argmax(path1.delta, path1.cells as isize, |d| {
        path1.at(d) + path2.at(d)
    }))
}

/// `ξ(t) = argmax_{|h| ≤ W} {Z(t + h) − Z(t) − h²}` for each `t`, with `t`
/// and `W` snapped to the grid.
pub fn xi_values(path: &PathGrid, t_grid: &[f64], window: f64) -> Result<Vec<Argmax>> {
    let w = cells_for(path.delta, window)? as isize;
    let k = path.cells as isize;
    t_grid
        .iter()
        .map(|&t| {
            let i = (t / path.delta).round() as isize;
            if i.abs() + w > k {
                return Err(Error::InvalidParameter(format!(
                    "window [{t} − {window}, {t} + {window}] leaves the path's range ±{}",
                    path.half_width()
                )));
            }
            let base = path.at(i);
            Ok(parabolic_argmax(path.delta, w, |d| path.at(i + d) - base))
        })
        .collect()
}

/// Errors when more than [`MAX_BOUNDARY_RATE`] of `draws` hit the edge.
pub fn check_boundary_rate(hits: usize, draws: usize) -> Result<()> {
    if hits as f64 > MAX_BOUNDARY_RATE * draws as f64 {
        Err(Error::WindowTooSmall { hits, draws })
    } else {
        Ok(())
    }
}

/// `count` Chernoff draws on independent paths; draw `i` uses
/// `rng.substream(i)`.
pub fn chernoff_batch(
    count: usize,
    delta: f64,
    half_width: f64,
    rng: &RngStream,
) -> Result<Vec<f64>> {
    let draws = (0..count as u64)
        .into_par_iter()
        .map(|i| simulate_path(delta, half_width, &mut rng.substream(i)).map(|p| chernoff_draw(&p)))
        .collect::<Result<Vec<Argmax>>>()?;
    check_boundary_rate(draws.iter().filter(|a| a.boundary_hit).count(), count)?;
    Ok(draws.into_iter().map(|a| a.location).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_path_peaks_at_origin() {
        let z = PathGrid::zero(0.01, 1.0).unwrap();
        assert_eq!(chernoff_draw(&z).location, 0.0);
        let mut rng = RngStream::new(1);
        let p = simulate_path(0.01, 3.0, &mut rng).unwrap();
        assert_eq!(doubled_draw(&p, &PathGrid::zero(0.01, 3.0).unwrap()).unwrap(), chernoff_draw(&p));
    }

    #[test]
    fn path_is_pinned_at_zero() {
        let mut rng = RngStream::new(2);
        let p = simulate_path(0.01, 2.0, &mut rng).unwrap();
        assert_eq!(p.at(0), 0.0);
        assert_eq!(p.cells(), 200);
        assert_eq!(p.values().len(), 401);
    }

    #[test]
    fn reflection_negates_argmax() {
        let mut rng = RngStream::new(3);
        for _ in 0..20 {
            let p = simulate_path(0.01, 3.0, &mut rng).unwrap();
            assert_eq!(chernoff_draw(&p.reflected()).location, -chernoff_draw(&p).location);
        }
    }

    #[test]
    fn ties_break_left() {
        // Z(−δ) − δ² = Z(δ) − δ² = 1 beats Z(0) = 0.
        let p = PathGrid::from_values(1.0, vec![0.0, 2.0, 0.0, 2.0, 0.0]).unwrap();
        assert_eq!(chernoff_draw(&p).location, -1.0);
    }

    #[test]
    fn xi_at_origin_is_the_chernoff_draw() {
        let mut rng = RngStream::new(4);
        let p = simulate_path(0.01, 3.0, &mut rng).unwrap();
        let xi = xi_values(&p, &[0.0], 3.0).unwrap();
        assert_eq!(xi[0], chernoff_draw(&p));
        assert!(xi_values(&p, &[0.5], 3.0).is_err());
        assert_eq!(xi_values(&p, &[0.5, -0.5], 2.5).unwrap().len(), 2);
    }

    #[test]
    fn boundary_rate_gate() {
        assert!(check_boundary_rate(1, 1000).is_ok());
        assert!(check_boundary_rate(2, 1000).is_err());
        let p = PathGrid::from_values(1.0, vec![0.0, 0.0, 0.0, 0.0, 9.0]).unwrap();
        assert!(chernoff_draw(&p).boundary_hit);
    }

    #[test]
    fn mismatched_grids() {
        let a = PathGrid::zero(0.01, 1.0).unwrap();
        let b = PathGrid::zero(0.01, 2.0).unwrap();
        assert!(doubled_draw(&a, &b).is_err());
        assert!(PathGrid::from_values(0.1, vec![0.0, 1.0, 0.0]).is_err());
    }
}
