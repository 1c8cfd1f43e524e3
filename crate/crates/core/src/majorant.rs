//! Least concave majorant of the empirical distribution function.

use crate::error::{Error, Result};
use crate::sample::EmpiricalCdf;

/// Vertices of the least concave majorant, from `(0, 0)` to `(1, 1)`.
///
/// Abscissae are strictly increasing and chord slopes strictly decreasing.
/// Every vertex other than the origin is a point of the ECDF graph (or the
/// terminal point `(1, 1)`).
#[derive(Debug, Clone, PartialEq)]
pub struct ConcaveMajorant {
    vertices: Vec<(f64, f64)>,
}

impl ConcaveMajorant {
    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Successive chord slopes, one per segment.
    pub fn slopes(&self) -> Vec<f64> {
        self.vertices
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect()
    }

    /// Linear interpolation between vertices; clamped outside `[0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        let j = self.vertices.partition_point(|&(x, _)| x < t);
        let (x1, y1) = self.vertices[j];
        if x1 == t {
            return y1;
        }
        let (x0, y0) = self.vertices[j - 1];
        y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    }
}

/// Upper concave hull of `{(0,0)} ∪ {(X_(i), i/n)} ∪ {(1,1)}` by a single
/// monotone-stack sweep over the sorted jump points.
///
/// Observations exactly at 0 are rejected: they would force a vertical
/// majorant at the origin (an infinite density spike).
pub fn least_concave_majorant(cdf: &EmpiricalCdf) -> Result<ConcaveMajorant> {
    let locations = cdf.locations();
    if locations.first() == Some(&0.0) {
        return Err(Error::InvalidSample(
            "an observation at 0 makes the least concave majorant vertical at the origin".into(),
        ));
    }
    let n = cdf.n();

    // Heights are kept as integer counts so collinearity tests are exact in y.
    let mut hull: Vec<(f64, usize)> = Vec::with_capacity(locations.len() + 2);
    hull.push((0.0, 0));
    let tail = (locations.last() != Some(&1.0)).then_some((1.0, n));
    let points = locations
        .iter()
        .copied()
        .zip(cdf.cumulative_counts().iter().copied())
        .chain(tail);
    for p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // b is dropped when it lies on or below the chord a -> p.
            let cross = (b.0 - a.0) * (p.1 - a.1) as f64 - (b.1 - a.1) as f64 * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }

    let vertices = hull
        .into_iter()
        .map(|(x, c)| (x, c as f64 / n as f64))
        .collect();
    Ok(ConcaveMajorant { vertices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Sample;

    fn lcm(values: &[f64]) -> ConcaveMajorant {
        least_concave_majorant(&Sample::new(values.to_vec()).unwrap().ecdf()).unwrap()
    }

    #[test]
    fn already_concave_keeps_every_point() {
        let m = lcm(&[0.25, 0.75]);
        assert_eq!(
            m.vertices(),
            &[(0.0, 0.0), (0.25, 0.5), (0.75, 1.0), (1.0, 1.0)]
        );
        assert_eq!(m.slopes(), vec![2.0, 1.0, 0.0]);
    }

    #[test]
    fn drops_point_under_chord() {
        let m = lcm(&[0.5, 0.6]);
        assert_eq!(m.vertices(), &[(0.0, 0.0), (0.6, 1.0), (1.0, 1.0)]);
    }

    #[test]
    fn single_point() {
        let m = lcm(&[0.3]);
        assert_eq!(m.vertices(), &[(0.0, 0.0), (0.3, 1.0), (1.0, 1.0)]);
    }

    #[test]
    fn observation_at_one_does_not_duplicate_the_end() {
        // (0.5, 0.5) is collinear with the endpoints and is not a vertex.
        let m = lcm(&[0.5, 1.0]);
        assert_eq!(m.vertices(), &[(0.0, 0.0), (1.0, 1.0)]);
        let m = lcm(&[0.25, 1.0]);
        assert_eq!(m.vertices(), &[(0.0, 0.0), (0.25, 0.5), (1.0, 1.0)]);
    }

    #[test]
    fn zero_observation_is_rejected() {
        let cdf = Sample::new(vec![0.0, 0.5]).unwrap().ecdf();
        assert!(least_concave_majorant(&cdf).is_err());
    }

    #[test]
    fn eval_interpolates() {
        let m = lcm(&[0.25, 0.75]);
        assert_eq!(m.eval(0.125), 0.25);
        assert_eq!(m.eval(0.5), 0.75);
        assert_eq!(m.eval(0.9), 1.0);
    }
}
