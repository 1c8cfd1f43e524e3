//! Piecewise-constant non-increasing densities and the Grenander estimator.

use std::fmt::Write as _;

use crate::density::{Density, LinearPiece};
use crate::error::{Error, Result};
use crate::majorant::least_concave_majorant;
use crate::sample::Sample;

/// A non-increasing step density on `[0, 1]`.
///
/// Height `heights[j]` applies on `(breakpoints[j], breakpoints[j + 1]]`;
/// the value at 0 is the first height.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDensity {
    breakpoints: Vec<f64>,
    heights: Vec<f64>,
}

const MASS_TOLERANCE: f64 = 1e-12;

impl StepDensity {
    /// Validates monotonicity, the partition of `[0, 1]` and unit mass.
    pub fn new(breakpoints: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        if heights.is_empty() || breakpoints.len() != heights.len() + 1 {
            return Err(Error::InvalidParameter(
                "need one more breakpoint than heights".into(),
            ));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::InvalidParameter("breakpoints must run from 0 to 1".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if heights.iter().any(|h| !h.is_finite() || *h < 0.0) {
            return Err(Error::InvalidParameter("heights must be finite and >= 0".into()));
        }
        if heights.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter("heights must be non-increasing".into()));
        }
        let step = StepDensity {
            breakpoints,
            heights,
        };
        let mass = step.mass();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidParameter(format!("total mass {mass} is not 1")));
        }
        Ok(step)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn steps(&self) -> usize {
        self.heights.len()
    }

    /// `Σ f_j (t_j − t_{j−1})`.
    pub fn mass(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(&self.heights)
            .map(|(w, f)| f * (w[1] - w[0]))
            .sum()
    }

    /// `breakpoint,height` rows, one per step, keyed by the step's right end.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("breakpoint,height\n");
        for (t, f) in self.breakpoints[1..].iter().zip(&self.heights) {
            writeln!(out, "{t},{f}").unwrap();
        }
        out
    }
}

impl Density for StepDensity {
    fn value(&self, t: f64) -> f64 {
        if !(0.0..=1.0).contains(&t) {
            return 0.0;
        }
        // first j with breakpoints[j + 1] >= t
        let j = self.breakpoints[1..].partition_point(|&b| b < t);
        self.heights[j.min(self.heights.len() - 1)]
    }

    fn value_right(&self, t: f64) -> f64 {
        if !(0.0..1.0).contains(&t) {
            return 0.0;
        }
        let j = self.breakpoints[1..].partition_point(|&b| b <= t);
        self.heights[j.min(self.heights.len() - 1)]
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints[1..self.breakpoints.len() - 1].to_vec()
    }

    fn linear_pieces(&self) -> Option<Vec<LinearPiece>> {
        Some(
            self.breakpoints
                .windows(2)
                .zip(&self.heights)
                .map(|(w, &f)| LinearPiece {
                    start: w[0],
                    end: w[1],
                    value: f,
                    slope: 0.0,
                })
                .collect(),
        )
    }
}

/// The Grenander estimator: left derivative of the least concave majorant of
/// the empirical CDF.
pub fn grenander_fit(sample: &Sample) -> Result<StepDensity> {
    let majorant = least_concave_majorant(&sample.ecdf())?;
    let vertices = majorant.vertices();
    let breakpoints = vertices.iter().map(|v| v.0).collect();
    let heights = majorant.slopes();
    Ok(StepDensity {
        breakpoints,
        heights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(values: &[f64]) -> StepDensity {
        grenander_fit(&Sample::new(values.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn two_points() {
        let f = fit(&[0.25, 0.75]);
        assert_eq!(f.breakpoints(), &[0.0, 0.25, 0.75, 1.0]);
        assert_eq!(f.heights(), &[2.0, 1.0, 0.0]);
        assert_eq!(f.value(0.0), 2.0);
        assert_eq!(f.value(0.25), 2.0);
        assert_eq!(f.value_right(0.25), 1.0);
        assert_eq!(f.value(1.0), 0.0);
    }

    #[test]
    fn pooled_pair() {
        let f = fit(&[0.5, 0.6]);
        assert_eq!(f.breakpoints(), &[0.0, 0.6, 1.0]);
        assert!((f.heights()[0] - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(f.heights()[1], 0.0);
    }

    #[test]
    fn single_point() {
        let x = 0.37;
        let f = fit(&[x]);
        assert_eq!(f.heights(), &[1.0 / x, 0.0]);
        assert!((f.mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn csv_rows() {
        assert_eq!(
            fit(&[0.25, 0.75]).to_csv(),
            "breakpoint,height\n0.25,2\n0.75,1\n1,0\n"
        );
    }

    #[test]
    fn constructor_validates() {
        assert!(StepDensity::new(vec![0.0, 0.5, 1.0], vec![1.0, 1.0]).is_ok());
        assert!(StepDensity::new(vec![0.0, 0.5, 1.0], vec![0.5, 1.5]).is_err());
        assert!(StepDensity::new(vec![0.0, 0.5, 1.0], vec![1.0, 0.5]).is_err());
        assert!(StepDensity::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
    }
}
