//! Observations on the unit interval and their empirical distribution function.

use crate::error::{Error, Result};

/// A non-empty sample of observations in `[0, 1]`, kept sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    /// Validates and sorts `values`.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        validate(&values)?;
        values.sort_by(f64::total_cmp);
        Ok(Sample { values })
    }

    /// Wraps values that are already sorted; rejects unsorted input.
    pub fn from_sorted(values: Vec<f64>) -> Result<Self> {
        validate(&values)?;
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidSample("values are not sorted".into()));
        }
        Ok(Sample { values })
    }

    /// Internal constructor for values produced by our own samplers, which are
    /// in range by construction.
    pub(crate) fn from_generated(mut values: Vec<f64>) -> Self {
        debug_assert!(validate(&values).is_ok());
        values.sort_unstable_by(f64::total_cmp);
        Sample { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; a `Sample` holds at least one observation.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn ecdf(&self) -> EmpiricalCdf {
        empirical_cdf(self)
    }
}

fn validate(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::InvalidSample(format!("observation {i} is not finite")));
        }
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidSample(format!(
                "observation {i} = {v} lies outside [0, 1]"
            )));
        }
    }
    Ok(())
}

/// Right-continuous empirical distribution function. Tied observations are
/// merged into a single jump.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    locations: Vec<f64>,
    /// Number of observations `<= locations[j]`.
    counts: Vec<usize>,
    n: usize,
}

pub fn empirical_cdf(sample: &Sample) -> EmpiricalCdf {
    let mut locations = Vec::with_capacity(sample.len());
    let mut counts = Vec::with_capacity(sample.len());
    for (i, &x) in sample.values().iter().enumerate() {
        match locations.last() {
            Some(&last) if last == x => *counts.last_mut().unwrap() = i + 1,
            _ => {
                locations.push(x);
                counts.push(i + 1);
            }
        }
    }
    EmpiricalCdf {
        locations,
        counts,
        n: sample.len(),
    }
}

impl EmpiricalCdf {
    /// `F(t) = #{X_i <= t} / n`.
    pub fn eval(&self, t: f64) -> f64 {
        let j = self.locations.partition_point(|&x| x <= t);
        if j == 0 {
            0.0
        } else {
            self.counts[j - 1] as f64 / self.n as f64
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Distinct jump locations, ascending.
    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    /// Cumulative counts matching [`locations`](Self::locations).
    pub fn cumulative_counts(&self) -> &[usize] {
        &self.counts
    }

    /// Points `(X_(i), i/n)` of the graph at each distinct jump.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.n as f64;
        self.locations
            .iter()
            .zip(&self.counts)
            .map(move |(&x, &c)| (x, c as f64 / n))
    }
}
