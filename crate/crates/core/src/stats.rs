//! Summary statistics and goodness-of-fit tests for Monte Carlo output.

use crate::error::{Error, Result};

fn nonempty(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        Err(Error::Empty)
    } else {
        Ok(())
    }
}

pub fn mean(values: &[f64]) -> Result<f64> {
    nonempty(values)?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Unbiased sample variance; needs at least two values.
pub fn variance(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InvalidParameter("variance needs two values".into()));
    }
    let m = mean(values)?;
    let ss: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
    Ok(ss / (values.len() - 1) as f64)
}

pub fn std_dev(values: &[f64]) -> Result<f64> {
    variance(values).map(f64::sqrt)
}

/// Unbiased sample covariance of paired values.
pub fn covariance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter(
            "covariance needs two equally long series of length ≥ 2".into(),
        ));
    }
    let (mx, my) = (mean(x)?, mean(y)?);
    let s: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(s / (x.len() - 1) as f64)
}

/// Pearson correlation.
pub fn correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    let c = covariance(x, y)?;
    let d = (variance(x)? * variance(y)?).sqrt();
    if d > 0.0 {
        Ok(c / d)
    } else {
        Err(Error::Degenerate("correlation of a constant series".into()))
    }
}

/// Median by the midpoint convention for even counts.
pub fn median(values: &[f64]) -> Result<f64> {
    nonempty(values)?;
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    Ok(if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    })
}

/// Standard error of the sample variance, `√((m₄ − s⁴)/N)`.
pub fn variance_standard_error(values: &[f64]) -> Result<f64> {
    let s2 = variance(values)?;
    let m = mean(values)?;
    let m4 = values.iter().map(|v| (v - m).powi(4)).sum::<f64>() / values.len() as f64;
    Ok(((m4 - s2 * s2).max(0.0) / values.len() as f64).sqrt())
}

/// Standard error of the mean from `batches` contiguous batch means.
pub fn batch_means_standard_error(values: &[f64], batches: usize) -> Result<f64> {
    if batches < 2 || values.len() < batches {
        return Err(Error::InvalidParameter(format!(
            "batch means need at least 2 batches and one value per batch, got {batches} for {}",
            values.len()
        )));
    }
    let size = values.len() / batches;
    let means: Vec<f64> = values
        .chunks_exact(size)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    Ok((variance(&means)? / batches as f64).sqrt())
}

/// Binomial standard error `√(p(1 − p)/N)`.
pub fn binomial_standard_error(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Least-squares slope of `y` on `x` with its standard error.
pub fn ols_slope(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let sxx = covariance(x, x)?;
    if !(sxx > 0.0) {
        return Err(Error::Degenerate("regression on a constant covariate".into()));
    }
    let slope = covariance(x, y)? / sxx;
    let (mx, my) = (mean(x)?, mean(y)?);
    let k = x.len();
    let se = if k > 2 {
        let rss: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| (b - my - slope * (a - mx)).powi(2))
            .sum();
        (rss / (k - 2) as f64 / (sxx * (k - 1) as f64)).sqrt()
    } else {
        f64::NAN
    };
    Ok((slope, se))
}

/// Asymptotic Kolmogorov coefficient `c(α) = √(−ln(α/2)/2)`.
pub fn ks_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// One-sample critical value `c(α)/√n`.
pub fn ks_critical_one_sample(n: usize, alpha: f64) -> f64 {
    ks_coefficient(alpha) / (n as f64).sqrt()
}

/// Two-sample critical value `c(α)√((n + m)/(nm))`.
pub fn ks_critical_two_sample(n: usize, m: usize, alpha: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    ks_coefficient(alpha) * ((n + m) / (n * m)).sqrt()
}

/// `sup |F_N − F|` for the sample `values` against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> Result<f64> {
    nonempty(values)?;
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    Ok(v.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    }))
}

/// `sup |F_a − F_b|` between two empirical distributions.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    nonempty(a)?;
    nonempty(b)?;
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&v).unwrap(), 2.5);
        assert!((variance(&v).unwrap() - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(median(&v).unwrap(), 2.5);
        assert_eq!(median(&[3.0, 1.0, 2.0]).unwrap(), 2.0);
        assert!(mean(&[]).is_err());
        assert!(variance(&[1.0]).is_err());
    }

    #[test]
    fn correlation_signs() {
        let x = [1.0, 2.0, 3.0];
        assert!((correlation(&x, &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((correlation(&x, &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!(correlation(&x, &[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn regression_recovers_a_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 1.0 - 0.5 * v).collect();
        let (slope, se) = ols_slope(&x, &y).unwrap();
        assert!((slope + 0.5).abs() < 1e-15);
        assert!(se < 1e-12);
    }

    #[test]
    fn kolmogorov_statistics() {
        assert!((ks_coefficient(0.01) - 1.6276).abs() < 1e-4);
        assert!((ks_one_sample(&[0.5], |t| t).unwrap() - 0.5).abs() < 1e-15);
        let grid: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((ks_one_sample(&grid, |t| t).unwrap() - 0.005).abs() < 1e-12);
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 1.0);
        assert_eq!(ks_two_sample(&[1.0, 3.0], &[2.0, 4.0]).unwrap(), 0.5);
    }

    #[test]
    fn batch_means_of_constant_batches() {
        let v = [1.0, 1.0, 3.0, 3.0];
        // Batch means 1 and 3: variance 2, SE √(2/2) = 1.
        assert!((batch_means_standard_error(&v, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!(batch_means_standard_error(&v, 1).is_err());
    }
}
