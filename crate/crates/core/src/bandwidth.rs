use serde::Serialize;

use crate::error::{Error, Result};

/// Inference regime, fixing the admissible bandwidth exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `α ∈ (0, 1/3)`.
    Pointwise,
    /// `α ∈ (1/6, 1/5)`.
    L1,
}

impl Regime {
    pub fn exponent_range(self) -> (f64, f64) {
        match self {
            Regime::Pointwise => (0.0, 1.0 / 3.0),
            Regime::L1 => (1.0 / 6.0, 1.0 / 5.0),
        }
    }

    pub fn default_exponent(self) -> f64 {
        match self {
            Regime::Pointwise => 0.30,
            Regime::L1 => 0.18,
        }
    }
}

/// Deterministic bandwidth `h = R n^{−α}`, clamped to `(0, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandwidthRule {
    pub alpha: f64,
    pub scale: f64,
    pub regime: Regime,
}

impl BandwidthRule {
    pub fn new(alpha: f64, scale: f64, regime: Regime) -> Result<Self> {
        let (lo, hi) = regime.exponent_range();
        if !(alpha > lo && alpha < hi) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth exponent {alpha} is outside the {regime:?} range ({lo:.6}, {hi:.6})"
            )));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth scale must be positive, got {scale}"
            )));
        }
        Ok(BandwidthRule {
            alpha,
            scale,
            regime,
        })
    }

    /// Default exponent for the regime with `R = 1`.
    pub fn default_for(regime: Regime) -> Self {
        BandwidthRule {
            alpha: regime.default_exponent(),
            scale: 1.0,
            regime,
        }
    }

    pub fn bandwidth(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::Empty);
        }
        Ok((self.scale * (n as f64).powf(-self.alpha)).min(0.5))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let p = BandwidthRule::new(0.3, 1.0, Regime::Pointwise).unwrap();
        assert!((p.bandwidth(1000).unwrap() - 0.125893).abs() < 1e-6);
        assert_eq!(p.bandwidth(2).unwrap(), 0.5);
        let l1 = BandwidthRule::new(0.18, 1.0, Regime::L1).unwrap();
        assert!((l1.bandwidth(10_000).unwrap() - 0.190546).abs() < 1e-6);
    }

    #[test]
    fn regime_gates() {
        assert!(BandwidthRule::new(0.4, 1.0, Regime::Pointwise).is_err());
        assert!(BandwidthRule::new(0.0, 1.0, Regime::Pointwise).is_err());
        assert!(BandwidthRule::new(0.3, 1.0, Regime::L1).is_err());
        assert!(BandwidthRule::new(0.18, 0.0, Regime::L1).is_err());
        assert!(BandwidthRule::new(0.18, -1.0, Regime::L1).is_err());
        assert!(BandwidthRule::default_for(Regime::L1).bandwidth(0).is_err());
    }
}
