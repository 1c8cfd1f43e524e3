//! Common interface for densities on `[0, 1]`.

/// A function on `[0, 1]` that can be evaluated pointwise.
///
/// `value` is the left-continuous version at jump points; `value_right`
/// returns the right limit. Both return 0 outside `[0, 1]`.
pub trait Density {
    fn value(&self, t: f64) -> f64;

    fn value_right(&self, t: f64) -> f64 {
        self.value(t)
    }

    /// Interior points where the function or one of its low derivatives may
    /// jump. Used to split quadrature and to probe sup-norm distances.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// An exact piecewise-linear representation covering `[0, 1]`, when one
    /// exists.
    fn linear_pieces(&self) -> Option<Vec<LinearPiece>> {
        None
    }
}

/// A density whose first derivative can be evaluated.
pub trait Differentiable: Density {
    fn derivative(&self, t: f64) -> f64;
}

/// `value + slope * (t - start)` on `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPiece {
    pub start: f64,
    pub end: f64,
    pub value: f64,
    pub slope: f64,
}

impl LinearPiece {
    pub fn at(&self, t: f64) -> f64 {
        self.value + self.slope * (t - self.start)
    }
}

impl<D: Density + ?Sized> Density for &D {
    fn value(&self, t: f64) -> f64 {
        (**self).value(t)
    }
    fn value_right(&self, t: f64) -> f64 {
        (**self).value_right(t)
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
    fn linear_pieces(&self) -> Option<Vec<LinearPiece>> {
        (**self).linear_pieces()
    }
}

impl<D: Differentiable + ?Sized> Differentiable for &D {
    fn derivative(&self, t: f64) -> f64 {
        (**self).derivative(t)
    }
}
