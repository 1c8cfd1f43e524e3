use thiserror::Error;

/// Errors produced by the estimators, samplers and simulations in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("{name} = {value} lies outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value while {0}")]
    NonFinite(String),

    #[error("degenerate estimate: {0}")]
    Degenerate(String),

    #[error("kernel `{kernel}` does not satisfy {condition}")]
    KernelCondition { kernel: String, condition: String },

    #[error("rejection envelope is broken: {0}")]
    Envelope(String),

    #[error("argmax hit the window boundary in {hits} of {draws} draws; enlarge the window")]
    WindowTooSmall { hits: usize, draws: usize },

    #[error("empty input")]
    Empty,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}
