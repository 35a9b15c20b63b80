use thiserror::Error;

/// Errors raised by the field-statistics library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {name} = {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}, tolerance {tolerance:e}")]
    Quadrature {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },

    /// Characteristic function does not decay fast enough to pick an inversion cutoff.
    #[error("characteristic function still at |p(k)| = {modulus:e} at k = {k}; choose a different grid or tolerance")]
    CutoffUnreachable { k: f64, modulus: f64 },

    /// Inverted density went negative beyond the numerical-noise allowance.
    #[error("inverted density {value:e} at g = {g} is below the noise floor; refine tolerance")]
    NegativeDensity { g: f64, value: f64 },

    /// Simulation spec, binning or grid is inconsistent.
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },

    /// Histogram and curve cannot be compared.
    #[error("comparison failed: {0}")]
    Comparison(String),

    /// Malformed interchange file.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        reason,
    }
}

pub fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::Invalid {
        field,
        reason: reason.into(),
    }
}
