//! Error type shared by every layer of the crate.

use thiserror::Error;

/// Unified error enum. Variants split into two families: invalid *inputs*
/// (caller mistakes: bad parameters, out-of-domain arguments) and *numerical*
/// failures (a computation that started but cannot meet its contract).
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates a documented precondition (σ ≤ 0, too few nodes, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// An argument lies outside the domain on which the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested quantity is not defined for this model.
    #[error("not defined: {0}")]
    NotDefined(String),
    /// A grid-backed function was evaluated outside its covered range.
    #[error("grid coverage: {0}")]
    GridCoverage(String),
    /// A truncated quadrature window is provably too small for the integrand.
    #[error("quadrature truncation: {0}")]
    Truncation(String),
    /// The integrand grows along the contour; the transform does not exist
    /// on the requested line.
    #[error("divergent integral: {0}")]
    Divergent(String),
    /// A series did not converge within the configured term budget.
    #[error("series limit: {0}")]
    SeriesLimit(String),
    /// Monte Carlo standard error exceeds 10% of the estimate.
    #[error("variance blow-up: estimate {estimate:e}, std error {std_error:e}")]
    VarianceBlowUp { estimate: f64, std_error: f64 },
}

impl Error {
    /// True for caller mistakes (exit code 2 in the CLI), false for numerical
    /// failures (exit code 3).
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::Domain(_)
                | Error::NotDefined(_)
                | Error::GridCoverage(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
