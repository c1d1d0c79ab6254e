//! Crate-wide error type.
//!
//! Algorithmic failures (ill-defined local constants, undefined phases, no
//! admissible partition point) are structured variants rather than panics or
//! silent regularization: under a valid sampling plan they cannot occur, so
//! surfacing them signals a plan violation.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of a special function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid argument (tolerances, interval bounds, norms, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Invalid or incomplete experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    QuadratureFailed(String),

    /// No grid point exceeded the detection threshold.
    #[error("no admissible partition point: F stays below the threshold")]
    NoAdmissiblePoint,

    /// The detected run of admissible points is too short to reconstruct.
    #[error("partition too short: found {found} point(s), need at least 2")]
    PartitionTooShort { found: usize },

    /// A local constant c_j came out non-positive, so L_j is undefined.
    #[error("local constant c_{index} = {value} is not positive")]
    IllDefined { index: usize, value: f64 },

    /// A phase synchronization factor had zero modulus.
    #[error("phase factor nu_{index} undefined: L vanished at the gap point")]
    PhaseUndefined { index: usize },

    /// A stated hypothesis of the method is violated by the inputs.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    /// Malformed data file (CSV matrix, fixture, ...).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
