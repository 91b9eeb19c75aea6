use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid stable parameters: {0}")]
    InvalidParams(String),

    #[error("stability indices differ ({0} vs {1})")]
    AlphaMismatch(f64, f64),

    #[error("scale factor must be nonzero")]
    ZeroScale,

    #[error("quadrature did not reach tolerance on [{a}, {b}]: estimate {value:e}, error {error:e}")]
    QuadratureFailure {
        a: f64,
        b: f64,
        value: f64,
        error: f64,
    },

    #[error("log-moment integral does not converge numerically")]
    NonFiniteLogMoment,

    #[error("no sign change found after {expansions} bracket expansions")]
    BracketFailure { expansions: usize },

    #[error("root solver stopped with residual {residual:e} above tolerance {tol:e}")]
    ToleranceNotMet { residual: f64, tol: f64 },

    #[error("invalid distortion {0}")]
    InvalidDistortion(f64),

    #[error("invalid source: {0}")]
    InvalidSource(String),

    #[error("source density is not symmetric about zero")]
    NonSymmetricSource,

    #[error("points are not strictly increasing")]
    NotSorted,

    #[error("invalid quantizer: {0}")]
    InvalidQuantizer(String),

    #[error("representation points {0} and {1} coincide")]
    DegenerateDesign(f64, f64),

    #[error("argument {0} outside the admissible range")]
    OutOfRange(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
