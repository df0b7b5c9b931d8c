use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("distribution cannot be normalized: {0}")]
    NonNormalizable(String),

    #[error(
        "quadrature did not converge at t = {t}: error estimate {achieved:e} exceeds tolerance {target:e} after {evaluations} evaluations"
    )]
    QuadratureNonConvergence {
        t: f64,
        achieved: f64,
        target: f64,
        evaluations: usize,
    },

    #[error("unsupported momentum packet shape: {0}")]
    UnsupportedShape(String),

    #[error("unsupported spatial dimension {0}")]
    UnsupportedDimension(usize),

    #[error("scenario: {0}")]
    Scenario(String),

    #[error("treatment `{treatment}`: {source}")]
    InTreatment {
        treatment: &'static str,
        source: Box<Error>,
    },

    #[error("spatial window too small: |A|^2 at the window edge is {edge_fraction:e} of its peak")]
    GridTooSmall { edge_fraction: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
