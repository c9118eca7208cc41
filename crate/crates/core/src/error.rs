use thiserror::Error;

/// Errors raised by the algebra, density, sampler and verification layers.
///
/// Points outside a density's support are not errors; evaluators return
/// `f64::NEG_INFINITY` for those.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("point violates the support precondition: {0}")]
    Support(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("quadrature did not converge (last two estimates {previous} and {last})")]
    NoConvergence { previous: f64, last: f64 },

    #[error("sampler diagnostics: {0}")]
    Diagnostics(String),

    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
