use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments outside the domain of an operation (negative `s`, `t ∉ (0,1)`, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A Young function (or a table claiming to be one) violates its invariants.
    #[error("invalid Young function: {0}")]
    InvalidYoung(String),

    /// An improper integral near zero does not converge.
    #[error("integrability gate failed: {0}")]
    GateFailed(String),

    /// No convex affine bridge between `A` and `A_n` was found.
    #[error("glue search failed: {0}")]
    GlueFailed(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    /// The raster is too coarse for the requested ball.
    #[error("resolution exhausted: {0}")]
    Resolution(String),

    /// Luxemburg bisection could not bracket the unit modular.
    #[error("norm computation failed: {0}")]
    Norm(String),

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
