use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tensor is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("tensor is singular (determinant {det:e})")]
    Singular { det: f64 },

    #[error("rotation axis must have unit length, got |axis| = {norm}")]
    InvalidAxis { norm: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {norm:e} lies outside the admissible ball of radius {radius:e}")]
    OutOfDomain {
        what: &'static str,
        norm: f64,
        radius: f64,
    },

    #[error("delta = {delta} exceeds the admissible ceiling {ceiling}")]
    InadmissibleDelta { delta: f64, ceiling: f64 },

    #[error("generalized modulus bracket {bracket} fell below the lower bound {bound}")]
    NonpositiveModulus { bracket: f64, bound: f64 },

    #[error("leading-order factor 1 - a tr(E~) = {factor} is not positive")]
    SingularLeading { factor: f64 },

    #[error("operation requires {expected}, got {found}")]
    UnsupportedFamily {
        expected: &'static str,
        found: &'static str,
    },

    #[error("no convergence after {iterations} iterations (best residual {best_residual:e})")]
    NoConvergence { iterations: usize, best_residual: f64 },

    #[error("order fit needs at least {needed} positive residuals, got {got}")]
    FitUnderdetermined { needed: usize, got: usize },

    #[error("all residuals are exactly zero")]
    AllZeroResiduals,

    #[error("|strain / delta| = {ratio} reached the strain limit")]
    Saturation { ratio: f64 },

    #[error("strain {value} is outside the domain E > -1/2")]
    DomainError { value: f64 },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("study failed: {0}")]
    StudyFailed(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
