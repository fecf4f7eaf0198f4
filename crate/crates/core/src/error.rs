//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("envelope is unbounded (+inf)")]
    UnboundedEnvelope,
    #[error("no finite bracket found after {doublings} doublings")]
    NumericBracketFailure { doublings: usize },
    #[error("objective is +inf on the whole search domain")]
    NonFiniteObjective,
    #[error("bracket error: {0}")]
    Bracket(String),
    #[error("missing derivative information for order {order}")]
    MissingDerivative { order: usize },
    #[error("no convergence after {iterations} iterations (last gap {gap:.3e})")]
    NoConvergence { iterations: usize, gap: f64 },
    #[error("invalid alpha: {0}")]
    InvalidAlpha(String),
    #[error("distribution violates the transport budget: cost {cost:.6e} > eps {eps:.6e}")]
    InfeasibleQ { cost: f64, eps: f64 },
    #[error("gradient undefined: lambda {lambda} below 1/||theta||_0 = {threshold}")]
    InfiniteRegion { lambda: f64, threshold: f64 },
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code used by the CLI in JSON mode.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Domain(_) => "domain_error",
            Error::Infeasible(_) => "infeasible",
            Error::UnboundedEnvelope => "unbounded_envelope",
            Error::NumericBracketFailure { .. } => "numeric_bracket_failure",
            Error::NonFiniteObjective => "non_finite_objective",
            Error::Bracket(_) => "bracket_error",
            Error::MissingDerivative { .. } => "missing_derivative",
            Error::NoConvergence { .. } => "no_convergence",
            Error::InvalidAlpha(_) => "invalid_alpha",
            Error::InfeasibleQ { .. } => "infeasible_q",
            Error::InfiniteRegion { .. } => "infinite_region",
            Error::Io(_) => "io_error",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
