use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigSyntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("qubit index {index} out of range ({count} qubit(s) configured)")]
    QubitIndex { index: usize, count: usize },

    #[error("site index {site} out of range 1..={n_sites}")]
    SiteIndex { site: i64, n_sites: usize },

    #[error("the system has no qubits")]
    EmptySystem,

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{what} outside its domain: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("singularity: {0}")]
    Singular(String),

    #[error("no bound state: {0}")]
    NoBoundState(String),

    #[error("degenerate qubit pair: {reason} (roots found: {roots:?})")]
    DegeneratePair { reason: String, roots: Vec<f64> },

    #[error("{operation} did not converge after {iterations} iterations (last iterates {last:?})")]
    NoConvergence {
        operation: &'static str,
        iterations: usize,
        last: Vec<f64>,
    },

    #[error("quadrature failed to reach tolerance {target:e} (estimate {achieved:e})")]
    Quadrature { target: f64, achieved: f64 },
}

impl Error {
    /// True for errors caused by the input document rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::ConfigSyntax { .. } | Error::Validation { .. } | Error::QubitIndex { .. }
        )
    }

    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
