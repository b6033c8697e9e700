//! Crate-wide error type.
//!
//! Errors fall into two broad classes that the CLI maps onto its exit-code
//! contract: problems with the *request* (bad parameters, unsupported
//! capability, malformed configuration) and problems that arise *during
//! computation* (divergent series, non-finite intermediates, insufficient
//! grid coverage).

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// A series failed to meet its tolerance within the term budget.
    /// The partial sum is carried so callers can log or inspect it.
    #[error("series did not converge after {terms} terms (partial value {partial:e})")]
    Convergence { terms: usize, partial: f64 },

    /// The request requires an evaluation path this build does not provide
    /// (e.g. complex density evaluation for a family without one).
    #[error("capability: {0}")]
    Capability(String),

    /// Invalid configuration: parameter validation, schema violations,
    /// inconsistent method/problem combinations.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A computation produced non-finite intermediates or exhausted its
    /// refinement budget.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A density grid does not cover enough of the effective support for
    /// the requested operation.
    #[error("grid coverage: estimated mass {outside_mass:.3e} outside the grid exceeds {limit:.1e}")]
    Coverage { outside_mass: f64, limit: f64 },

    /// A verification case name not present in the registry.
    #[error("unknown case '{0}'")]
    UnknownCase(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    /// Exit code class for the CLI: `2` for request problems,
    /// `3` for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain { .. }
            | Error::Capability(_)
            | Error::Config(_)
            | Error::UnknownCase(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::Convergence { .. } | Error::Numeric(_) | Error::Coverage { .. } => 3,
        }
    }
}
