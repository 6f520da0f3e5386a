use thiserror::Error;

use crate::graph::Cut;

/// Errors raised by the solvers, oracles and generators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {field}: {reason}")]
    InvalidInstance { field: String, reason: String },

    #[error("instance parse error: {0}")]
    Parse(String),

    #[error("instance is infeasible: {detail}")]
    Infeasible {
        detail: String,
        witness: Option<Box<Cut>>,
    },

    #[error("graph is disconnected under weighting `{label}`")]
    Disconnected { label: String },

    #[error("capability limit: {0}")]
    Capability(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("bound violated: {0}")]
    BoundViolated(String),

    #[error("iteration cap of {cap} reached after adding {pool_size} constraints")]
    IterationCap { cap: usize, pool_size: usize },

    #[error("rounding failed after {attempts} attempts")]
    RoundingFailed {
        attempts: usize,
        witnesses: Vec<String>,
    },

    #[error("linear program is infeasible")]
    LpInfeasible,

    #[error("inconsistent labeling on label-cover edges {0:?}")]
    InconsistentLabeling(Vec<usize>),

    #[error("generator rejection limit exceeded after {0} tries")]
    RejectionLimit(usize),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInstance {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors that signal an infeasible problem rather than misuse.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::Infeasible { .. } | Error::LpInfeasible | Error::RoundingFailed { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
