use thiserror::Error;

/// A numerical domain violation: a square root of a negative quantity, a
/// singular derivative, or an interval that cannot exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("domain error: {0}")]
pub struct DomainError(pub &'static str);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Domain(#[from] DomainError),

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid bound problem `{id}`: {reason}")]
    InvalidProblem { id: String, reason: String },

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("unknown bound id `{0}`")]
    UnknownBound(String),

    #[error("scenario {scenario} takes {expected} free coefficients, got {got}")]
    ScenarioArity {
        scenario: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("rejection sampling acceptance rate {rate:.3e} fell below {threshold:.0e}")]
    RejectionBudget { rate: f64, threshold: f64 },

    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
