use thiserror::Error;

/// Errors raised at operation boundaries.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid grid function: {0}")]
    InvalidFunction(String),

    #[error("input is not convex: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotConvex { defect: f64, tol: f64 },

    #[error("effective domain is empty")]
    EmptyDomain,

    #[error("window [-{window:.3}, {window:.3}] too small: {what}; need L >= {required:.3}")]
    WindowTooSmall {
        what: String,
        window: f64,
        required: f64,
    },

    #[error("potential is unbounded; apply a cutoff first")]
    Unbounded,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("schedule too short: {0}")]
    ScheduleTooShort(String),

    #[error("not converged: {0}")]
    NotConverged(String),

    #[error("inconsistent verdicts: {0}")]
    Inconsistent(String),

    #[error("arithmetic produced an undefined value ({0})")]
    Undefined(String),

    #[error("mismatched inputs: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
