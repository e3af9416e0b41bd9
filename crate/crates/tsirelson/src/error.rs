//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors surfaced by validation, evaluation, and decision procedures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A scalar could not be parsed as `p/q` (or a bare integer `p`).
    #[error("invalid rational literal {0:?}: {1}")]
    InvalidRational(String, String),

    /// A coefficient fell outside the half-open unit interval `(0, 1]`.
    #[error("coefficient out of range: {0} is not in (0, 1]")]
    CoefficientOutOfRange(String),

    /// A structural precondition on an input object failed.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// `theta_at` was queried past the end of an explicit list with no tail.
    #[error("coefficient index {0} is past the explicit list (length {1}) and no tail is given")]
    MissingTail(usize, usize),

    /// No closed-form derivative rule exists for the requested family.
    #[error("no closed-form derivative for {0}")]
    NoClosedFormDerivative(String),

    /// A configured work budget was exhausted before the computation finished.
    #[error("budget exceeded: more than {limit} {unit} required")]
    BudgetExceeded { limit: u64, unit: &'static str },

    /// Requested precision is beyond what the enclosure machinery certifies.
    #[error("precision {0} exceeds the supported maximum of {1} bits")]
    PrecisionUnsupported(u32, u32),

    /// An exact comparison could not be decided at the maximum refinement.
    #[error("comparison undecided at maximum precision: {0}")]
    Undecided(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
