use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Capacity,
    Unsupported,
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    /// The input violates a structural hypothesis (e.g. a lattice map that does not
    /// send rays to rays). Reported with the offending data rather than silently fixed.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("point not on curve: {0}")]
    OffCurve(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("digit budget of {budget} exceeded after {completed} iterations")]
    DigitBudget { budget: u64, completed: usize, partial_heights: Vec<f64> },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Shape(_) | Error::Invalid(_) | Error::Singular(_) | Error::Hypothesis(_) | Error::OffCurve(_) => {
                ErrorKind::Validation
            }
            Error::Capacity(_) | Error::DigitBudget { .. } => ErrorKind::Capacity,
            Error::Unsupported(_) => ErrorKind::Unsupported,
            Error::Consistency(_) => ErrorKind::Internal,
        }
    }

    /// Short stable tag for machine-readable error objects.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Shape(_) => "shape",
            Error::Invalid(_) => "invalid",
            Error::Singular(_) => "singular",
            Error::Hypothesis(_) => "hypothesis",
            Error::OffCurve(_) => "off_curve",
            Error::Capacity(_) => "capacity",
            Error::DigitBudget { .. } => "digit_budget",
            Error::Unsupported(_) => "unsupported",
            Error::Consistency(_) => "consistency",
        }
    }
}
