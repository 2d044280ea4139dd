use thiserror::Error;

/// Library error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A model parameter or argument violates its constraint. The message
    /// names the first violated constraint, e.g. `"sigma2 must be > 0"`.
    #[error("{0}")]
    InvalidParameter(String),

    /// The exponent system has no root with both components negative
    /// within the retry budget.
    #[error("no negative root found within retry budget")]
    NoNegativeRoot,

    /// Newton step could not be computed and damping failed.
    #[error("singular Jacobian")]
    SingularJacobian,

    /// Two per-node fields were combined on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
