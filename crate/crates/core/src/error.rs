use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input: dimension or root-order mismatch, non-Hermitian data,
    /// out-of-range exponents and the like.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The operation is not defined for this root order.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An exhaustive computation would exceed the configured size budget.
    #[error("{what} needs {required} evaluations but the budget is {budget}")]
    Budget {
        what: String,
        required: u128,
        budget: u128,
    },

    /// A binary vector does not encode any assignment.
    #[error("decode failed at block {block}: {reason}")]
    Decode { block: usize, reason: String },

    /// A binary vector violates the domain or block constraint of a program.
    #[error("infeasible point, block {block}: {reason}")]
    Feasibility { block: usize, reason: String },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
