use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("p-adic valuation of zero is undefined")]
    ZeroValuation,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no closed form for k = {0}")]
    NoClosedForm(u32),

    #[error("oracle budget exceeded: estimated {estimated} steps against a budget of {budget}")]
    BudgetExceeded { estimated: BigUint, budget: u64 },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// An arithmetic invariant failed. Always a bug, never a valid outcome.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
