use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid prime context: {0}")]
    InvalidContext(String),
    #[error("operands come from different prime contexts")]
    ContextMismatch,
    #[error("precision exhausted: needed at least {needed} p-adic digits, have {available}")]
    PrecisionExhausted { needed: u32, available: u32 },
    #[error("singular matrix")]
    Singular,
    #[error("matrix is not hermitian: {0}")]
    NotHermitian(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("enumeration budget exceeded: estimated {estimate} elementary steps, budget {budget}")]
    BudgetExceeded { estimate: u128, budget: u128 },
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("unsupported input shape: {0}")]
    Shape(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// An internal cross-check between two independent routes failed.
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
