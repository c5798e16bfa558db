use thiserror::Error;

/// Failure while parsing a ring expression or an element literal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(pos: usize, msg: impl Into<String>) -> Self {
        ParseError { pos, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("ring order overflows the supported index range")]
    OrderOverflow,
    #[error("unsupported Galois field size {q} (supported: primes and 4, 8, 9)")]
    UnsupportedField { q: u64 },
    #[error("element {index} is not idempotent")]
    NotIdempotent { index: u64 },
    #[error("ideal is not two-sided")]
    NotTwoSided,
    #[error("ideal is not nil")]
    NotNilIdeal,
    #[error("element index {index} out of range for ring of order {order}")]
    IndexOutOfRange { index: u64, order: u64 },
    #[error("budget exceeded: {what}")]
    BudgetExceeded { what: String },
    #[error("{0}")]
    Literal(#[from] ParseError),
    #[error("precondition violated: {msg}")]
    Precondition { msg: String },
    // Reserved for checks that are proved to hold; reaching one is a bug.
    #[error("internal verification failed: {msg}")]
    Internal { msg: String },
}

impl RingError {
    pub fn precondition(msg: impl Into<String>) -> Self {
        RingError::Precondition { msg: msg.into() }
    }

    pub fn budget(what: impl Into<String>) -> Self {
        RingError::BudgetExceeded { what: what.into() }
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        RingError::Internal { msg: msg.into() }
    }
}
