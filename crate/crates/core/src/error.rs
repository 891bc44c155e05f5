use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("modulus {prime}^{precision} is outside the supported range")]
    PrecisionTooLarge { prime: u64, precision: u32 },
    #[error("element is not a unit")]
    NotAUnit,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("trace is odd, theta is undefined at the prime 2")]
    OddTrace,
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("insufficient precision: need N >= {required}")]
    InsufficientPrecision { required: u32 },
    #[error("operands live in different contexts")]
    ContextMismatch,
    #[error("case not covered: {0}")]
    CaseNotCovered(String),
    #[error("unclassifiable subgroup: {0}")]
    UnclassifiableInternal(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("magnitude exceeds the representable range")]
    MagnitudeOverflow,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
