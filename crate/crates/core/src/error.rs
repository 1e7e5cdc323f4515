use thiserror::Error;

/// Errors raised while building fields, validating equations or evaluating counts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("field order {p}^{s} exceeds the supported bound {bound}")]
    FieldTooLarge { p: u64, s: u32, bound: u64 },

    #[error("invalid modulus: {0}")]
    BadModulus(String),

    #[error("modulus {0:?} is reducible")]
    ReducibleModulus(Vec<u32>),

    #[error("element code {code} is out of range for a field of order {q}")]
    ElementOutOfRange { code: u64, q: u64 },

    #[error("{0} is undefined at zero")]
    ZeroElement(&'static str),

    #[error("the quadratic character is undefined in characteristic 2")]
    EtaCharTwo,

    #[error("invalid equation: {0}")]
    InvalidSpec(String),

    #[error("{0}")]
    OutOfRange(String),

    #[error("{method}: hypothesis not satisfied: {reason}")]
    Hypothesis { method: &'static str, reason: String },

    #[error("integrality check failed: {0}")]
    NonIntegral(String),

    #[error("inconsistent results: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
