use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid precision profile: {0}")]
    InvalidProfile(String),

    #[error("working modulus {p}^{digits} exceeds the 60-bit working range")]
    WorkingPrecisionTooLarge { p: u64, digits: u32 },

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("modulus is not irreducible mod {0}")]
    ReducibleModulus(u64),

    #[error("invalid tower: {0}")]
    InvalidTower(String),

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("enumeration budget exceeded: {points} points requested, limit is {limit}")]
    EnumerationBudget { points: u128, limit: u64 },

    #[error("slope analysis: {0}")]
    Slopes(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
