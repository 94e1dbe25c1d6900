use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group spec: {0}")]
    InvalidGroup(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("spec mismatch: {0} vs {1}")]
    SpecMismatch(String, String),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("{0} is not a unit modulo {1}")]
    NotUnit(i64, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("inadmissible exponents: {0}")]
    Inadmissible(String),
    #[error("zero denominator: {0}")]
    ZeroDenominator(String),
    #[error("unknown check id: {0}")]
    UnknownCheck(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
