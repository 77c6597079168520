use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("denominator must be positive")]
    InvalidDenominator,
    #[error("{0} is not a reduced fraction in [0, 1)")]
    NotFareyFraction(String),
    #[error("{0} is not a canonical continued fraction")]
    NotCanonical(String),
    #[error("no partial quotient a_{index}: expansion has length {length}")]
    OutOfQuotients { index: usize, length: usize },
    #[error("comparison still undecided after {bits} random bits")]
    NeedsMoreBits { bits: u64 },
    #[error("partial quotient a_{index} exceeds 2^63")]
    QuotientOverflow { index: usize },
    #[error("a fraction of height 1 has no Farey neighbors")]
    NoNeighbors,
    #[error("series diverges for weight `{0}`")]
    DivergentSeries(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
