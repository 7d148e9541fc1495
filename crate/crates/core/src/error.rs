use thiserror::Error;

/// Errors raised by the certified arithmetic and the number-theoretic layers
/// built on it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precision exhausted at {bits} bits: {detail}")]
    PrecisionExhausted { bits: u32, detail: String },

    #[error("floor unresolved at {bits} bits: enclosure [{lo}, {hi}] straddles an integer")]
    UnresolvedFloor { bits: u32, lo: String, hi: String },

    #[error("exact threshold hit for prime {p}: candidate exponents {lower} and {upper}")]
    Tie { p: u64, lower: u32, upper: u32 },

    #[error("critical thresholds ({p}, {a}) and ({q}, {b}) could not be ordered at {bits} bits")]
    ThresholdTie { p: u64, a: u32, q: u64, b: u32, bits: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("sieve cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
