use thiserror::Error;

/// Errors raised by the orbit toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed value `{0}`")]
    Malformed(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("negative input `{0}`")]
    Negative(String),
    #[error("sqrt({0}) is rational; write it as a fraction instead")]
    PerfectSquare(u64),
    /// A fixed-point error bound would reach 1/4; rerun with more bits.
    #[error("precision exhausted at {bits} bits (error multiplier needs {needed} bits)")]
    PrecisionExhausted { bits: u32, needed: u64 },
    /// Grid cells are too small for the certified error of the samples.
    #[error("sample error bound too coarse for a {grid}x{grid} grid")]
    PrecisionTooCoarse { grid: u32 },
    #[error("cannot mix exact and fixed-point coordinates")]
    TagMismatch,
    #[error("fixed-point values use different precisions ({0} vs {1} bits)")]
    BitsMismatch(u32, u32),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("pre-image of the zero exponent vector is undefined")]
    ZeroTriple,
    #[error("cannot write `{path}`: {reason}")]
    Io { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for precision-related failures (the caller should raise the bit budget).
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted { .. } | Error::PrecisionTooCoarse { .. }
        )
    }
}
