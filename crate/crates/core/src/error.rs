use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Parameters outside the region where a closed form converges or is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("operator arguments do not commute: [u, v] has {terms} nonzero normal-ordered terms")]
    NonCommutingArguments { terms: usize },

    /// A negative power of the formal parameter survived where the identity
    /// requires it to cancel.
    #[error("coefficient of tau^{power} is nonzero")]
    NegativePowerSurvives { power: i64 },

    #[error("truncation tail bound {bound:e} exceeds tolerance {tolerance:e}")]
    TailTooLarge { bound: f64, tolerance: f64 },

    #[error("operator of word length {word_len} has no guarded block at cutoff {cutoff}")]
    CutoffViolation { word_len: u32, cutoff: u32 },

    #[error("parse error: {0}")]
    Parse(String),
}
