use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("weight exponent {given} is below the declared growth exponent {required}; the weighted measure would not be finite")]
    NonFiniteWeight { given: u32, required: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("growth exponent {0} is outside the Toeplitz correspondence range (p <= 1)")]
    OutOfCorrespondenceRange(u32),

    #[error("refused: {0}")]
    Refused(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
