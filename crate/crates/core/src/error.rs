use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("division by exact zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("coefficient ring mismatch")]
    RingMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("point not in the open unit residue disk")]
    PointOutsideDisk,
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("pole outside the allowed place set: {0}")]
    PoleOutsidePlaces(String),
    #[error("pole of order > 1 at the basepoint")]
    PoleAtBasepoint,
    #[error("divergent iterated integral at the basepoint for word {0}")]
    DivergentWord(String),
    #[error("word {0} not present in the section")]
    MissingWord(String),
    #[error("series order too small: need at least {need}, have {have}")]
    OrderTooSmall { need: usize, have: usize },
    #[error("invalid curve shape: {0}")]
    InvalidShape(String),
    #[error("wrong augmentation: {0}")]
    WrongAugmentation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
