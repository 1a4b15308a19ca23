use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zeta_even requires s >= 1")]
    ZeroZetaArgument,

    #[error("cannot add pi-scaled values with exponents {0} and {1}")]
    PiExponentMismatch(u32, u32),

    #[error("series constant term violates precondition: {0}")]
    ConstantTerm(&'static str),

    #[error("series precondition violated: {0}")]
    SeriesPrecondition(&'static str),

    #[error("partition part {0} is below 2")]
    PartTooSmall(u32),

    #[error("empty partition")]
    EmptyPartition,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("entry must be positive")]
    NonPositiveEntry,

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("size bound exceeded: {0}")]
    SizeBound(String),

    #[error("perimeters are unbalanced: {0} != {1}")]
    Unbalanced(String, String),

    #[error("graph is not a tree")]
    NotATree,

    #[error("no positive generic point found on the wall after {0} attempts")]
    NoPositivePoint(usize),

    #[error("finite difference of order {order} does not vanish: {value}")]
    DegreeBound { order: usize, value: String },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("memo cache: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
