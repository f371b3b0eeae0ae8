use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("n = {n} is outside the supported range {min}..={max}")]
    OutOfRange { n: usize, min: usize, max: usize },

    #[error("Catalan number C_{0} overflows u64")]
    CatalanOverflow(usize),

    #[error("dimension q = {q} is below the required minimum {min}")]
    DimensionTooSmall { q: usize, min: usize },

    #[error("singular Gram system for n = {n}, q = {q}")]
    SingularGram { n: usize, q: f64 },

    #[error("unknown operator `{0}`")]
    UnknownOperator(String),

    #[error("operator `{name}` has shape {rows}x{cols}, expected {q}x{q}")]
    OperatorShape {
        name: String,
        rows: usize,
        cols: usize,
        q: usize,
    },

    #[error("unitary power {0} exceeds the evaluation guard of 64")]
    PowerTooLarge(i64),

    #[error("invalid time sequence: {0}")]
    InvalidTimes(String),

    #[error("invalid layer description: {0}")]
    InvalidLayer(String),

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("default Z needs an even dimension, got q = {0}")]
    OddDimension(usize),

    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
