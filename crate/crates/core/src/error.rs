use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid tableau: {0}")]
    InvalidTableau(String),

    #[error("{what} = {value} exceeds the configured bound {bound}")]
    BoundExceeded {
        what: &'static str,
        value: usize,
        bound: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0} is not square-free")]
    NotSquareFree(i64),

    #[error("partition {0} is not self-conjugate")]
    NotSelfConjugate(String),

    #[error("invalid irrep label {label} for group {group}")]
    InvalidLabel { label: String, group: String },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("seed ket {0} is annihilated by the projector")]
    AnnihilatedSeed(String),

    #[error("no content with a single semistandard tableau of shape {0}")]
    NoSingleMultiplicityContent(String),

    #[error("linear system is singular: {0}")]
    Singular(String),

    #[error("zero state")]
    ZeroState,

    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("state does not detect parity: {0}")]
    NotParityDetecting(String),
}

impl Error {
    /// True for errors caused by a size/enumeration limit rather than bad input.
    pub fn is_bound(&self) -> bool {
        matches!(self, Error::BoundExceeded { .. })
    }
}
