use thiserror::Error;

use crate::precubical::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("invalid precubical set:\n{0}")]
    Invalid(ValidationReport),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown cell `{0}`")]
    UnknownCell(String),

    #[error("paths are not composable: {0}")]
    Composability(String),

    #[error("{what}: {count} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, count: usize, cap: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("not a chain map: {0}")]
    NotAChainMap(String),

    #[error("persistence module has no stabilization tail")]
    NotStabilized,

    #[error("embedding is not strictly monotone at position {0}")]
    NonMonotone(usize),

    #[error("not a chain: {0}")]
    NotAChain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("colimit order is not antisymmetric: classes {0} and {1} are mutually below each other")]
    Antisymmetry(usize, usize),

    #[error("matrix is not invertible: {0}")]
    NotInvertible(String),

    #[error("identified elements carry spaces of different dimension: {0}")]
    ClassDimension(String),

    #[error("diagram is not coherent: {0}")]
    Incoherent(String),

    #[error("ill-typed relation: {0}")]
    IllTypedRelation(String),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
