use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("truncation order mismatch: {left} vs {right}")]
    TruncationMismatch { left: u32, right: u32 },
    #[error("variable count mismatch: {left} vs {right}")]
    VariableMismatch { left: usize, right: usize },
    #[error("degree {degree} is out of range (truncation order {truncation})")]
    DegreeOutOfRange { degree: u32, truncation: u32 },
    #[error("constant term is singular")]
    SingularConstantTerm,
    #[error("constant term must vanish")]
    NonzeroConstantTerm,
    #[error("constant term must be the identity")]
    NotUnipotent,
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("group constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("{0} is not in the subspace")]
    NotInSubspace(String),
    #[error("guardrail: {columns} basis columns exceed the limit of {limit}")]
    Guardrail { columns: usize, limit: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse { line: usize, col: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
