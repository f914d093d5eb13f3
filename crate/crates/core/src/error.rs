use thiserror::Error;

/// Crate-wide error type.
///
/// Variants mirror the pipeline stages: invalid input geometry, meshing
/// failures, operator assembly failures, eigensolver failures, kernel
/// counts that cannot be certified, and configuration/IO problems.
#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry: {0}")]
    Geometry(String),

    #[error("refinement: {0}")]
    Refinement(String),

    #[error("assembly: {0}")]
    Assembly(String),

    #[error("solver: {0}")]
    Solver(String),

    /// The spectrum near zero has no decisive gap, so the kernel dimension
    /// cannot be read off with confidence. Callers must treat this as a
    /// first-class outcome, not a panic.
    #[error("ambiguous kernel: {0}")]
    AmbiguousKernel(String),

    #[error("config: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }
    pub fn refinement(msg: impl Into<String>) -> Self {
        Error::Refinement(msg.into())
    }
    pub fn assembly(msg: impl Into<String>) -> Self {
        Error::Assembly(msg.into())
    }
    pub fn solver(msg: impl Into<String>) -> Self {
        Error::Solver(msg.into())
    }
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
