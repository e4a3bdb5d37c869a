use thiserror::Error;

/// Errors raised while building or evaluating cells, bases and meshes.
#[derive(Debug, Error)]
pub enum Error {
    /// The input does not describe a valid convex cell or mesh.
    #[error("invalid geometry: {0}")]
    Geometry(String),

    /// A point lies outside the open cell where the rational coordinates are defined.
    #[error("point outside the open cell: {0}")]
    Domain(String),

    /// An index (vertex, edge, face, basis function) is out of range or not of the required kind.
    #[error("invalid index: {0}")]
    InvalidIndex(String),

    /// The operation only supports triangles and parallelograms.
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    /// Malformed input in the POLYMESH text format.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A linear system that should be nonsingular could not be factorized.
    #[error("singular system: {0}")]
    Singular(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
