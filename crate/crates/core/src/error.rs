use thiserror::Error;

/// Errors raised by the tomography library.
#[derive(Debug, Error)]
pub enum Error {
    /// A grid or job parameter is invalid (bad point count, non-positive ħ, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The symplectic matrix has a singular upper-right block.
    #[error("symplectic matrix is not free (det B = 0)")]
    NotFree,

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Matrix or array shapes do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Tomograms are inconsistent with a pure Gaussian state.
    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("ambiguous reconstruction: {0}")]
    Ambiguous(String),

    /// An internal consistency check failed.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
