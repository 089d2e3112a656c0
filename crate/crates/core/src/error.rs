use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("domain error: {0}")]
    Domain(String),

    /// Lossy two-mode element requested; loss is not modelled.
    #[error("lossy element: t^2 + r^2 = {0} (must equal 1)")]
    Lossy(f64),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("invalid cascade: {0}")]
    Cascade(String),

    #[error("unknown gate or scheme `{0}`")]
    Unknown(String),
}
