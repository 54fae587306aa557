//! Error type shared by the library.

/// Errors reported by the segmentation library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An image failed structural validation (dims/data mismatch, value range).
    #[error("invalid image: {0}")]
    InvalidImage(String),
    /// Incompatible configuration (connectivity/dimension mismatch, bad tile
    /// sizes, zero layers, ...).
    #[error("invalid configuration: {0}")]
    Config(String),
    /// An argument was outside its documented domain.
    #[error("invalid input: {0}")]
    Input(String),
    /// An internal invariant was violated; indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
