//! Geometric RF sensing library: forward channel synthesis and the inverse
//! pipeline that maps indoor reflectors from angular-scan impulse responses.
//!
//! * `model` — shared domain types, unit conventions, scene description.
//! * `golay` — complementary sequence pairs and correlation-based CIR estimation.
//! * `synth` — band-limited forward channel model (the ground-truth oracle).
//! * `extract` — per-angle peak detection and dispersion statistics.
//! * `geo` — back-projection, clustering, delay-based association, curve validation.
//! * `rcs` — reference-calibrated bistatic radar cross-section estimation.
//! * `io` — scene documents and CSV serialization for every pipeline artifact.

pub mod extract;
pub mod geo;
pub mod golay;
pub mod io;
pub mod model;
pub mod rcs;
pub mod synth;

use thiserror::Error as ThisError;

/// Crate-wide error type.
#[derive(Debug, ThisError)]
pub enum Error {
    /// An argument or configuration value makes the requested operation impossible.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The data content cannot support the requested estimate (empty, silent, or inconsistent).
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    /// Underlying file-system failure.
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    /// Malformed scene document or CSV content.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateData(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
