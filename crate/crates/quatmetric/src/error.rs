//! Error types shared across the crate.

use thiserror::Error;

/// Reason why a matrix fails the quasianti-Hermiticity hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotQuasiAntiHermitianReason {
    /// The matrix is not diagonalizable (Jordan structure detected).
    NonDiagonalizable,
    /// The spectrum has a real part beyond tolerance.
    RealSpectrumPart,
}

impl std::fmt::Display for NotQuasiAntiHermitianReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NonDiagonalizable => write!(f, "non-diagonalizable"),
            Self::RealSpectrumPart => write!(f, "real spectrum part"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("quaternion modulus below invertibility threshold")]
    ZeroDivisor,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is numerically singular")]
    Singular,

    #[error("complex matrix is not in symplectic block form")]
    NotSymplecticBlockForm,

    #[error("embedding eigenvalues failed to pair into conjugate classes")]
    EmbeddingSpectrumAsymmetric,

    #[error("operator is not quasianti-Hermitian: {reason}")]
    NotQuasiAntiHermitian { reason: NotQuasiAntiHermitianReason },

    #[error("2x2 matrix is not in Cayley-Klein form")]
    NotCKForm,

    #[error("invalid model configuration: {0}")]
    ConfigInvalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
