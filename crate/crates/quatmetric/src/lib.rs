//! Quaternionic linear algebra and metric-operator toolkit.
//!
//! Modules:
//! - [`quat`]: Hamilton quaternions with the symplectic split q = a + b·j.
//! - [`qmatrix`]: dense quaternionic matrices/vectors over a right
//!   quaternionic Hilbert space, plus the complex symplectic embedding.
//! - [`spectral`]: right-eigenvalue decomposition via the embedding.
//! - [`metric`]: metric operators for quasianti-Hermitian families,
//!   commutants, irreducibility, and biorthonormal systems.
//! - [`dynamics`]: the two-level model with a time-dependent drive and its
//!   Cayley-Klein integrator.
//! - [`verify`]: the named invariant suite.
//! - [`cli`]: the `quatmetric` command-line interface.
//! - [`sample`]: seeded random generators shared by tests and the suite.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod metric;
pub mod qmatrix;
pub mod quat;
pub mod sample;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use qmatrix::{QMatrix, QVector};
pub use quat::Quaternion;
