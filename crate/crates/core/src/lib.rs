//! conekit: exact and certificate-producing computations with finite-dimensional
//! convex cones, level-indexed conic systems, and completely positive maps.
//!
//! The crate is organised around a small number of building blocks:
//!
//! - [`linalg`] — dense exact-rational and floating-point linear algebra,
//!   Kronecker products, the Hermitian coordinate space and its real embedding,
//!   an exact psd test and a Jacobi eigensolver.
//! - [`cones`] — representations of closed convex cones (generators, halfspaces,
//!   simplex, Lorentz, psd, lazy tensor nodes), exact polyhedral duality via
//!   double description, membership with certificates, and minimal/maximal
//!   tensor products.
//! - [`systems`] — level-indexed cone families over the simplex, operator and
//!   TFT stems: smallest/largest extensions, duals, and system operations.
//! - [`cpmaps`] — Choi matrices, Choi–Kraus extraction, complete positivity,
//!   k-positivity and entanglement-breaking verdicts.
//! - [`extension`] — the exact LP engine with Farkas certificates, scalar and
//!   vector-valued Riesz extension, finite-group invariant extension, and the
//!   numeric Arveson extension solver.
//! - [`tft`] — the one-dimensional TFT cone family: pairing cones B(k), their
//!   dual evaluation cones A(k), and the tensor-product strictness witness.
//!
//! Decision problems that are hard in general (separability, block-positivity,
//! k-positivity) return a three-valued [`Verdict`] carrying machine-checkable
//! certificates; everything polyhedral is decided exactly over the rationals.

pub mod cones;
pub mod cpmaps;
pub mod extension;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod systems;
pub mod tft;
pub mod verdict;

pub use scalar::Rational;
pub use verdict::{Certificate, Verdict};

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("group axiom violated: {0}")]
    GroupClosure(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
