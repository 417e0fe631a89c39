//! Dense numerical simulator for quantum principal component analysis.
//!
//! The crate builds everything from one substrate ([`linalg`]):
//!
//! - [`dmexp`]: density-matrix exponentiation by repeated partial swaps with
//!   fresh copies of `ρ`, plus the exact conjugation it approximates.
//! - [`qpca`]: phase estimation driven by `e^{-iρt}`, sampling of the
//!   resulting eigenvalue/eigenvector mixture, principal components.
//! - [`gram`]: loading classical vectors and building the purification whose
//!   reduced states are the Gram and covariance matrices.
//! - [`choi`]: Kraus channels and their Choi states.
//! - [`discrim`]: assigning a state to one of two clusters by the sign of
//!   an eigenvalue of `ρ − σ`.

pub mod choi;
pub mod discrim;
pub mod dmexp;
pub mod error;
pub mod gram;
pub mod linalg;
pub mod qpca;
pub mod random;

pub use error::{Error, Result};
