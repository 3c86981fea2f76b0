//! Operator-valued kernels over finite-dimensional matrix algebras.
//!
//! A kernel here assigns to every pair of points of a finite labeled set a
//! bounded linear map between matrix algebras, carried by its Choi matrix.
//! The crate classifies kernels (hermitian, completely positive, completely
//! bounded), computes their Kolmogorov decompositions as explicit matrix
//! factorizations, solves the off-diagonal completion problem by semidefinite
//! programming, and provides the finite-subset compatibility machinery for
//! extending local completions along chains.
//!
//! The crate is `no_std` (with `alloc`); IO, JSON schemas and the CLI live in
//! the companion `cbkern-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod complex;
pub mod decomp;
pub mod error;
pub mod extension;
pub mod kernel;
pub mod linalg;
pub mod linmap;
pub(crate) mod offdiag;
pub mod matrix;
pub mod rng;
pub mod sdp;

pub use complex::Complex;
pub use error::{Error, Result};
pub use linalg::DEFAULT_TOL;
pub use matrix::ComplexMatrix;
