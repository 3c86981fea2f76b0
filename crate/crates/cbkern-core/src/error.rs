//! Crate-wide error type.

use crate::sdp::SdpStatus;
use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Operand dimensions do not match what the operation requires.
    Shape {
        expected: (usize, usize),
        got: (usize, usize),
    },
    NotSquare {
        rows: usize,
        cols: usize,
    },
    /// Hermitian input required; `residual` is the measured deviation.
    NotHermitian {
        residual: f64,
    },
    /// PSD input required; `eigenvalue` is the offending (most negative) one.
    NotPsd {
        eigenvalue: f64,
    },
    /// Kernels or maps with incompatible labels/block sizes were combined.
    Mismatch(&'static str),
    UnknownLabel(String),
    /// The semidefinite solver stopped without an optimality certificate.
    Sdp {
        status: SdpStatus,
        iterations: usize,
        gap: f64,
    },
    /// Two algebraically equivalent routes disagreed beyond tolerance.
    Inconsistent(&'static str),
    /// Iterative routine exhausted its budget.
    NoConvergence(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape { expected, got } => write!(
                f,
                "shape mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            Error::NotSquare { rows, cols } => {
                write!(f, "square matrix required, got {}x{}", rows, cols)
            }
            Error::NotHermitian { residual } => {
                write!(f, "hermitian matrix required (deviation {:.3e})", residual)
            }
            Error::NotPsd { eigenvalue } => {
                write!(f, "PSD matrix required (eigenvalue {:.6e})", eigenvalue)
            }
            Error::Mismatch(what) => write!(f, "incompatible operands: {}", what),
            Error::UnknownLabel(l) => write!(f, "unknown label: {}", l),
            Error::Sdp {
                status,
                iterations,
                gap,
            } => write!(
                f,
                "SDP solve failed: {:?} after {} iterations (gap {:.3e})",
                status, iterations, gap
            ),
            Error::Inconsistent(what) => write!(f, "internal consistency failure: {}", what),
            Error::NoConvergence(what) => write!(f, "no convergence: {}", what),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
