//! Small dense and banded solvers plus a Newton iteration.
//!
//! These back the implicit steppers in [`crate::problems`]; users with their
//! own solver libraries never need them.

mod banded;
mod dense;
mod newton;

pub use banded::{solve_banded, BandedMatrix, BandedSystem};
pub use dense::{solve_dense, DenseMatrix};
pub use newton::{newton_solve, Damping, JacobianSolve, NewtonConfig, NewtonReport};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is singular to working precision (pivot {pivot:e} in column {column})")]
    Singular { column: usize, pivot: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual_norm:e})")]
    NoConvergence {
        iterations: usize,
        residual_norm: f64,
    },
    #[error("invalid Newton configuration: {0}")]
    InvalidConfig(&'static str),
}

pub(crate) fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}
