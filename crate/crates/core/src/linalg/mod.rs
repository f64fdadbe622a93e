//! Exact linear algebra over the rationals and prime fields, plus integer
//! Smith normal form.

mod field;
mod matrix;
mod snf;
mod subspace;

pub use field::{Field, PrimeField, Rationals};
pub use matrix::Matrix;
pub use snf::{smith_decomposition, smith_normal_form, IntMatrix, SmithDecomposition};
pub use subspace::Subspace;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("ambient dimensions differ: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix powers did not stabilize within {cap} steps")]
    NoStabilization { cap: usize },
}
