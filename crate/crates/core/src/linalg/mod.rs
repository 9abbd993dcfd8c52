//! Dense complex linear algebra: matrices, Hermitian eigendecomposition,
//! tolerance-aware support/null spaces and subspace intersection.
//!
//! Everything here is a pure function of its inputs. Eigenvectors carry a
//! fixed phase convention and a fixed tie order, so identical inputs give
//! bit-identical outputs.

mod eigen;
mod matrix;
mod subspace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eigen::{fix_phase, hermitian_eigendecompose, HermitianEigen};
pub use matrix::{inner, kron_vec, lexicographic_desc, norm, ComplexMatrix};
pub use subspace::{
    basis_vector, intersect, intersect_all, null_of, projector_distance, projector_from,
    support_and_null, support_of, Subspace, ORTHONORMALITY_TOL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: max |m - m†| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("negative eigenvalue {min_eigenvalue:e} below -{tolerance:e}")]
    NegativeEigenvalue { min_eigenvalue: f64, tolerance: f64 },
    #[error("ambient dimensions differ: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("zero-sized shape")]
    EmptyShape,
    #[error("basis is not orthonormal (deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },
    #[error("invalid tolerance {name} = {value}")]
    InvalidTolerance { name: &'static str, value: f64 },
}

/// Numerical thresholds shared by every decision in the crate.
///
/// States are trace-normalized, so all four thresholds are absolute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Largest accepted `‖m − m†‖_max`.
    pub hermiticity_tol: f64,
    /// Eigenvalues at or below this count as zero.
    pub eigenvalue_zero_tol: f64,
    /// Largest accepted `|tr ρ − 1|`.
    pub trace_tol: f64,
    /// Threshold for overlap-type decisions: subspace intersection, PI/PII
    /// and joint-state containment.
    pub overlap_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity_tol: 1e-9,
            eigenvalue_zero_tol: 1e-9,
            trace_tol: 1e-9,
            overlap_tol: 1e-7,
        }
    }
}

impl Tolerances {
    pub fn new(
        hermiticity_tol: f64,
        eigenvalue_zero_tol: f64,
        trace_tol: f64,
        overlap_tol: f64,
    ) -> Result<Self, LinalgError> {
        let tol = Self {
            hermiticity_tol,
            eigenvalue_zero_tol,
            trace_tol,
            overlap_tol,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<(), LinalgError> {
        for (name, value) in [
            ("hermiticity_tol", self.hermiticity_tol),
            ("eigenvalue_zero_tol", self.eigenvalue_zero_tol),
            ("trace_tol", self.trace_tol),
            ("overlap_tol", self.overlap_tol),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(LinalgError::InvalidTolerance { name, value });
            }
        }
        Ok(())
    }
}
