//! Physically validated states: density matrices, pure states and ensembles,
//! plus the multipartite operations used by the witness protocol.
//!
//! Composite systems use row-major subsystem order throughout: in
//! `A ⊗ B ⊗ S` the leftmost factor has the largest stride.

mod multipartite;

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{
    basis_vector, hermitian_eigendecompose, inner, norm, ComplexMatrix, LinalgError, Tolerances,
};

pub use multipartite::{
    measurement_probability, partial_trace, project_and_renormalize, tensor, Composite, Conditioned,
};

/// Slack on `‖ψ‖ = 1` accepted by [`PureState::new`].
pub const PURE_NORM_TOL: f64 = 1e-10;
/// Slack on `Σ w_k = 1` accepted by [`Ensemble::new`].
pub const ENSEMBLE_SUM_TOL: f64 = 1e-9;

/// One violated density-matrix invariant together with its measured size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    NotHermitian { deviation: f64 },
    NotPsd { min_eigenvalue: f64 },
    TraceNotOne { trace: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotHermitian { deviation } => {
                write!(f, "not Hermitian (max |m - m†| = {deviation:e})")
            }
            Violation::NotPsd { min_eigenvalue } => {
                write!(
                    f,
                    "not positive semidefinite (min eigenvalue = {min_eigenvalue})"
                )
            }
            Violation::TraceNotOne { trace } => write!(f, "trace is not one (tr = {trace})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("invalid density matrix: {}", join_violations(.0))]
    InvalidDensity(Vec<Violation>),
    #[error("state vector is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },
    #[error("ensemble weight {weight} at index {index} is not in (0, 1]")]
    BadWeight { index: usize, weight: f64 },
    #[error("ensemble weights sum to {sum}, not 1")]
    WeightsDoNotSumToOne { sum: f64 },
    #[error("ensemble has no components")]
    EmptyEnsemble,
    #[error("tensor product of zero operands")]
    EmptyProduct,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("partial trace must keep at least one subsystem")]
    EmptyKeep,
    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },
    #[error("measurement outcome has probability {probability:e}; conditional state undefined")]
    ZeroProbabilityOutcome { probability: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// A Hermitian, positive-semidefinite, unit-trace operator, optionally tagged
/// with the observer it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    label: Option<String>,
}

impl DensityMatrix {
    /// Wraps a matrix that is a density matrix by construction. The
    /// anti-Hermitian rounding residue is discarded.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
            label: None,
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self, StateError> {
        let m = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        Ok(Self {
            matrix: m.hermitian_part(),
            label: self.label.clone(),
        })
    }

    /// Numerical rank at `eigenvalue_zero_tol`.
    pub fn rank(&self, tol: &Tolerances) -> Result<usize, StateError> {
        let eig = hermitian_eigendecompose(&self.matrix, tol)?;
        Ok(eig
            .values
            .iter()
            .filter(|&&l| l > tol.eigenvalue_zero_tol)
            .count())
    }
}

/// Validates `m` as a density matrix, reporting every violated invariant.
pub fn validate_density(m: &ComplexMatrix, tol: &Tolerances) -> Result<DensityMatrix, StateError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        }
        .into());
    }
    let mut violations = Vec::new();
    let deviation = m.hermiticity_deviation();
    if deviation > tol.hermiticity_tol {
        violations.push(Violation::NotHermitian { deviation });
    }
    // The PSD check runs on the Hermitian part so it is meaningful even when
    // the hermiticity check already failed.
    let hermitian = m.hermitian_part();
    let eig = hermitian_eigendecompose(&hermitian, tol)?;
    let min_eigenvalue = eig.min_value();
    if min_eigenvalue < -tol.eigenvalue_zero_tol {
        violations.push(Violation::NotPsd { min_eigenvalue });
    }
    let trace = m.trace().re;
    if (trace - 1.0).abs() > tol.trace_tol {
        violations.push(Violation::TraceNotOne { trace });
    }
    if violations.is_empty() {
        Ok(DensityMatrix {
            matrix: hermitian,
            label: None,
        })
    } else {
        Err(StateError::InvalidDensity(violations))
    }
}

/// A unit vector in `C^D`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        if amplitudes.is_empty() {
            return Err(LinalgError::EmptyShape.into());
        }
        if let Some(pos) = amplitudes
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(LinalgError::NonFinite { row: pos, col: 0 }.into());
        }
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > PURE_NORM_TOL {
            return Err(StateError::NotNormalized { norm: n });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(StateError::NotNormalized { norm: n });
        }
        amplitudes.iter_mut().for_each(|z| *z /= n);
        Self::new(amplitudes)
    }

    pub(crate) fn from_unit(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    /// Computational basis state `|k⟩` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        Self {
            amplitudes: basis_vector(dim, k),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|⟨self|other⟩|²`; insensitive to global phase.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(self.projector())
    }

    pub fn scale_phase(&self, phase: Complex64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z * phase).collect(),
        }
    }
}

/// A convex mixture of pure states, `Σ w_k |ξ_k⟩⟨ξ_k|`, with strictly
/// positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    dim: usize,
    components: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn new(components: Vec<(f64, PureState)>) -> Result<Self, StateError> {
        let dim = components.first().ok_or(StateError::EmptyEnsemble)?.1.dim();
        for (index, (w, s)) in components.iter().enumerate() {
            if s.dim() != dim {
                return Err(StateError::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
            if !(w.is_finite() && *w > 0.0 && *w <= 1.0 + ENSEMBLE_SUM_TOL) {
                return Err(StateError::BadWeight { index, weight: *w });
            }
        }
        let sum: f64 = components.iter().map(|(w, _)| w).sum();
        if (sum - 1.0).abs() > ENSEMBLE_SUM_TOL {
            return Err(StateError::WeightsDoNotSumToOne { sum });
        }
        Ok(Self { dim, components })
    }

    /// Flattens a mixture of ensembles into one ensemble of pure components.
    pub fn mix(parts: &[(f64, Ensemble)]) -> Result<Self, StateError> {
        let flat = parts
            .iter()
            .flat_map(|(w, e)| e.components.iter().map(move |(v, s)| (w * v, s.clone())))
            .filter(|(w, _)| *w > 0.0)
            .collect();
        Self::new(flat)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[(f64, PureState)] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

pub(crate) fn weighted_sum(dim: usize, terms: &[(f64, PureState)]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (w, s) in terms {
        let a = s.amplitudes();
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] += a[i] * a[j].conj() * *w;
            }
        }
    }
    m
}

/// `ρ = Σ w_k |ξ_k⟩⟨ξ_k|`.
pub fn from_ensemble(e: &Ensemble) -> DensityMatrix {
    DensityMatrix::from_trusted(weighted_sum(e.dim, &e.components))
}

/// Spectral ensemble of `rho`: eigenvectors whose eigenvalue exceeds
/// `eigenvalue_zero_tol`, weighted by their eigenvalues renormalized to sum
/// to one.
pub fn eigen_ensemble(rho: &DensityMatrix, tol: &Tolerances) -> Result<Ensemble, StateError> {
    let eig = hermitian_eigendecompose(rho.matrix(), tol)?;
    let kept: Vec<(f64, Vec<Complex64>)> = eig
        .values
        .into_iter()
        .zip(eig.vectors)
        .filter(|(l, _)| *l > tol.eigenvalue_zero_tol)
        .collect();
    let total: f64 = kept.iter().map(|(l, _)| l).sum();
    let components = kept
        .into_iter()
        .map(|(l, v)| (l / total, PureState::from_unit(v)))
        .collect();
    Ensemble::new(components)
}
