//! Compatibility decisions between state assignments.
//!
//! Two or more density matrices are compatible when their supports share a
//! nonzero vector. The Peierls criteria (PI: the states commute; PII: their
//! product is nonzero) are computed alongside for comparison.

use thiserror::Error;

use crate::linalg::{
    hermitian_eigendecompose, intersect_all, support_and_null, support_of, ComplexMatrix,
    LinalgError, Subspace, Tolerances,
};
use crate::states::{DensityMatrix, PureState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompatError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("compatibility needs at least two states, got {count}")]
    FewerThanTwoStates { count: usize },
    #[error("state {index} is not pure (numerical rank {rank})")]
    NotPure { index: usize, rank: usize },
    #[error("no observer states given")]
    NoObservers,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Outcome of [`check_bfm`].
///
/// For more than two states the PI/PII fields aggregate over all pairs:
/// verdicts are conjunctions, `commutator_norm` is the largest pairwise
/// commutator and `product_norm` the smallest pairwise product. That
/// aggregation is flagged by `pairwise_aggregated`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatReport {
    pub verdict_bfm: bool,
    pub verdict_pi: bool,
    pub verdict_pii: bool,
    pub intersection_dim: usize,
    pub intersection_basis: Subspace,
    pub commutator_norm: f64,
    pub product_norm: f64,
    pub observers: usize,
    pub pairwise_aggregated: bool,
    pub tolerances_used: Tolerances,
}

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<(), CompatError> {
    if a.dim() != b.dim() {
        return Err(CompatError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

fn product(a: &DensityMatrix, b: &DensityMatrix) -> ComplexMatrix {
    a.matrix().matmul(b.matrix()).expect("dimensions checked")
}

/// PI: `‖ρ_A ρ_B − ρ_B ρ_A‖_max ≤ overlap_tol`. Returns the verdict and the
/// commutator norm.
pub fn check_pi(
    a: &DensityMatrix,
    b: &DensityMatrix,
    tol: &Tolerances,
) -> Result<(bool, f64), CompatError> {
    same_dim(a, b)?;
    let norm = product(a, b).max_abs_diff(&product(b, a))?;
    Ok((norm <= tol.overlap_tol, norm))
}

/// PII: `‖ρ_A ρ_B‖_max > overlap_tol`. Returns the verdict and the product norm.
pub fn check_pii(
    a: &DensityMatrix,
    b: &DensityMatrix,
    tol: &Tolerances,
) -> Result<(bool, f64), CompatError> {
    same_dim(a, b)?;
    let norm = product(a, b).max_abs();
    Ok((norm > tol.overlap_tol, norm))
}

/// Support-intersection criterion for any number (≥ 2) of observers.
pub fn check_bfm(states: &[DensityMatrix], tol: &Tolerances) -> Result<CompatReport, CompatError> {
    if states.len() < 2 {
        return Err(CompatError::FewerThanTwoStates {
            count: states.len(),
        });
    }
    for s in &states[1..] {
        same_dim(&states[0], s)?;
    }
    let supports = states
        .iter()
        .map(|s| support_of(s.matrix(), tol))
        .collect::<Result<Vec<_>, _>>()?;
    let intersection = intersect_all(&supports, tol)?;

    let mut verdict_pi = true;
    let mut verdict_pii = true;
    let mut commutator_norm = 0.0_f64;
    let mut product_norm = f64::INFINITY;
    for (i, a) in states.iter().enumerate() {
        for b in &states[i + 1..] {
            let (pi, c) = check_pi(a, b, tol)?;
            let (pii, p) = check_pii(a, b, tol)?;
            verdict_pi &= pi;
            verdict_pii &= pii;
            commutator_norm = commutator_norm.max(c);
            product_norm = product_norm.min(p);
        }
    }

    Ok(CompatReport {
        verdict_bfm: !intersection.is_trivial(),
        verdict_pi,
        verdict_pii,
        intersection_dim: intersection.dim(),
        intersection_basis: intersection,
        commutator_norm,
        product_norm,
        observers: states.len(),
        pairwise_aggregated: states.len() > 2,
        tolerances_used: *tol,
    })
}

fn pure_vector(
    index: usize,
    rho: &DensityMatrix,
    tol: &Tolerances,
) -> Result<PureState, CompatError> {
    let eig = hermitian_eigendecompose(rho.matrix(), tol)?;
    let rank = eig
        .values
        .iter()
        .filter(|&&l| l > tol.eigenvalue_zero_tol)
        .count();
    if rank != 1 {
        return Err(CompatError::NotPure { index, rank });
    }
    Ok(PureState::from_unit(
        eig.vectors.into_iter().next().expect("rank one"),
    ))
}

/// Pure-state special case: two rank-one assignments are compatible iff they
/// are the same ray, `|⟨ψ_a|ψ_b⟩|² ≥ 1 − overlap_tol`.
pub fn check_pure_pair(
    a: &DensityMatrix,
    b: &DensityMatrix,
    tol: &Tolerances,
) -> Result<bool, CompatError> {
    same_dim(a, b)?;
    let psi_a = pure_vector(0, a, tol)?;
    let psi_b = pure_vector(1, b, tol)?;
    Ok(psi_a.fidelity(&psi_b) >= 1.0 - tol.overlap_tol)
}

/// Outcome of [`verify_joint`].
#[derive(Debug, Clone, PartialEq)]
pub struct JointCheck {
    pub accepted: bool,
    /// `‖(I − Π_∩) Π_J‖_max`.
    pub support_excess: f64,
    /// Per observer `k`, `‖Π_{N_k} ρ_J Π_{N_k}‖_max`: the weight the joint
    /// state puts on outcomes observer `k` ruled out.
    pub null_leakage: Vec<f64>,
    pub intersection_dim: usize,
}

/// Checks the constraint a pooled assignment must satisfy: its support lies
/// inside every observer's support, equivalently it vanishes on every
/// observer's null space.
pub fn verify_joint(
    joint: &DensityMatrix,
    observers: &[DensityMatrix],
    tol: &Tolerances,
) -> Result<JointCheck, CompatError> {
    if observers.is_empty() {
        return Err(CompatError::NoObservers);
    }
    for o in observers {
        same_dim(joint, o)?;
    }
    let d = joint.dim();
    let mut supports = Vec::with_capacity(observers.len());
    let mut null_leakage = Vec::with_capacity(observers.len());
    for o in observers {
        let (support, null, _) = support_and_null(o.matrix(), tol)?;
        let pn = null.projector();
        let restricted = pn.matmul(joint.matrix())?.matmul(&pn)?;
        null_leakage.push(restricted.max_abs());
        supports.push(support);
    }
    let intersection = intersect_all(&supports, tol)?;
    let outside = ComplexMatrix::identity(d).sub(&intersection.projector())?;
    let joint_support = support_of(joint.matrix(), tol)?;
    let support_excess = outside.matmul(&joint_support.projector())?.max_abs();
    Ok(JointCheck {
        accepted: support_excess <= tol.overlap_tol,
        support_excess,
        null_leakage,
        intersection_dim: intersection.dim(),
    })
}

/// `Π_∩ ρ Π_∩ / tr(·)`: the part of `rho` living on the common support of
/// `observers`. `None` when that part has no weight.
pub fn restrict_to_intersection(
    rho: &DensityMatrix,
    observers: &[DensityMatrix],
    tol: &Tolerances,
) -> Result<Option<DensityMatrix>, CompatError> {
    let supports = observers
        .iter()
        .map(|o| support_of(o.matrix(), tol))
        .collect::<Result<Vec<_>, _>>()?;
    let p = intersect_all(&supports, tol)?.projector();
    let m = p.matmul(rho.matrix())?.matmul(&p)?;
    let tr = m.trace().re;
    if tr <= tol.eigenvalue_zero_tol {
        return Ok(None);
    }
    Ok(Some(DensityMatrix::from_trusted(m.scale(1.0 / tr))))
}
