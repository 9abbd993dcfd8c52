use num_complex::Complex64;

use super::{DensityMatrix, PureState, StateError};
use crate::linalg::{kron_vec, norm, ComplexMatrix, Tolerances};

/// States that combine under the Kronecker product.
pub trait Composite: Sized {
    fn dim(&self) -> usize;
    fn kron(&self, rhs: &Self) -> Self;
}

impl Composite for PureState {
    fn dim(&self) -> usize {
        PureState::dim(self)
    }

    fn kron(&self, rhs: &Self) -> Self {
        PureState::from_unit(kron_vec(self.amplitudes(), rhs.amplitudes()))
    }
}

impl Composite for DensityMatrix {
    fn dim(&self) -> usize {
        DensityMatrix::dim(self)
    }

    fn kron(&self, rhs: &Self) -> Self {
        DensityMatrix::from_trusted(self.matrix().kron(rhs.matrix()))
    }
}

/// Kronecker product of `states` in the given order.
pub fn tensor<T: Composite + Clone>(states: &[T]) -> Result<T, StateError> {
    let (first, rest) = states.split_first().ok_or(StateError::EmptyProduct)?;
    Ok(rest.iter().fold(first.clone(), |acc, s| acc.kron(s)))
}

fn check_dims(dims: &[usize], total: usize) -> Result<(), StateError> {
    let product: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || product != total {
        return Err(StateError::DimensionMismatch {
            expected: total,
            found: product,
        });
    }
    Ok(())
}

/// Row-major digits of `index` in the mixed radix `dims`.
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

fn compose(digits: impl Iterator<Item = (usize, usize)>) -> usize {
    digits.fold(0, |acc, (d, radix)| acc * radix + d)
}

/// Reduced state on the subsystems listed in `keep`, tracing out the rest.
///
/// The result keeps the kept subsystems in ascending index order regardless of
/// the order in `keep`.
pub fn partial_trace(
    rho: &DensityMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<DensityMatrix, StateError> {
    check_dims(dims, rho.dim())?;
    if keep.is_empty() {
        return Err(StateError::EmptyKeep);
    }
    if let Some(&index) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(StateError::SubsystemOutOfRange {
            index,
            count: dims.len(),
        });
    }
    let kept: Vec<bool> = (0..dims.len()).map(|k| keep.contains(&k)).collect();
    let out_dim: usize = dims
        .iter()
        .zip(&kept)
        .filter(|(_, &k)| k)
        .map(|(d, _)| d)
        .product();
    let n = rho.dim();
    let m = rho.matrix();

    let mut di = vec![0; dims.len()];
    let mut dj = vec![0; dims.len()];
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for i in 0..n {
        digits(i, dims, &mut di);
        for j in 0..n {
            digits(j, dims, &mut dj);
            let traced_match = (0..dims.len()).all(|k| kept[k] || di[k] == dj[k]);
            if !traced_match {
                continue;
            }
            let row = compose(
                (0..dims.len())
                    .filter(|&k| kept[k])
                    .map(|k| (di[k], dims[k])),
            );
            let col = compose(
                (0..dims.len())
                    .filter(|&k| kept[k])
                    .map(|k| (dj[k], dims[k])),
            );
            out[(row, col)] += m[(i, j)];
        }
    }
    Ok(DensityMatrix::from_trusted(out))
}

/// Outcome of a projective measurement on one subsystem of a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct Conditioned {
    pub probability: f64,
    /// Conditional state on the remaining subsystems, in their original order.
    pub state: PureState,
}

/// `(⟨outcome| ⊗ I_rest)|ψ⟩`, unnormalized.
fn contract(
    psi: &PureState,
    dims: &[usize],
    subsystem: usize,
    outcome: &PureState,
) -> Result<Vec<Complex64>, StateError> {
    check_dims(dims, psi.dim())?;
    if subsystem >= dims.len() {
        return Err(StateError::SubsystemOutOfRange {
            index: subsystem,
            count: dims.len(),
        });
    }
    if outcome.dim() != dims[subsystem] {
        return Err(StateError::DimensionMismatch {
            expected: dims[subsystem],
            found: outcome.dim(),
        });
    }
    let rest_dim = psi.dim() / dims[subsystem];
    let mut out = vec![Complex64::new(0.0, 0.0); rest_dim];
    let mut d = vec![0; dims.len()];
    for (i, amp) in psi.amplitudes().iter().enumerate() {
        digits(i, dims, &mut d);
        let r = compose(
            (0..dims.len())
                .filter(|&k| k != subsystem)
                .map(|k| (d[k], dims[k])),
        );
        out[r] += outcome.amplitudes()[d[subsystem]].conj() * amp;
    }
    Ok(out)
}

/// `‖(⟨outcome| ⊗ I_rest)|ψ⟩‖²`.
pub fn measurement_probability(
    psi: &PureState,
    dims: &[usize],
    subsystem: usize,
    outcome: &PureState,
) -> Result<f64, StateError> {
    let v = contract(psi, dims, subsystem, outcome)?;
    Ok(norm(&v).powi(2))
}

/// Projects `subsystem` of `psi` onto `outcome` and renormalizes.
///
/// Fails with [`StateError::ZeroProbabilityOutcome`] when the outcome
/// probability is at or below `eigenvalue_zero_tol`.
pub fn project_and_renormalize(
    psi: &PureState,
    dims: &[usize],
    subsystem: usize,
    outcome: &PureState,
    tol: &Tolerances,
) -> Result<Conditioned, StateError> {
    let mut v = contract(psi, dims, subsystem, outcome)?;
    let n = norm(&v);
    let probability = n * n;
    if probability <= tol.eigenvalue_zero_tol {
        return Err(StateError::ZeroProbabilityOutcome { probability });
    }
    v.iter_mut().for_each(|z| *z /= n);
    Ok(Conditioned {
        probability,
        state: PureState::from_unit(v),
    })
}
