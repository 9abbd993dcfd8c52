use num_complex::Complex64;

use super::eigen::{fix_phase, hermitian_eigendecompose, HermitianEigen};
use super::matrix::{inner, norm, ComplexMatrix};
use super::{LinalgError, Tolerances};

/// Orthonormality slack accepted by [`Subspace::new`].
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// A subspace of `C^D` held as an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Complex64>>,
}

impl Subspace {
    /// Checks that `basis` is orthonormal in `C^ambient_dim`.
    pub fn new(ambient_dim: usize, basis: Vec<Vec<Complex64>>) -> Result<Self, LinalgError> {
        if ambient_dim == 0 {
            return Err(LinalgError::EmptyShape);
        }
        if basis.len() > ambient_dim {
            return Err(LinalgError::NotOrthonormal {
                deviation: f64::INFINITY,
            });
        }
        if let Some(v) = basis.iter().find(|v| v.len() != ambient_dim) {
            return Err(LinalgError::AmbientMismatch {
                left: ambient_dim,
                right: v.len(),
            });
        }
        let mut worst = 0.0_f64;
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((inner(u, v) - target).norm());
            }
        }
        if worst > ORTHONORMALITY_TOL {
            return Err(LinalgError::NotOrthonormal { deviation: worst });
        }
        Ok(Self { ambient_dim, basis })
    }

    pub(crate) fn from_orthonormal(ambient_dim: usize, basis: Vec<Vec<Complex64>>) -> Self {
        Self { ambient_dim, basis }
    }

    /// Orthonormalizes `vectors` by modified Gram-Schmidt (two passes),
    /// dropping any vector whose residual norm falls to `rank_tol` or below.
    pub fn span(
        ambient_dim: usize,
        vectors: &[Vec<Complex64>],
        rank_tol: f64,
    ) -> Result<Self, LinalgError> {
        let mut basis: Vec<Vec<Complex64>> = Vec::new();
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(LinalgError::AmbientMismatch {
                    left: ambient_dim,
                    right: v.len(),
                });
            }
            let mut w = v.clone();
            for _ in 0..2 {
                for b in &basis {
                    let c = inner(b, &w);
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= c * bi;
                    }
                }
            }
            let n = norm(&w);
            if n > rank_tol && basis.len() < ambient_dim {
                w.iter_mut().for_each(|z| *z /= n);
                fix_phase(&mut w);
                basis.push(w);
            }
        }
        Self::new(ambient_dim, basis)
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|k| basis_vector(ambient_dim, k))
            .collect();
        Self { ambient_dim, basis }
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    /// `P = Σ b_k b_k†`.
    pub fn projector(&self) -> ComplexMatrix {
        projector_from(self)
    }

    /// `‖Π v − v‖`, the distance from `v` to the subspace.
    pub fn residual(&self, v: &[Complex64]) -> f64 {
        let mut r = v.to_vec();
        for b in &self.basis {
            let c = inner(b, v);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= c * bi;
            }
        }
        norm(&r)
    }

    /// Image of the subspace under a unitary.
    pub fn transform(&self, u: &ComplexMatrix) -> Result<Self, LinalgError> {
        let basis = self
            .basis
            .iter()
            .map(|b| u.matvec(b))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.ambient_dim, basis)
    }

    /// Orthogonal complement, read off the unit eigenspace of `I − P`.
    pub fn complement(&self) -> Self {
        let q = ComplexMatrix::identity(self.ambient_dim)
            .sub(&self.projector())
            .expect("square shapes agree");
        let eig = hermitian_eigendecompose(&q, &Tolerances::default())
            .expect("complementary projector is Hermitian");
        let k = self.ambient_dim - self.dim();
        Self::from_orthonormal(self.ambient_dim, eig.vectors.into_iter().take(k).collect())
    }
}

/// `e_k` in `C^dim`.
pub fn basis_vector(dim: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[k] = Complex64::new(1.0, 0.0);
    v
}

pub fn projector_from(s: &Subspace) -> ComplexMatrix {
    let d = s.ambient_dim;
    let mut p = ComplexMatrix::zeros(d, d);
    for b in &s.basis {
        for i in 0..d {
            for j in 0..d {
                p[(i, j)] += b[i] * b[j].conj();
            }
        }
    }
    p
}

/// `‖Π_a − Π_b‖_max`; compares subspaces independently of their bases.
pub fn projector_distance(a: &Subspace, b: &Subspace) -> Result<f64, LinalgError> {
    check_ambient(a, b)?;
    a.projector().max_abs_diff(&b.projector())
}

/// Splits the spectrum of a Hermitian PSD matrix into support and null space
/// at `eigenvalue_zero_tol`.
pub fn support_and_null(
    m: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<(Subspace, Subspace, HermitianEigen), LinalgError> {
    let eig = hermitian_eigendecompose(m, tol)?;
    let min = eig.min_value();
    if min < -tol.eigenvalue_zero_tol {
        return Err(LinalgError::NegativeEigenvalue {
            min_eigenvalue: min,
            tolerance: tol.eigenvalue_zero_tol,
        });
    }
    let d = m.rows();
    let rank = eig
        .values
        .iter()
        .filter(|&&l| l > tol.eigenvalue_zero_tol)
        .count();
    let support = Subspace::from_orthonormal(d, eig.vectors[..rank].to_vec());
    let null = Subspace::from_orthonormal(d, eig.vectors[rank..].to_vec());
    Ok((support, null, eig))
}

/// `S[m]`: span of eigenvectors with eigenvalue above `eigenvalue_zero_tol`.
pub fn support_of(m: &ComplexMatrix, tol: &Tolerances) -> Result<Subspace, LinalgError> {
    support_and_null(m, tol).map(|(s, _, _)| s)
}

/// `N[m]`: orthogonal complement of [`support_of`].
pub fn null_of(m: &ComplexMatrix, tol: &Tolerances) -> Result<Subspace, LinalgError> {
    support_and_null(m, tol).map(|(_, n, _)| n)
}

fn check_ambient(a: &Subspace, b: &Subspace) -> Result<(), LinalgError> {
    if a.ambient_dim != b.ambient_dim {
        return Err(LinalgError::AmbientMismatch {
            left: a.ambient_dim,
            right: b.ambient_dim,
        });
    }
    Ok(())
}

/// `a ∩ b` as the eigenspace of `(Π_a + Π_b)/2` with eigenvalue above
/// `1 − overlap_tol`.
///
/// Off the intersection the mean projector has eigenvalues `cos²(θ/2)` for
/// the principal angles `θ > 0`, so the threshold separates exact overlap from
/// angles larger than about `2·√overlap_tol`.
pub fn intersect(a: &Subspace, b: &Subspace, tol: &Tolerances) -> Result<Subspace, LinalgError> {
    check_ambient(a, b)?;
    let d = a.ambient_dim;
    if a.is_trivial() || b.is_trivial() {
        return Ok(Subspace::empty(d));
    }
    let mean = a
        .projector()
        .add(&b.projector())
        .expect("ambient dims checked")
        .scale(0.5);
    let eig = hermitian_eigendecompose(&mean, &Tolerances::default())?;
    let basis = eig
        .values
        .iter()
        .zip(eig.vectors)
        .take_while(|(l, _)| **l > 1.0 - tol.overlap_tol)
        .map(|(_, v)| v)
        .collect();
    Ok(Subspace::from_orthonormal(d, basis))
}

/// Left fold of [`intersect`] over `subspaces`. An empty list is rejected
/// since the ambient dimension would be unknown.
pub fn intersect_all(subspaces: &[Subspace], tol: &Tolerances) -> Result<Subspace, LinalgError> {
    let (first, rest) = subspaces.split_first().ok_or(LinalgError::EmptyShape)?;
    rest.iter()
        .try_fold(first.clone(), |acc, s| intersect(&acc, s, tol))
}
