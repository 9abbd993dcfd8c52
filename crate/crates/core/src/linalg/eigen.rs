use num_complex::Complex64;

use super::matrix::{lexicographic_desc, ComplexMatrix};
use super::{LinalgError, Tolerances};

const MAX_SWEEPS: usize = 100;

/// Spectrum of a Hermitian matrix.
///
/// `values` are sorted in descending order and `vectors[k]` is the unit
/// eigenvector for `values[k]`. Each eigenvector is phase-fixed so that its
/// largest-magnitude entry (first one, on near-ties) is real and positive.
/// Within a run of degenerate eigenvalues the vectors are ordered by
/// [`lexicographic_desc`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `Σ λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += v[i] * v[j].conj() * *lambda;
                }
            }
        }
        out
    }

    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn hermitian_eigendecompose(
    m: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<HermitianEigen, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let deviation = m.hermiticity_deviation();
    if deviation > tol.hermiticity_tol {
        return Err(LinalgError::NotHermitian {
            deviation,
            tolerance: tol.hermiticity_tol,
        });
    }
    let (values, vectors) = jacobi(m.hermitian_part());
    Ok(canonicalize(values, vectors))
}

fn off_diagonal_sq(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

fn jacobi(mut a: ComplexMatrix) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    let total: f64 = a.entries().iter().map(|z| z.norm_sqr()).sum();
    let stop = (f64::EPSILON * f64::EPSILON) * total * 1e-2;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_sq(&a) <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let values = (0..n).map(|i| a[(i, i)].re).collect();
    let vectors = (0..n)
        .map(|k| (0..n).map(|i| v[(i, k)]).collect())
        .collect();
    (values, vectors)
}

/// Zeroes `a[p][q]` with the unitary `U = diag(1, ē) · R(θ)` acting on the
/// (p, q) plane, where `e` is the phase of `a[p][q]`. Updates `a ← U† a U`
/// and accumulates `v ← v U`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if g < 1e-18 * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let e_conj = apq.conj() / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // U restricted to the (p, q) plane.
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = e_conj * (-s);
    let u_qq = e_conj * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Rotates `v` by a global phase so its dominant entry is real and positive.
pub fn fix_phase(v: &mut [Complex64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let Some(k) = v.iter().position(|z| z.norm() >= max * (1.0 - 1e-9)) else {
        return;
    };
    let phase = v[k].conj() / v[k].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[k] = Complex64::new(v[k].re, 0.0);
}

fn canonicalize(values: Vec<f64>, vectors: Vec<Vec<Complex64>>) -> HermitianEigen {
    let mut pairs: Vec<(f64, Vec<Complex64>)> = values
        .into_iter()
        .zip(vectors)
        .map(|(lambda, mut vec)| {
            fix_phase(&mut vec);
            (lambda, vec)
        })
        .collect();
    pairs.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then_with(|| lexicographic_desc(&a.1, &b.1))
    });

    let scale = pairs.iter().map(|p| p.0.abs()).fold(1.0, f64::max);
    let tie = 1e-12 * scale;
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end - 1].0 - pairs[end].0 <= tie {
            end += 1;
        }
        if end - start > 1 {
            let mut group: Vec<Vec<Complex64>> =
                pairs[start..end].iter().map(|p| p.1.clone()).collect();
            group.sort_by(|a, b| lexicographic_desc(a, b));
            for (slot, vec) in pairs[start..end].iter_mut().zip(group) {
                slot.1 = vec;
            }
        }
        start = end;
    }

    let (values, vectors) = pairs.into_iter().unzip();
    HermitianEigen { values, vectors }
}
