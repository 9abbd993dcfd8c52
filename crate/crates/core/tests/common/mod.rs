//! Independent oracles and generators shared by the integration suites.
//!
//! The oracles avoid the crate's eigensolver: subspace intersection and PSD
//! membership are decided by Gaussian elimination instead.

#![allow(dead_code, clippy::needless_range_loop)]

pub mod corpus;

use num_complex::Complex64;
use qcompat::linalg::{basis_vector, ComplexMatrix, Subspace};
use qcompat::sample::{gaussian_vector, random_density, random_pure};
use qcompat::states::{DensityMatrix, PureState};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Null space of `m` by Gaussian elimination with complete pivoting.
/// Pivots at or below `pivot_tol` end the elimination.
pub fn null_space_by_elimination(m: &ComplexMatrix, pivot_tol: f64) -> Vec<Vec<Complex64>> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<Complex64>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    let mut col_perm: Vec<usize> = (0..cols).collect();
    let mut rank = 0;
    while rank < rows.min(cols) {
        let mut best = (0.0, rank, rank);
        for i in rank..rows {
            for j in rank..cols {
                let v = a[i][j].norm();
                if v > best.0 {
                    best = (v, i, j);
                }
            }
        }
        if best.0 <= pivot_tol {
            break;
        }
        a.swap(rank, best.1);
        for row in a.iter_mut() {
            row.swap(rank, best.2);
        }
        col_perm.swap(rank, best.2);
        let pivot = a[rank][rank];
        for j in rank..cols {
            a[rank][j] /= pivot;
        }
        for i in 0..rows {
            if i != rank {
                let f = a[i][rank];
                if f != c(0.0, 0.0) {
                    for j in rank..cols {
                        let v = a[rank][j];
                        a[i][j] -= f * v;
                    }
                }
            }
        }
        rank += 1;
    }
    // Reduced form [I F; 0 0] in permuted columns: free variable k gives
    // x_pivot = −F[:, k], x_free = e_k.
    let mut out = Vec::new();
    for free in rank..cols {
        let mut x = vec![c(0.0, 0.0); cols];
        x[col_perm[free]] = c(1.0, 0.0);
        for p in 0..rank {
            x[col_perm[p]] = -a[p][free];
        }
        out.push(x);
    }
    out
}

/// Intersection oracle: null space of `(I − Π_a) + (I − Π_b)`.
pub fn intersection_oracle(a: &Subspace, b: &Subspace) -> Subspace {
    let d = a.ambient_dim();
    let id = ComplexMatrix::identity(d);
    let m = id
        .sub(&a.projector())
        .unwrap()
        .add(&id.sub(&b.projector()).unwrap())
        .unwrap();
    let null = null_space_by_elimination(&m, 1e-9);
    Subspace::span(d, &null, 1e-9).unwrap()
}

/// PSD test by diagonally pivoted Cholesky. Fails as soon as a pivot drops
/// below `−tol`, or when the leftover block has only tiny diagonals but
/// off-diagonal entries that are not.
pub fn is_psd_by_cholesky(m: &ComplexMatrix, tol: f64) -> bool {
    let n = m.rows();
    let mut a: Vec<Vec<Complex64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut remaining: Vec<usize> = (0..n).collect();
    while !remaining.is_empty() {
        let (pos, k) = remaining
            .iter()
            .copied()
            .enumerate()
            .max_by(|x, y| a[x.1][x.1].re.total_cmp(&a[y.1][y.1].re))
            .unwrap();
        let d = a[k][k].re;
        if d < -tol {
            return false;
        }
        if d <= tol {
            return remaining.iter().all(|&i| {
                remaining
                    .iter()
                    .all(|&j| i == j || a[i][j].norm() <= tol.sqrt() * 1e-3 + tol)
                    && a[i][i].re >= -tol
            });
        }
        remaining.remove(pos);
        for &i in &remaining {
            for &j in &remaining {
                let v = a[i][k] * a[k][j] / d;
                a[i][j] -= v;
            }
        }
    }
    true
}

/// Bisection for the largest `p ∈ [0, 1]` keeping `ρ − p|χ⟩⟨χ|` PSD.
pub fn psd_line_search(rho: &DensityMatrix, chi: &PureState) -> f64 {
    let p_chi = chi.projector();
    let psd = |p: f64| is_psd_by_cholesky(&rho.matrix().sub(&p_chi.scale(p)).unwrap(), 1e-12);
    if psd(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if psd(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Random pair of subspaces of `C^d`, sometimes with `k` planted shared
/// directions.
pub fn random_subspace_pair<R: Rng>(rng: &mut R, d: usize) -> (Subspace, Subspace) {
    let shared = rng.gen_range(0..=d.min(3));
    let extra_a = rng.gen_range(0..=(d - shared));
    let extra_b = rng.gen_range(0..=(d - shared));
    let common: Vec<Vec<Complex64>> = (0..shared).map(|_| gaussian_vector(rng, d)).collect();
    let mut va = common.clone();
    va.extend((0..extra_a).map(|_| gaussian_vector(rng, d)));
    let mut vb = common;
    vb.extend((0..extra_b).map(|_| gaussian_vector(rng, d)));
    (
        Subspace::span(d, &va, 1e-8).unwrap(),
        Subspace::span(d, &vb, 1e-8).unwrap(),
    )
}

/// Random state of random rank, including pure states.
pub fn random_state<R: Rng>(rng: &mut R, d: usize) -> DensityMatrix {
    let rank = rng.gen_range(1..=d);
    random_density(rng, d, rank)
}

/// Random `χ` inside the support of a random rank-deficient state.
pub fn random_state_with_member<R: Rng>(rng: &mut R, d: usize) -> (DensityMatrix, PureState) {
    let rho = random_state(rng, d);
    let support = qcompat::linalg::support_of(rho.matrix(), &Default::default()).unwrap();
    let coeffs: Vec<Complex64> = gaussian_vector(rng, support.dim());
    let mut v = vec![c(0.0, 0.0); d];
    for (k, b) in coeffs.iter().zip(support.basis()) {
        for (vi, bi) in v.iter_mut().zip(b) {
            *vi += k * bi;
        }
    }
    (rho, PureState::normalized(v).unwrap())
}

pub fn random_pure_pair<R: Rng>(rng: &mut R, d: usize) -> (PureState, PureState) {
    (random_pure(rng, d), random_pure(rng, d))
}

pub fn e(d: usize, k: usize) -> Vec<Complex64> {
    basis_vector(d, k)
}

/// `ρ_A = |0⟩⟨0|`, `ρ_B = ½|0⟩⟨0| + ½|+⟩⟨+|`.
pub fn counterexample() -> (DensityMatrix, DensityMatrix) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = PureState::basis(2, 0);
    let phi = PureState::new(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
    let b = qcompat::states::from_ensemble(
        &qcompat::states::Ensemble::new(vec![(0.5, psi.clone()), (0.5, phi)]).unwrap(),
    );
    (psi.density(), b)
}
