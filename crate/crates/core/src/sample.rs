//! Seedable random states, unitaries and subspaces for property sweeps.
//!
//! Mixed states follow `ρ = G G† / tr(G G†)` with `G` a `D × rank` matrix of
//! standard complex Gaussians.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, Subspace};
use crate::states::{DensityMatrix, PureState};

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    (0..dim).map(|_| complex_gaussian(rng)).collect()
}

/// Haar-random unit vector.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    loop {
        if let Ok(s) = PureState::normalized(gaussian_vector(rng, dim)) {
            return s;
        }
    }
}

/// Random density matrix of rank `rank` (clamped to `1..=dim`).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix {
    let rank = rank.clamp(1, dim);
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| complex_gaussian(rng));
    let m = g.matmul(&g.adjoint()).expect("shapes agree");
    let tr = m.trace().re;
    DensityMatrix::from_trusted(m.scale(1.0 / tr))
}

/// Haar-random unitary: Gram-Schmidt on Gaussian columns.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    loop {
        let cols: Vec<Vec<Complex64>> = (0..dim).map(|_| gaussian_vector(rng, dim)).collect();
        let Ok(s) = Subspace::span(dim, &cols, 1e-8) else {
            continue;
        };
        if s.dim() == dim {
            return ComplexMatrix::from_fn(dim, dim, |i, j| s.basis()[j][i]);
        }
    }
}

/// Random `k`-dimensional subspace of `C^dim`.
pub fn random_subspace<R: Rng + ?Sized>(rng: &mut R, dim: usize, k: usize) -> Subspace {
    loop {
        let vs: Vec<Vec<Complex64>> = (0..k).map(|_| gaussian_vector(rng, dim)).collect();
        if let Ok(s) = Subspace::span(dim, &vs, 1e-8) {
            if s.dim() == k.min(dim) {
                return s;
            }
        }
    }
}

/// A compatible pair built by mixing a shared pure state into two random
/// mixed states: `ρ_X = w_X |χ⟩⟨χ| + (1 − w_X) σ_X`.
///
/// Each `σ_X` has a random rank in `1..dim`, so the supports usually fall
/// short of the whole space.
pub fn random_compatible_pair<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
) -> (DensityMatrix, DensityMatrix, PureState) {
    let chi = random_pure(rng, dim);
    let side = |rng: &mut R| {
        let w: f64 = rng.gen_range(0.05..0.95);
        let rank = rng.gen_range(1..dim.max(2));
        let sigma = random_density(rng, dim, rank);
        let m = chi
            .projector()
            .scale(w)
            .add(&sigma.matrix().scale(1.0 - w))
            .expect("same dimension");
        DensityMatrix::from_trusted(m)
    };
    let a = side(rng);
    let b = side(rng);
    (a, b, chi)
}
