//! Constructive side of compatibility.
//!
//! For a compatible pair `(ρ_A, ρ_B)` this module finds a pure state `|χ⟩`
//! common to both supports, splits each state as
//!
//! ```text
//! ρ_A = p0 |χ⟩⟨χ| + Σ_i p_i |ψ_i⟩⟨ψ_i|
//! ρ_B = q0 |χ⟩⟨χ| + Σ_j q_j |φ_j⟩⟨φ_j|
//! ```
//!
//! and assembles the tripartite state on `H_A ⊗ H_B ⊗ H_S`
//!
//! ```text
//! |Ψ⟩ = n · ( |0⟩|0⟩|χ⟩ + Σ_i √(p_i/p0) |0⟩|i⟩|ψ_i⟩ + Σ_j √(q_j/q0) |j⟩|0⟩|φ_j⟩ )
//! ```
//!
//! Projecting ancilla A onto `|0⟩` leaves `ρ_A` on the system, projecting
//! ancilla B onto `|0⟩` leaves `ρ_B`, and doing both leaves `|χ⟩`.

use num_complex::Complex64;
use thiserror::Error;

use crate::compat::CompatError;
use crate::linalg::{
    hermitian_eigendecompose, intersect, lexicographic_desc, support_and_null, support_of,
    LinalgError, Tolerances,
};
use crate::states::{
    partial_trace, project_and_renormalize, weighted_sum, DensityMatrix, PureState, StateError,
};

/// Slack on the weight sums `p0 + Σ p_i = 1` and `q0 + Σ q_j = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;
/// Largest accepted `‖Π_S χ − χ‖` for a vector to count as inside a support.
pub const SUPPORT_MEMBERSHIP_TOL: f64 = 1e-8;
/// Round-trip accuracy of [`simulate_protocol`] against the decomposition.
pub const ROUND_TRIP_TOL: f64 = 1e-8;
/// Slack on `1/n² = 1/p0 + 1/q0 − 1`.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WitnessError {
    #[error("states are incompatible: supports have trivial intersection")]
    Incompatible,
    #[error("common state lies outside the support (distance {distance:e})")]
    ChiOutsideSupport { distance: f64 },
    #[error("invalid shared decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("invalid witness state: {0}")]
    InvalidWitness(String),
    #[error(transparent)]
    Compat(#[from] CompatError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Two decompositions sharing the pure state `chi` with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedDecomposition {
    pub chi: PureState,
    pub p0: f64,
    pub q0: f64,
    pub rest_a: Vec<(f64, PureState)>,
    pub rest_b: Vec<(f64, PureState)>,
}

impl SharedDecomposition {
    /// Checks dimensions, positivity of every weight and the two weight sums.
    pub fn validate(&self) -> Result<(), WitnessError> {
        let bad = |msg: String| Err(WitnessError::InvalidDecomposition(msg));
        let d = self.chi.dim();
        for (name, w0, rest) in [("p0", self.p0, &self.rest_a), ("q0", self.q0, &self.rest_b)] {
            if !(w0.is_finite() && w0 > 0.0 && w0 <= 1.0 + WEIGHT_SUM_TOL) {
                return bad(format!("{name} = {w0} is not in (0, 1]"));
            }
            if let Some((w, _)) = rest.iter().find(|(w, _)| !(w.is_finite() && *w > 0.0)) {
                return bad(format!("non-positive weight {w} next to {name}"));
            }
            if let Some((_, s)) = rest.iter().find(|(_, s)| s.dim() != d) {
                return bad(format!(
                    "component of dimension {} next to {name}, expected {d}",
                    s.dim()
                ));
            }
            let sum = w0 + rest.iter().map(|(w, _)| w).sum::<f64>();
            if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
                return bad(format!("weights with {name} sum to {sum}"));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.chi.dim()
    }

    /// `p0 |χ⟩⟨χ| + Σ p_i |ψ_i⟩⟨ψ_i|`.
    pub fn rho_a(&self) -> DensityMatrix {
        self.side(self.p0, &self.rest_a)
    }

    /// `q0 |χ⟩⟨χ| + Σ q_j |φ_j⟩⟨φ_j|`.
    pub fn rho_b(&self) -> DensityMatrix {
        self.side(self.q0, &self.rest_b)
    }

    fn side(&self, w0: f64, rest: &[(f64, PureState)]) -> DensityMatrix {
        let mut terms = Vec::with_capacity(rest.len() + 1);
        terms.push((w0, self.chi.clone()));
        terms.extend_from_slice(rest);
        DensityMatrix::from_trusted(weighted_sum(self.dim(), &terms))
    }
}

/// Picks a unit vector in `S[a] ∩ S[b]`: the intersection basis vector
/// maximizing `min(⟨χ|a|χ⟩, ⟨χ|b|χ⟩)`, ties broken lexicographically.
pub fn choose_common_state(
    a: &DensityMatrix,
    b: &DensityMatrix,
    tol: &Tolerances,
) -> Result<PureState, WitnessError> {
    if a.dim() != b.dim() {
        return Err(CompatError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        }
        .into());
    }
    let common = intersect(
        &support_of(a.matrix(), tol)?,
        &support_of(b.matrix(), tol)?,
        tol,
    )?;
    let mut best: Option<(f64, &Vec<Complex64>)> = None;
    for v in common.basis() {
        let score = a.matrix().expectation(v)?.min(b.matrix().expectation(v)?);
        best = match best {
            None => Some((score, v)),
            Some((s, w)) => {
                let better = score > s + 1e-12
                    || ((score - s).abs() <= 1e-12 && lexicographic_desc(v, w).is_lt());
                if better {
                    Some((score, v))
                } else {
                    Some((s, w))
                }
            }
        };
    }
    let (_, v) = best.ok_or(WitnessError::Incompatible)?;
    Ok(PureState::from_unit(v.clone()))
}

/// Largest `p` with `ρ − p|χ⟩⟨χ|` positive semidefinite:
/// `p* = 1 / ⟨χ|ρ⁺|χ⟩`, the pseudo-inverse taken on the support of `ρ`.
pub fn max_common_weight(
    rho: &DensityMatrix,
    chi: &PureState,
    tol: &Tolerances,
) -> Result<f64, WitnessError> {
    if chi.dim() != rho.dim() {
        return Err(StateError::DimensionMismatch {
            expected: rho.dim(),
            found: chi.dim(),
        }
        .into());
    }
    let (support, _, eig) = support_and_null(rho.matrix(), tol)?;
    let distance = support.residual(chi.amplitudes());
    if distance > SUPPORT_MEMBERSHIP_TOL {
        return Err(WitnessError::ChiOutsideSupport { distance });
    }
    let pinv_expectation: f64 = eig
        .values
        .iter()
        .zip(&eig.vectors)
        .take(support.dim())
        .map(|(l, v)| crate::linalg::inner(v, chi.amplitudes()).norm_sqr() / l)
        .sum();
    Ok((1.0 / pinv_expectation).min(1.0))
}

/// Eigen-ensemble of `ρ − w|χ⟩⟨χ|` with weights left unnormalized.
/// Eigenvalues at or below `eigenvalue_zero_tol` (including the small
/// negative ones left by maximal extraction) are dropped.
fn remainder(
    rho: &DensityMatrix,
    chi: &PureState,
    w: f64,
    tol: &Tolerances,
) -> Result<Vec<(f64, PureState)>, WitnessError> {
    let r = rho
        .matrix()
        .sub(&chi.projector().scale(w))?
        .hermitian_part();
    let eig = hermitian_eigendecompose(&r, tol)?;
    Ok(eig
        .values
        .into_iter()
        .zip(eig.vectors)
        .filter(|(l, _)| *l > tol.eigenvalue_zero_tol)
        .map(|(l, v)| (l, PureState::from_unit(v)))
        .collect())
}

/// Builds decompositions of `a` and `b` sharing `|χ⟩` with maximal weights.
pub fn build_shared_decomposition(
    a: &DensityMatrix,
    b: &DensityMatrix,
    tol: &Tolerances,
) -> Result<SharedDecomposition, WitnessError> {
    let chi = choose_common_state(a, b, tol)?;
    let p0 = max_common_weight(a, &chi, tol)?;
    let q0 = max_common_weight(b, &chi, tol)?;
    let rest_a = remainder(a, &chi, p0, tol)?;
    let rest_b = remainder(b, &chi, q0, tol)?;
    let d = SharedDecomposition {
        chi,
        p0,
        q0,
        rest_a,
        rest_b,
    };
    d.validate()?;
    Ok(d)
}

/// The tripartite state whose ancilla measurements reproduce both
/// assignments. Subsystem order is `A ⊗ B ⊗ S`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessState {
    /// `(dim_A, dim_B, dim_S)`.
    pub dims: [usize; 3],
    pub amplitudes: PureState,
    /// Prefactor `n` multiplying the unnormalized sum, so that
    /// `1/n² = 1/p0 + 1/q0 − 1`.
    pub normalization: f64,
    pub decomposition: SharedDecomposition,
}

fn expected_normalization(d: &SharedDecomposition) -> f64 {
    (1.0 / d.p0 + 1.0 / d.q0 - 1.0).sqrt().recip()
}

impl WitnessState {
    /// Reassembles a witness from stored parts, checking its structural
    /// invariants. Amplitudes are not recomputed; a tampered state surfaces
    /// later in [`simulate_protocol`].
    pub fn from_parts(
        dims: [usize; 3],
        amplitudes: PureState,
        normalization: f64,
        decomposition: SharedDecomposition,
    ) -> Result<Self, WitnessError> {
        decomposition.validate()?;
        let bad = |msg: String| Err(WitnessError::InvalidWitness(msg));
        let want = [
            1 + decomposition.rest_b.len(),
            1 + decomposition.rest_a.len(),
            decomposition.dim(),
        ];
        if dims != want {
            return bad(format!(
                "dims {dims:?} do not match decomposition, expected {want:?}"
            ));
        }
        if amplitudes.dim() != dims.iter().product::<usize>() {
            return bad(format!(
                "amplitude vector has dimension {}",
                amplitudes.dim()
            ));
        }
        let lhs = normalization.powi(-2);
        let rhs = 1.0 / decomposition.p0 + 1.0 / decomposition.q0 - 1.0;
        let gap = (lhs - rhs).abs();
        if gap.is_nan() || gap > NORMALIZATION_TOL {
            return bad(format!("1/n² = {lhs} but 1/p0 + 1/q0 - 1 = {rhs}"));
        }
        Ok(Self {
            dims,
            amplitudes,
            normalization,
            decomposition,
        })
    }
}

/// Assembles `|Ψ⟩` with minimal ancillas: `dim_A = 1 + #rest_b`,
/// `dim_B = 1 + #rest_a`, computational-basis labels.
pub fn build_witness(d: &SharedDecomposition) -> Result<WitnessState, WitnessError> {
    d.validate()?;
    let dim_s = d.dim();
    let dim_a = 1 + d.rest_b.len();
    let dim_b = 1 + d.rest_a.len();
    let n = expected_normalization(d);
    let index = |a: usize, b: usize, s: usize| (a * dim_b + b) * dim_s + s;

    let mut amps = vec![Complex64::new(0.0, 0.0); dim_a * dim_b * dim_s];
    for (s, z) in d.chi.amplitudes().iter().enumerate() {
        amps[index(0, 0, s)] = z * n;
    }
    for (i, (p, psi)) in d.rest_a.iter().enumerate() {
        let c = (p / d.p0).sqrt() * n;
        for (s, z) in psi.amplitudes().iter().enumerate() {
            amps[index(0, i + 1, s)] = z * c;
        }
    }
    for (j, (q, phi)) in d.rest_b.iter().enumerate() {
        let c = (q / d.q0).sqrt() * n;
        for (s, z) in phi.amplitudes().iter().enumerate() {
            amps[index(j + 1, 0, s)] = z * c;
        }
    }
    let amplitudes =
        PureState::new(amps).map_err(|e| WitnessError::InvalidWitness(e.to_string()))?;
    Ok(WitnessState {
        dims: [dim_a, dim_b, dim_s],
        amplitudes,
        normalization: n,
        decomposition: d.clone(),
    })
}

/// States recovered by running the measurement protocol on a witness.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    /// System state after ancilla A gives `0` and ancilla B is ignored.
    pub rho_alice: DensityMatrix,
    /// System state after ancilla B gives `0` and ancilla A is ignored.
    pub rho_bob: DensityMatrix,
    /// System state after both ancillas give `0`.
    pub joint: PureState,
    pub prob_alice: f64,
    pub prob_bob: f64,
    pub prob_joint: f64,
}

/// Runs the protocol: Alice projects ancilla A on `|0⟩`, Bob projects
/// ancilla B on `|0⟩`, each keeps only the system; pooling both outcomes
/// leaves a pure system state.
pub fn simulate_protocol(
    w: &WitnessState,
    tol: &Tolerances,
) -> Result<ProtocolOutcome, WitnessError> {
    let [dim_a, dim_b, dim_s] = w.dims;
    let zero_a = PureState::basis(dim_a, 0);
    let zero_b = PureState::basis(dim_b, 0);

    let after_a = project_and_renormalize(&w.amplitudes, &w.dims, 0, &zero_a, tol)?;
    let rho_alice = partial_trace(&after_a.state.density(), &[dim_b, dim_s], &[1])?;

    let after_b = project_and_renormalize(&w.amplitudes, &w.dims, 1, &zero_b, tol)?;
    let rho_bob = partial_trace(&after_b.state.density(), &[dim_a, dim_s], &[1])?;

    let both = project_and_renormalize(&after_a.state, &[dim_b, dim_s], 0, &zero_b, tol)?;

    Ok(ProtocolOutcome {
        rho_alice,
        rho_bob,
        joint: both.state,
        prob_alice: after_a.probability,
        prob_bob: after_b.probability,
        prob_joint: after_a.probability * both.probability,
    })
}

/// Deviations of a protocol run from the assignments it should reproduce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTrip {
    /// `‖ρ_alice − ρ_A‖_max`.
    pub alice_error: f64,
    /// `‖ρ_bob − ρ_B‖_max`.
    pub bob_error: f64,
    /// `|⟨joint|χ⟩|²`.
    pub joint_fidelity: f64,
}

impl RoundTrip {
    pub fn max_deviation(&self) -> f64 {
        self.alice_error
            .max(self.bob_error)
            .max(1.0 - self.joint_fidelity)
    }

    pub fn passes(&self) -> bool {
        self.alice_error <= ROUND_TRIP_TOL
            && self.bob_error <= ROUND_TRIP_TOL
            && self.joint_fidelity >= 1.0 - ROUND_TRIP_TOL
    }
}

pub fn compare_round_trip(
    w: &WitnessState,
    outcome: &ProtocolOutcome,
) -> Result<RoundTrip, WitnessError> {
    let d = &w.decomposition;
    Ok(RoundTrip {
        alice_error: outcome
            .rho_alice
            .matrix()
            .max_abs_diff(d.rho_a().matrix())?,
        bob_error: outcome.rho_bob.matrix().max_abs_diff(d.rho_b().matrix())?,
        joint_fidelity: outcome.joint.fidelity(&d.chi),
    })
}

/// Identity of `1/n² = 1/p0 + 1/q0 − 1`, as the absolute residual.
pub fn normalization_residual(w: &WitnessState) -> f64 {
    let d = &w.decomposition;
    (w.normalization.powi(-2) - (1.0 / d.p0 + 1.0 / d.q0 - 1.0)).abs()
}
