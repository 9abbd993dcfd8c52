mod common;

use common::{c, psd_line_search, random_state_with_member, rng};
use proptest::prelude::*;
use qcompat::linalg::ComplexMatrix;
use qcompat::sample::random_compatible_pair;
use qcompat::states::{validate_density, PureState};
use qcompat::witness::{
    compare_round_trip, max_common_weight, normalization_residual, WitnessError,
};
use qcompat::{
    build_shared_decomposition, build_witness, simulate_protocol, verify_joint, Tolerances,
};
use rand::Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn weight_of_plus_in_a_biased_qubit() {
    let rho = validate_density(&ComplexMatrix::diagonal(&[0.75, 0.25]), &tol()).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = PureState::new(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
    let p = max_common_weight(&rho, &plus, &tol()).unwrap();
    assert!((p - 0.375).abs() < 1e-12, "{p}");
    assert!((psd_line_search(&rho, &plus) - p).abs() < 1e-6);
}

#[test]
fn weights_agree_with_line_search() {
    for seed in 0..100 {
        let mut r = rng(seed);
        let d = r.gen_range(1..=6);
        let (rho, chi) = random_state_with_member(&mut r, d);
        let p = max_common_weight(&rho, &chi, &tol()).unwrap();
        let oracle = psd_line_search(&rho, &chi);
        assert!((p - oracle).abs() <= 1e-6, "seed {seed}: {p} vs {oracle}");
    }
}

#[test]
fn incompatible_pairs_have_no_decomposition() {
    let a = PureState::basis(2, 0).density();
    let b = PureState::basis(2, 1).density();
    assert!(matches!(
        build_shared_decomposition(&a, &b, &tol()),
        Err(WitnessError::Incompatible)
    ));
}

#[test]
fn common_state_must_lie_in_the_support() {
    let rho = PureState::basis(2, 0).density();
    let err = max_common_weight(&rho, &PureState::basis(2, 1), &tol()).unwrap_err();
    assert!(matches!(err, WitnessError::ChiOutsideSupport { .. }));
}

#[test]
fn identical_pure_states_need_no_ancilla_branches() {
    let psi = qcompat::sample::random_pure(&mut rng(3), 4);
    let d = build_shared_decomposition(&psi.density(), &psi.density(), &tol()).unwrap();
    assert!((d.p0 - 1.0).abs() < 1e-12 && (d.q0 - 1.0).abs() < 1e-12);
    let w = build_witness(&d).unwrap();
    assert_eq!(w.dims, [1, 1, 4]);
    assert!((w.normalization - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decompositions_reassemble_inputs(seed in any::<u64>(), d in 2usize..=8) {
        let mut r = rng(seed);
        let (a, b, _) = random_compatible_pair(&mut r, d);
        let dec = build_shared_decomposition(&a, &b, &tol()).unwrap();
        prop_assert!(dec.rho_a().matrix().max_abs_diff(a.matrix()).unwrap() <= 1e-9);
        prop_assert!(dec.rho_b().matrix().max_abs_diff(b.matrix()).unwrap() <= 1e-9);
        prop_assert!(verify_joint(&dec.chi.density(), &[a, b], &tol()).unwrap().accepted);
    }

    #[test]
    fn witness_uses_minimal_ancillas(seed in any::<u64>(), d in 2usize..=8) {
        let mut r = rng(seed);
        let (a, b, _) = random_compatible_pair(&mut r, d);
        let dec = build_shared_decomposition(&a, &b, &tol()).unwrap();
        let w = build_witness(&dec).unwrap();
        prop_assert_eq!(w.dims, [1 + dec.rest_b.len(), 1 + dec.rest_a.len(), d]);
        // A remainder never needs more terms than the dimension minus the
        // direction that maximal extraction removed.
        prop_assert!(dec.rest_a.len() < d && dec.rest_b.len() < d);
        prop_assert!(normalization_residual(&w) <= 1e-9);
    }

    #[test]
    fn protocol_recovers_both_assignments(seed in any::<u64>(), d in 2usize..=8) {
        let mut r = rng(seed);
        let (a, b, _) = random_compatible_pair(&mut r, d);
        let w = build_witness(&build_shared_decomposition(&a, &b, &tol()).unwrap()).unwrap();
        let out = simulate_protocol(&w, &tol()).unwrap();
        let rt = compare_round_trip(&w, &out).unwrap();
        prop_assert!(rt.passes(), "{:?}", rt);
        prop_assert!(out.rho_alice.matrix().max_abs_diff(a.matrix()).unwrap() <= 1e-8);
        prop_assert!(out.rho_bob.matrix().max_abs_diff(b.matrix()).unwrap() <= 1e-8);
        prop_assert!(out.prob_joint > 0.0 && out.prob_joint <= out.prob_alice.min(out.prob_bob) + 1e-12);
    }
}
