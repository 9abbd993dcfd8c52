//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails or overruns its time budget.

mod common;

use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::corpus::{self, fixture, qcompat};
use common::{
    c, counterexample, intersection_oracle, psd_line_search, random_state,
    random_state_with_member, random_subspace_pair, rng,
};
use qcompat::compat::restrict_to_intersection;
use qcompat::io::{parse_matrix, parse_report, serialize_matrix};
use qcompat::linalg::{hermitian_eigendecompose, intersect, projector_distance};
use qcompat::sample::{random_compatible_pair, random_pure};
use qcompat::states::{from_ensemble, DensityMatrix, Ensemble, PureState};
use qcompat::witness::{compare_round_trip, max_common_weight, normalization_residual};
use qcompat::{
    build_shared_decomposition, build_witness, check_bfm, simulate_protocol, verify_joint,
    Tolerances,
};
use rand::Rng;

type Verdict = Result<String, String>;

/// Name, time budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Verdict);

fn tol() -> Tolerances {
    Tolerances::default()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn counterexample_reproduction() -> Verdict {
    let (a, b) = counterexample();
    let r = check_bfm(&[a, b], &tol()).map_err(|e| e.to_string())?;
    ensure(
        !r.verdict_pi && r.verdict_pii && r.verdict_bfm && r.intersection_dim == 1,
        || {
            format!(
                "pi {} pii {} bfm {} dim {}",
                r.verdict_pi, r.verdict_pii, r.verdict_bfm, r.intersection_dim
            )
        },
    )?;
    Ok(format!(
        "pi=false (comm {:.3}), pii=true (prod {:.3}), bfm dim 1",
        r.commutator_norm, r.product_norm
    ))
}

/// `ψ` rotated by `theta` towards a random orthogonal direction.
fn tilted<R: Rng>(r: &mut R, psi: &PureState, theta: f64) -> PureState {
    let w = random_pure(r, psi.dim());
    let overlap = psi.inner(&w);
    let perp: Vec<_> = w
        .amplitudes()
        .iter()
        .zip(psi.amplitudes())
        .map(|(x, p)| x - overlap * p)
        .collect();
    let perp = PureState::normalized(perp).unwrap();
    let amps = psi
        .amplitudes()
        .iter()
        .zip(perp.amplitudes())
        .map(|(a, b)| a * theta.cos() + b * theta.sin())
        .collect();
    PureState::normalized(amps).unwrap()
}

fn pure_state_criterion() -> Verdict {
    let mut r = rng(0xA2);
    let (mut same, mut distinct) = (0, 0);
    for case in 0..500 {
        let d = r.gen_range(2..=8);
        let psi = random_pure(&mut r, d);
        let phi = match case % 4 {
            0 => psi.scale_phase(c(0.0, r.gen_range(0.0..6.3)).exp()),
            1 => tilted(&mut r, &psi, 1e-5),
            2 => tilted(&mut r, &psi, 3e-3),
            _ => random_pure(&mut r, d),
        };
        let f = psi.fidelity(&phi);
        let bfm = check_bfm(&[psi.density(), phi.density()], &tol())
            .map_err(|e| e.to_string())?
            .verdict_bfm;
        ensure(bfm == (f >= 1.0 - 1e-7), || {
            format!("case {case}: fidelity {f}, bfm {bfm}")
        })?;
        if case % 4 == 0 {
            ensure(bfm, || format!("case {case}: phase copy rejected"))?;
            same += 1;
        }
        if case % 4 == 3 {
            ensure(f < 1.0 - 1e-3 && !bfm, || {
                format!("case {case}: distinct pair accepted (f {f})")
            })?;
            distinct += 1;
        }
    }
    Ok(format!(
        "500 pairs, {same} phase copies accepted, {distinct} Haar pairs rejected"
    ))
}

fn bfm_implies_pii() -> Verdict {
    let mut r = rng(0xA3);
    let mut compatible = 0;
    for case in 0..1000 {
        let d = r.gen_range(1..=8);
        let (a, b) = if case % 2 == 0 {
            (random_state(&mut r, d), random_state(&mut r, d))
        } else {
            let (a, b, _) = random_compatible_pair(&mut r, d.max(2));
            (a, b)
        };
        let rep = check_bfm(&[a, b], &tol()).map_err(|e| e.to_string())?;
        ensure(!rep.verdict_bfm || rep.verdict_pii, || {
            format!("case {case}: bfm without pii")
        })?;
        compatible += rep.verdict_bfm as usize;
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let a = from_ensemble(
        &Ensemble::new(vec![
            (0.5, PureState::basis(3, 0)),
            (0.5, PureState::basis(3, 1)),
        ])
        .unwrap(),
    );
    let v = PureState::new(vec![c(h, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap();
    let rep = check_bfm(&[a, v.density()], &tol()).map_err(|e| e.to_string())?;
    ensure(rep.verdict_pii && !rep.verdict_bfm, || {
        "dimension-3 example misclassified".into()
    })?;
    Ok(format!(
        "1000 pairs ({compatible} compatible), no bfm without pii; dim-3 pii-only example ok"
    ))
}

fn necessity() -> Verdict {
    let mut r = rng(0xA4);
    let mut rejected = 0;
    for case in 0..200 {
        let d = r.gen_range(2..=8);
        let (a, b, chi) = random_compatible_pair(&mut r, d);
        let obs = [a.clone(), b];
        let err = |e: qcompat::compat::CompatError| e.to_string();
        ensure(
            verify_joint(&chi.density(), &obs, &tol())
                .map_err(err)?
                .accepted,
            || format!("case {case}: χ rejected"),
        )?;
        let restricted = restrict_to_intersection(&a, &obs, &tol())
            .map_err(err)?
            .ok_or_else(|| format!("case {case}: no weight on the intersection"))?;
        ensure(
            verify_joint(&restricted, &obs, &tol())
                .map_err(err)?
                .accepted,
            || format!("case {case}: restricted state rejected"),
        )?;
        let mixed = verify_joint(&DensityMatrix::maximally_mixed(d), &obs, &tol()).map_err(err)?;
        if mixed.intersection_dim < d {
            ensure(!mixed.accepted, || format!("case {case}: I/D accepted"))?;
            rejected += 1;
        }
    }
    Ok(format!(
        "200 pairs, χ and Π∩ρΠ∩ accepted, I/D rejected {rejected} times"
    ))
}

fn sufficiency_round_trip() -> Verdict {
    let mut r = rng(0xA5);
    let (mut worst_err, mut worst_fid, mut worst_norm) = (0.0_f64, 1.0_f64, 0.0_f64);
    for case in 0..200 {
        let d = r.gen_range(2..=8);
        let (a, b, _) = random_compatible_pair(&mut r, d);
        let dec =
            build_shared_decomposition(&a, &b, &tol()).map_err(|e| format!("case {case}: {e}"))?;
        let w = build_witness(&dec).map_err(|e| format!("case {case}: {e}"))?;
        let out = simulate_protocol(&w, &tol()).map_err(|e| format!("case {case}: {e}"))?;
        let rt = compare_round_trip(&w, &out).map_err(|e| e.to_string())?;
        let ea = out.rho_alice.matrix().max_abs_diff(a.matrix()).unwrap();
        let eb = out.rho_bob.matrix().max_abs_diff(b.matrix()).unwrap();
        worst_err = worst_err.max(ea).max(eb);
        worst_fid = worst_fid.min(rt.joint_fidelity);
        worst_norm = worst_norm.max(normalization_residual(&w));
    }
    ensure(
        worst_err <= 1e-8 && worst_fid >= 1.0 - 1e-8 && worst_norm <= 1e-9,
        || {
            format!("max error {worst_err:e}, min fidelity {worst_fid}, normalization residual {worst_norm:e}")
        },
    )?;
    Ok(format!(
        "200 pairs, max error {worst_err:.1e}, min fidelity 1-{:.1e}, normalization residual {worst_norm:.1e}",
        1.0 - worst_fid
    ))
}

fn intersection_oracle_equivalence() -> Verdict {
    let mut r = rng(0xA6);
    let mut worst = 0.0_f64;
    for case in 0..500 {
        let d = r.gen_range(1..=12);
        let (a, b) = random_subspace_pair(&mut r, d);
        let fast = intersect(&a, &b, &tol()).map_err(|e| e.to_string())?;
        let slow = intersection_oracle(&a, &b);
        ensure(fast.dim() == slow.dim(), || {
            format!("case {case}: dim {} vs {}", fast.dim(), slow.dim())
        })?;
        worst = worst.max(projector_distance(&fast, &slow).unwrap());
    }
    ensure(worst <= 1e-8, || format!("projector distance {worst:e}"))?;
    Ok(format!("500 pairs, max projector distance {worst:.1e}"))
}

fn weight_maximality() -> Verdict {
    let mut r = rng(0xA7);
    let mut worst_gap = 0.0_f64;
    for case in 0..200 {
        let d = r.gen_range(1..=8);
        let (rho, chi) = random_state_with_member(&mut r, d);
        let p = max_common_weight(&rho, &chi, &tol()).map_err(|e| format!("case {case}: {e}"))?;
        let lambda_min = |w: f64| {
            let m = rho.matrix().sub(&chi.projector().scale(w)).unwrap();
            hermitian_eigendecompose(&m, &tol()).unwrap().min_value()
        };
        let at = lambda_min(p);
        let above = lambda_min(p + 1e-6);
        ensure(at >= -1e-9, || format!("case {case}: λ_min at p* = {at:e}"))?;
        ensure(above < -1e-9, || {
            format!("case {case}: λ_min at p*+1e-6 = {above:e}")
        })?;
        let gap = (p - psd_line_search(&rho, &chi)).abs();
        ensure(gap <= 1e-6, || {
            format!("case {case}: line search differs by {gap:e}")
        })?;
        worst_gap = worst_gap.max(gap);
    }
    Ok(format!(
        "200 states, max gap to line search {worst_gap:.1e}"
    ))
}

fn cli_golden_suite() -> Verdict {
    let bad = corpus::check_corpus();
    ensure(bad.is_empty(), || bad.join("; "))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (cmd, golden) in [
        ("check", "report_counter.json"),
        ("witness", "witness_counter.json"),
    ] {
        let want = fs::read_to_string(fixture(golden)).unwrap();
        for k in 0..2 {
            let out = dir.path().join(format!("{cmd}{k}.json"));
            let run = qcompat(
                &[
                    cmd,
                    "counter_a.json",
                    "counter_b.json",
                    "--json",
                    out.to_str().unwrap(),
                ],
                &[],
            );
            ensure(run.code == 0, || format!("{cmd} exited {}", run.code))?;
            ensure(fs::read_to_string(&out).unwrap() == want, || {
                format!("{cmd} output differs from {golden}")
            })?;
        }
        let parsed = parse_report(&want).map_err(|e| e.to_string())?;
        ensure(parsed.to_json() == want, || {
            format!("{golden} does not round trip")
        })?;
    }
    for name in corpus::VALID {
        let text = fs::read_to_string(fixture(name)).unwrap();
        let (m, label) = parse_matrix(&text).map_err(|e| format!("{name}: {e}"))?;
        let once = serialize_matrix(&m, label.as_deref());
        let (m2, label2) = parse_matrix(&once).map_err(|e| e.to_string())?;
        ensure(
            m == m2 && label == label2 && once == serialize_matrix(&m2, label2.as_deref()),
            || format!("{name} does not round trip"),
        )?;
    }
    Ok(format!(
        "{} invocations, golden outputs byte-identical, {} matrix files round trip",
        corpus::CASES.len(),
        corpus::VALID.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "counterexample reproduction",
            1,
            counterexample_reproduction,
        ),
        ("pure-state criterion", 10, pure_state_criterion),
        ("bfm implies pii", 30, bfm_implies_pii),
        ("necessity", 30, necessity),
        ("sufficiency round trip", 60, sufficiency_round_trip),
        (
            "intersection oracle equivalence",
            30,
            intersection_oracle_equivalence,
        ),
        ("weight maximality", 30, weight_maximality),
        ("cli golden suite", 10, cli_golden_suite),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let elapsed = start.elapsed();
        let verdict = match verdict {
            Ok(detail) if elapsed > Duration::from_secs(*budget) => {
                Err(format!("{detail}; took {elapsed:.2?}, budget {budget}s"))
            }
            v => v,
        };
        match verdict {
            Ok(detail) => println!(
                "criterion {} {name}: PASS ({detail}) [{elapsed:.2?}]",
                k + 1
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why}) [{elapsed:.2?}]", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
