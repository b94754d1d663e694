//! Exit criteria. Each criterion prints one PASS/FAIL line; the test fails
//! if any criterion does. Run with `--nocapture` to see the lines.

use std::process::Command;
use std::time::Instant;

use maskcorr::linalg::{ComplexMatrix, ComplexScalar, I, ONE, ZERO};
use maskcorr::masking::{reduced_pair, reduced_system, System};
use maskcorr::random::{haar_random_qubit, random_basis};
use maskcorr::scenarios::{
    teleportation_demo, verify_dispatch, verify_exclusivity, verify_masking, verify_no_signaling,
    verify_recovery, DispatchBasis,
};
use maskcorr::{
    build_u_dec_xy, build_u_dec_xz, build_u_dec_yz, build_u_enc, decode, mask, DensityMatrix,
    PairId, SeededRng, StateVector,
};
use num_complex::Complex64;

const SEED: u64 = 42;
const TOL: f64 = 1e-10;
const CLOSED_FORM_TOL: f64 = 1e-12;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

// Independent constructions, written out by hand rather than taken from the
// library's scheme module.

fn pauli(mu: usize) -> ComplexMatrix {
    match mu {
        0 => ComplexMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, ONE]]),
        1 => ComplexMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
        2 => ComplexMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]]),
        _ => ComplexMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]]),
    }
}

fn alpha_inverse(mu: usize) -> ComplexScalar {
    if mu == 0 {
        ONE
    } else {
        -I
    }
}

/// `(σ_μ ⊗ I)(|00⟩ + |11⟩)/√2`, expanded by hand.
fn bell_vector(mu: usize) -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = |x: f64| Complex64::new(x * h, 0.0);
    let entries = match mu {
        0 => vec![r(1.0), ZERO, ZERO, r(1.0)],
        1 => vec![ZERO, r(1.0), r(1.0), ZERO],
        // σ_y|0⟩ = i|1⟩, σ_y|1⟩ = −i|0⟩
        2 => vec![ZERO, -I * h, I * h, ZERO],
        _ => vec![r(1.0), ZERO, ZERO, r(-1.0)],
    };
    ComplexMatrix::column(entries)
}

/// `½ Σ_μ α_μ⁻¹ σ_μ|ψ⟩ ⊗ |φ_μ⟩ ⊗ |φ_μ⟩`.
fn masked_closed_form(psi: &StateVector) -> ComplexMatrix {
    (0..4)
        .map(|mu| {
            let a = pauli(mu).matmul(psi.amplitudes()).unwrap();
            a.tensor(&bell_vector(mu))
                .tensor(&bell_vector(mu))
                .scale(alpha_inverse(mu) * 0.5)
        })
        .reduce(|x, y| &x + &y)
        .unwrap()
}

/// `½ Σ_μ |φ_μ⟩ ⊗ |φ_μ⟩` on (S1, N1, S2, N2).
fn xy_residual() -> ComplexMatrix {
    (0..4)
        .map(|mu| {
            bell_vector(mu)
                .tensor(&bell_vector(mu))
                .scale(Complex64::new(0.5, 0.0))
        })
        .reduce(|x, y| &x + &y)
        .unwrap()
}

fn identity_deviation(u: &ComplexMatrix) -> f64 {
    let id = ComplexMatrix::identity(u.rows());
    let a = u.matmul(&u.dagger()).unwrap().max_abs_diff(&id).unwrap();
    let b = u.dagger().matmul(u).unwrap().max_abs_diff(&id).unwrap();
    a.max(b)
}

fn criterion_unitarity() -> Outcome {
    let ops = [
        ("U_enc", build_u_enc()),
        ("U_dec_yz", build_u_dec_yz()),
        ("U_dec_xy", build_u_dec_xy()),
        ("U_dec_xz", build_u_dec_xz()),
    ];
    let worst = ops
        .iter()
        .map(|(_, u)| identity_deviation(u))
        .fold(0.0, f64::max);
    outcome(
        worst <= TOL,
        format!("max |UU†−I|, |U†U−I| = {worst:.3e} (tol {TOL:e})"),
    )
}

fn criterion_closed_form() -> Outcome {
    let mut rng = SeededRng::new(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let psi = haar_random_qubit(&mut rng);
        let lhs = mask(&psi).unwrap();
        worst = worst.max(
            lhs.amplitudes()
                .max_abs_diff(&masked_closed_form(&psi))
                .unwrap(),
        );
    }
    outcome(
        worst <= CLOSED_FORM_TOL,
        format!("100 Haar inputs, max deviation {worst:.3e} (tol {CLOSED_FORM_TOL:e})"),
    )
}

fn criterion_masking() -> Outcome {
    // Baseline |0⟩ plus 100 Haar inputs.
    let r = verify_masking(101, TOL, SEED).unwrap();
    // Independent check of the reduced states themselves: X is I/2 and the
    // Y, Z pairs are I/4 for every input.
    let mut rng = SeededRng::new(SEED + 1);
    let mut worst_closed: f64 = 0.0;
    for _ in 0..100 {
        let rho = mask(&haar_random_qubit(&mut rng)).unwrap().to_density();
        for s in [System::X, System::Y, System::Z] {
            let reduced = reduced_system(&rho, s).unwrap();
            let mixed = DensityMatrix::maximally_mixed(reduced.num_qubits());
            worst_closed = worst_closed.max(reduced.max_abs_diff(&mixed).unwrap());
        }
    }
    outcome(
        r.pass && worst_closed <= TOL,
        format!(
            "ψ-dependence {:.3e}, distance to maximally mixed {worst_closed:.3e} (tol {TOL:e})",
            r.max_deviation
        ),
    )
}

fn criterion_recovery() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for pair in PairId::ALL {
        let r = verify_recovery(pair, 100, TOL, SEED).unwrap();
        let min_full = r.diagnostic_min("fidelity_full").unwrap();
        let min_red = r.diagnostic_min("fidelity_reduced").unwrap();
        pass &= r.pass && min_full >= 1.0 - TOL && min_red >= 1.0 - TOL && r.trials == 100;
        details.push(format!("{pair}: 1−F ≤ {:.3e}", r.max_deviation));
    }
    outcome(
        pass,
        format!("{} (full and reduced, 100 inputs each)", details.join(", ")),
    )
}

fn criterion_exclusivity() -> Outcome {
    let r = verify_exclusivity(101, TOL, SEED).unwrap();
    let residual = {
        let v = xy_residual();
        DensityMatrix::new(v.outer(&v).unwrap()).unwrap()
    };
    let mut rng = SeededRng::new(SEED + 2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let psi = haar_random_qubit(&mut rng);
        let post = decode(PairId::XY, &mask(&psi).unwrap().to_density())
            .unwrap()
            .post_global;
        let rest = post.partial_trace(&[1, 2, 3, 4]).unwrap();
        worst = worst.max(rest.max_abs_diff(&residual).unwrap());
    }
    outcome(
        r.pass && worst <= TOL,
        format!(
            "YZ-after-XY ψ-dependence {:.3e}, residual deviation {worst:.3e} (tol {TOL:e})",
            r.max_deviation
        ),
    )
}

fn criterion_dispatch() -> Outcome {
    let r = verify_dispatch(DispatchBasis::Random, 20, TOL, SEED).unwrap();
    let mut pass = r.pass && r.trials == 20;
    // Cross-check by hand on fresh bases.
    let mut rng = SeededRng::new(SEED + 3);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let psi = haar_random_qubit(&mut rng);
        let b = random_basis(&mut rng);
        let measured = mask(&psi)
            .unwrap()
            .to_density()
            .measure_discard(0, &b)
            .unwrap();
        let out = decode(PairId::YZ, &reduced_pair(&measured, PairId::YZ).unwrap()).unwrap();
        worst = worst.max((1.0 - out.recovered.fidelity_pure(&psi).unwrap()).abs());
    }
    pass &= worst <= TOL;
    outcome(
        pass,
        format!(
            "20 random bases, max 1−F {:.3e} / {worst:.3e} (tol {TOL:e})",
            r.max_deviation
        ),
    )
}

fn criterion_no_signaling() -> Outcome {
    let r = verify_no_signaling(100, TOL, SEED).unwrap();
    let min_comparisons = r.diagnostic_min("comparisons").unwrap();
    // ≥ 3 actions means ≥ 3 pairwise comparisons.
    outcome(
        r.pass && r.trials == 100 && min_comparisons >= 3.0,
        format!(
            "100 trials, {min_comparisons} comparisons each, max ρ_YZ change {:.3e} (tol {TOL:e})",
            r.max_deviation
        ),
    )
}

fn criterion_teleportation() -> Outcome {
    let mut rng = SeededRng::new(SEED);
    let mixed = DensityMatrix::maximally_mixed(1);
    let mut worst_pre: f64 = 0.0;
    let mut worst_fid: f64 = 0.0;
    for k in 0..10 {
        let psi = haar_random_qubit(&mut rng);
        let rec = teleportation_demo(&psi, k).unwrap();
        worst_pre = worst_pre.max(rec.pre_correction_bob.max_abs_diff(&mixed).unwrap());
        for f in rec.per_outcome_fidelity {
            worst_fid = worst_fid.max((1.0 - f).abs());
        }
    }
    outcome(
        worst_pre <= TOL && worst_fid <= TOL,
        format!("|ρ_Bob − I/2| {worst_pre:.3e}, max 1−F {worst_fid:.3e} (tol {TOL:e})"),
    )
}

fn criterion_determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_maskcorr"))
            .args([
                "verify",
                "--scenario",
                "all",
                "--seed",
                "42",
                "--format",
                "json",
            ])
            .env_remove("MASKCORR_SEED")
            .output()
            .expect("run maskcorr")
    };
    let a = run();
    let b = run();
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    let ok = a.status.code() == Some(0) && b.status.code() == Some(0);
    outcome(
        same && ok,
        format!(
            "{} bytes, identical: {same}, exit codes {:?}/{:?}",
            a.stdout.len(),
            a.status.code(),
            b.status.code()
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let started = Instant::now();
    println!();
    let criteria: [Criterion; 9] = [
        ("1 unitarity", criterion_unitarity),
        ("2 closed-form agreement", criterion_closed_form),
        ("3 masking", criterion_masking),
        ("4 recovery", criterion_recovery),
        ("5 exclusivity", criterion_exclusivity),
        ("6 dispatch", criterion_dispatch),
        ("7 no-signaling", criterion_no_signaling),
        ("8 teleportation contrast", criterion_teleportation),
        ("9 determinism", criterion_determinism),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let o = check();
        println!(
            "[{}] {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed.push(name);
        }
    }
    let elapsed = started.elapsed();
    println!("acceptance suite finished in {:.2}s", elapsed.as_secs_f64());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
