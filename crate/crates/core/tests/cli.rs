use std::process::{Command, Output};

use maskcorr::io::read_density;
use maskcorr::io::read_state;
use maskcorr::report::reports_from_json;
use num_complex::Complex64;

fn maskcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maskcorr"))
        .args(args)
        .env_remove("MASKCORR_SEED")
        .output()
        .expect("run maskcorr")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_all_passes() {
    let o = maskcorr(&[
        "verify",
        "--scenario",
        "all",
        "--seed",
        "42",
        "--trials",
        "20",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("8/8 scenarios passed"), "{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_masking_needs_two_trials() {
    let o = maskcorr(&["verify", "--scenario", "masking", "--trials", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--trials >= 2"));
}

#[test]
fn verify_nosignal_json() {
    let o = maskcorr(&["verify", "--scenario", "nosignal", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let reports = reports_from_json(&stdout(&o)).unwrap();
    assert_eq!(reports.len(), 1);
    let r = &reports[0];
    assert_eq!(
        (r.scenario.as_str(), r.trials, r.tolerance, r.pass),
        ("nosignal", 100, 1e-10, true)
    );

    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let keys: Vec<&str> = v[0]
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    for k in [
        "scenario",
        "trials",
        "seed",
        "tolerance",
        "max_deviation",
        "pass",
    ] {
        assert!(keys.contains(&k), "missing {k}");
    }
}

#[test]
fn json_report_round_trips() {
    let o = maskcorr(&[
        "verify",
        "--scenario",
        "exclusivity",
        "--trials",
        "5",
        "--format",
        "json",
        "--details",
    ]);
    let text = stdout(&o);
    let reports = reports_from_json(&text).unwrap();
    assert_eq!(reports[0].details.len(), 5);
    assert!(reports[0].details[0]
        .diagnostics
        .contains_key("yz_fidelity"));
    let again = maskcorr::report::reports_to_json(&reports).unwrap();
    assert_eq!(reports_from_json(&again).unwrap(), reports);
    assert_eq!(again, text);
}

#[test]
fn zero_tolerance_run_all_fails() {
    // --tol must be positive at the CLI; the library accepts 0.
    let reports = maskcorr::run_all(&maskcorr::SuiteConfig {
        trials: 10,
        tol: 0.0,
        seed: 42,
    });
    assert!(reports.iter().any(|r| !r.pass));
    assert_eq!(maskcorr(&["verify", "--tol", "0"]).status.code(), Some(2));
}

#[test]
fn failing_report_exits_one() {
    let o = maskcorr(&[
        "verify",
        "--scenario",
        "recovery-xy",
        "--trials",
        "5",
        "--tol",
        "1e-300",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn env_seed_overrides_default() {
    let run = |seed: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_maskcorr"));
        c.args([
            "verify",
            "--scenario",
            "dispatch",
            "--trials",
            "3",
            "--format",
            "json",
        ]);
        c.env_remove("MASKCORR_SEED");
        if let Some(s) = seed {
            c.env("MASKCORR_SEED", s);
        }
        c.output().unwrap().stdout
    };
    assert_ne!(run(Some("7")), run(None));
    assert_eq!(run(Some("42")), run(None));
}

#[test]
fn demo_mask_writes_register() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let o = maskcorr(&[
        "demo",
        "mask",
        "--state",
        "1,0,0,0",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let gamma = read_state(&path).unwrap();
    assert_eq!(gamma.num_qubits(), 5);
    assert_eq!(gamma.dim(), 32);
    assert!((gamma.amplitude(0) - Complex64::new(0.25, -0.25)).norm() < 1e-15);
}

#[test]
fn demo_decode_yz() {
    let o = maskcorr(&["demo", "decode", "--pair", "yz", "--state", "0,0,1,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("fidelity: 1.0"), "{}", stdout(&o));
}

#[test]
fn demo_decode_from_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("psi.json");
    std::fs::write(
        &input,
        r#"{"num_qubits": 1, "amplitudes": [[0.6, 0.0], [0.0, 0.8]]}"#,
    )
    .unwrap();
    let out = dir.path().join("rec.json");
    let o = maskcorr(&[
        "demo",
        "decode",
        "--pair",
        "xz",
        "--format",
        "json",
        "--state-file",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    let rho = read_density(&out).unwrap();
    assert!((rho.matrix()[(1, 1)].re - 0.64).abs() < 1e-10);
}

#[test]
fn demo_rejects_bad_states() {
    assert_eq!(
        maskcorr(&["demo", "mask", "--state", "1,0,0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        maskcorr(&["demo", "mask", "--state", "0,0,0,0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        maskcorr(&["demo", "mask", "--state", "2,0,0,0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        maskcorr(&["demo", "mask", "--state-file", "/nonexistent/x.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn demo_dispatch_any_basis() {
    let o = maskcorr(&[
        "demo",
        "dispatch",
        "--theta",
        "1.5707963267948966",
        "--phi",
        "0",
        "--state",
        "0.6,0,0,0.8",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("YZ fidelity: 1.0000000000"));
}

#[test]
fn demo_teleport() {
    let o = maskcorr(&["demo", "teleport", "--state", "1,0,0,0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let pre = v["pre_correction_bob"].as_array().unwrap();
    let expected = [[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]];
    for (entry, want) in pre.iter().zip(expected) {
        assert!((entry[0].as_f64().unwrap() - want[0]).abs() < 1e-10);
        assert!((entry[1].as_f64().unwrap() - want[1]).abs() < 1e-10);
    }
    for f in v["per_outcome_fidelity"].as_array().unwrap() {
        assert!((f.as_f64().unwrap() - 1.0).abs() < 1e-10);
    }
}
