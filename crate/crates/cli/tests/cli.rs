//! End-to-end runs of the `ctau` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ctau(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctau"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn total(args: &[&str]) -> f64 {
    json(&ctau(args))["total"].as_f64().unwrap()
}

/// (eps, tau) pairs of a sweep CSV.
fn csv_rows(text: &str) -> Vec<(f64, f64)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("eps,tau,upper,lower,closed_form"));
    lines
        .map(|l| {
            let mut cells = l.split(',');
            let eps = cells.next().unwrap().parse().unwrap();
            let tau = cells.next().unwrap().parse().unwrap();
            (eps, tau)
        })
        .collect()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn tau_of_isotropic_state() {
    assert!((total(&["tau", "--d", "3", "--state", "isotropic:8/9"]) - 25.0 / 27.0).abs() <= 1e-9);
    let via_flag = total(&[
        "tau",
        "--d",
        "3",
        "--state",
        "isotropic",
        "--fidelity",
        "0.8888888888888888",
    ]);
    assert!((via_flag - 25.0 / 27.0).abs() <= 1e-9);
}

#[test]
fn tau_of_product_and_separable_werner_is_zero() {
    assert_eq!(total(&["tau", "--d", "3", "--state", "product"]), 0.0);
    // 2⊗2 Werner state at μ = 1/2, the separability boundary
    assert!(total(&["tau", "--d", "2", "--state", "werner:0.5"]) <= 1e-12);
    assert!(total(&["tau", "--d", "2", "--state", "werner:0.9"]) > 1e-3);
}

#[test]
fn tau_breakdown_lists_every_component() {
    let v = json(&ctau(&["tau", "--d", "4", "--state", "max"]));
    let comps = v["components"].as_array().unwrap();
    assert_eq!(comps.len(), 36);
    let sum: f64 = comps.iter().map(|c| c["c"].as_f64().unwrap().powi(2)).sum();
    assert!((sum - v["total"].as_f64().unwrap()).abs() < 1e-12);
    // C² of the maximally entangled state is 2(d−1)/d
    assert!((sum - 1.5).abs() < 1e-9);
}

#[test]
fn tau_after_channel() {
    // d = 3, ω uniform, depolarizing: τ = Σ_{i<j} 4(1 − 4ε/3)²·ω_iω_j = 4/27 at ε = 1/2
    let t = total(&["tau", "--d", "3", "--state", "max", "--eps", "0.5"]);
    assert!((t - 4.0 / 27.0).abs() < 1e-9, "{t}");
    assert!(total(&["tau", "--d", "3", "--state", "max", "--eps", "0.8"]) < 1e-12);
}

#[test]
fn sweep_pure_depolarizing() {
    let out = ctau(&["sweep", "--state", "schmidt:1/6,1/6,2/3", "--channel", "depolarizing"]);
    assert!(out.status.success());
    let rows = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(rows.len(), 101);
    assert!((rows[0].1 - 1.0).abs() <= 1e-9);
    let first_dead = rows.iter().find(|r| r.1 < 1e-12).unwrap().0;
    assert!((0.75..0.76).contains(&first_dead), "{first_dead}");
    assert!(rows.iter().filter(|r| r.0 >= 0.75).all(|r| r.1 < 1e-12));
}

#[test]
fn sweep_isotropic_two_thirds() {
    let out = ctau(&["sweep", "--d", "3", "--state", "isotropic:2/3"]);
    let rows = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert!((rows[0].1 - 1.0 / 3.0).abs() <= 1e-9);
    let first_dead = rows.iter().find(|r| r.1 < 1e-12).unwrap().0;
    assert!((first_dead - 0.6).abs() < 1e-9, "{first_dead}");
}

#[test]
fn single_point_sweep_at_zero_gives_input_concurrence() {
    let out = ctau(&[
        "sweep",
        "--state",
        "random-pure",
        "--d",
        "3",
        "--seed",
        "8",
        "--eps",
        "0",
    ]);
    let rows = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    let expected = total(&["tau", "--state", "random-pure", "--d", "3", "--seed", "8"]);
    assert!((rows[0].1 - expected).abs() < 1e-12);
}

#[test]
fn sweep_writes_output_file_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = ctau(&[
            "sweep",
            "--state",
            "random-mixed:2",
            "--seed",
            "5",
            "--trials",
            "16",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"d": 3, "state": "isotropic", "fidelity": 0.6666666666666666}"#,
    );
    let base = total(&["tau", "--config", &cfg]);
    assert!((base - 1.0 / 3.0).abs() < 1e-9);
    let overridden = total(&["tau", "--config", &cfg, "--fidelity", "1"]);
    assert!((overridden - 4.0 / 3.0).abs() < 1e-9);
}

#[test]
fn state_and_channel_files() {
    let dir = tempfile::tempdir().unwrap();
    let s = 0.5f64.sqrt();
    let state = write(
        dir.path(),
        "bell.json",
        &format!(r#"{{"d1": 2, "d2": 2, "re": [{s}, 0, 0, {s}]}}"#),
    );
    assert!((total(&["tau", "--state", &state]) - 1.0).abs() < 1e-9);
    // amplitude damping with γ = 0.36: C(out) = √(1−γ) for the Bell state
    let ch = write(
        dir.path(),
        "ad.json",
        r#"{"dim": 2, "kraus": [{"re": [[1, 0], [0, 0.8]]}, {"re": [[0, 0.6], [0, 0]]}]}"#,
    );
    let t = total(&["tau", "--state", &state, "--channel", &ch, "--eps", "0"]);
    assert!((t - 0.64).abs() < 1e-9, "{t}");
}

#[test]
fn thresholds() {
    let v = json(&ctau(&["threshold", "--family", "depolarizing_pure", "--d", "3"]));
    assert_eq!(v["analytic"].as_f64().unwrap(), 0.75);
    assert!((v["numeric"].as_f64().unwrap() - 0.75).abs() <= 1e-6);

    let v = json(&ctau(&[
        "threshold",
        "--family",
        "depolarizing_isotropic",
        "--d",
        "3",
        "--fidelity",
        "0.8888888888888888",
    ]));
    assert!((v["analytic"].as_f64().unwrap() - 5.0 / 7.0).abs() < 1e-12);
    assert!((v["numeric"].as_f64().unwrap() - 5.0 / 7.0).abs() <= 1e-6);

    let v = json(&ctau(&["threshold", "--family", "phase_damping_pure", "--d", "3"]));
    assert!(v["analytic"].is_null());
    assert!((v["numeric"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    assert!(!v["note"].as_str().unwrap().is_empty());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.json", r#"{"d1": 2, "d2": 2, "re": [1, 2"#);
    assert_eq!(ctau(&["tau", "--state", &broken]).status.code(), Some(2));
    let short = write(dir.path(), "short.json", r#"{"d1": 2, "d2": 2, "re": [1, 0, 0]}"#);
    assert_eq!(ctau(&["tau", "--state", &short]).status.code(), Some(2));
    assert_eq!(ctau(&["tau", "--state", "nonsense"]).status.code(), Some(2));
    assert_eq!(ctau(&["sweep", "--eps-grid", "0:2:5"]).status.code(), Some(2));

    // Hermitian, unit trace, one negative eigenvalue
    let non_psd = write(
        dir.path(),
        "non_psd.json",
        r#"{"d1": 2, "d2": 2, "re": [[0.5, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0.5]]}"#,
    );
    assert_eq!(ctau(&["tau", "--state", &non_psd]).status.code(), Some(3));

    assert_eq!(ctau(&["tau", "--state", "/no/such/file.json"]).status.code(), Some(4));
    let unwritable = dir.path().join("missing").join("out.csv");
    assert_eq!(
        ctau(&["sweep", "--out", unwritable.to_str().unwrap()]).status.code(),
        Some(4)
    );
}

#[test]
fn verify_reports_injected_input_as_input_error() {
    let out = ctau(&["verify", "--trials", "20", "--seed", "3", "--inject-invalid"]);
    let v = json(&out);
    assert_eq!(v["hard_failures"].as_u64(), Some(0));
    let errs = v["input_errors"].as_array().unwrap();
    assert_eq!(errs.len(), 1);
    assert_eq!(errs[0]["class"], "invalid_object");
    for check in v["checks"].as_array().unwrap() {
        let cases = check["cases"].as_u64().unwrap();
        assert_eq!(
            cases,
            check["passed"].as_u64().unwrap() + check["failed"].as_u64().unwrap()
        );
        assert!(check["max_deviation"].as_f64().unwrap().is_finite());
    }
}
