use std::f64::consts::PI;
use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn backflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_backflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_result(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["metadata"]["tool"], "backflow");
    doc["result"].clone()
}

fn csv_body(out: &Output) -> Vec<String> {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let head = lines.next().unwrap();
    assert!(head.starts_with("# {"));
    serde_json::from_str::<Value>(&head[2..]).unwrap();
    lines.map(str::to_string).collect()
}

#[test]
fn fermion_single_mode_pair() {
    let r = json_result(&backflow(&["fermion", "--n", "1", "--alpha", "0.5", "--format", "json"]));
    assert!((r["q_f"].as_f64().unwrap() - 1.0 / PI).abs() < 1e-14);
}

#[test]
fn boson_vanishes_at_pi_for_one_mode() {
    let r = json_result(&backflow(&["boson", "--n", "1", "--alpha", "3.141592653589793", "--format", "json"]));
    assert!(r["q_b"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn kernel_dump_layout() {
    let lines = csv_body(&backflow(&["kernel", "dump", "--alpha", "0.5", "--n", "2"]));
    assert_eq!(lines[0], "m,n,value");
    assert_eq!(lines.len(), 1 + 9);
    let diag: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(diag, 0.0);
    let k11: f64 = lines[5].split(',').nth(2).unwrap().parse().unwrap();
    assert!((k11 - 1.0 / PI).abs() < 1e-15);
}

#[test]
fn single_scan_grid_rows() {
    let lines = csv_body(&backflow(&["single", "--n", "5", "--scan", "--hi", "0.1", "--step", "0.01"]));
    assert_eq!(lines[0], "n,alpha,min_lambda");
    assert_eq!(lines.len(), 1 + 10);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["single", "--n", "5"][..],
        &["single", "--n", "5", "--alpha", "0.3", "--scan"],
        &["figures", "fig9"],
        &["fermion", "--n", "5", "--alpha", "0.3", "--extrapolate"],
        &["--threads", "0", "single", "--n", "5", "--alpha", "0.3"],
    ] {
        assert_eq!(backflow(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn numerical_errors_exit_one_with_json() {
    for (args, kind) in [
        (&["single", "--n", "5", "--alpha=-1"][..], "invalid_alpha"),
        (&["fermion", "--n", "0", "--alpha", "0.3"], "no_antisymmetric_states"),
    ] {
        let out = backflow(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let d: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(d["kind"], kind);
    }
}

#[test]
fn missing_state_file_is_io_error() {
    let out = backflow(&["observables", "--state", "/nonexistent/state.json"]);
    assert_eq!(out.status.code(), Some(1));
    let d: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(d["error"], "io");
}

#[test]
fn observables_of_basis_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // boson basis state e0 ⊗ e1 symmetrized, N = 1
    fs::write(&path, format!(r#"{{"n_max": 1, "sigma": 1, "coefficients": [0, {s}, {s}, 0]}}"#)).unwrap();
    let lines = csv_body(&backflow(&[
        "observables",
        "--state",
        path.to_str().unwrap(),
        "--theta-points",
        "4",
        "--t-points",
        "2",
    ]));
    assert_eq!(lines[0], "theta,t,J,rho");
    assert_eq!(lines.len(), 1 + 8);
    for row in &lines[1..] {
        let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[2] - 1.0 / (2.0 * PI)).abs() < 1e-12);
        assert!((v[3] - 1.0 / PI).abs() < 1e-12);
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["fermion", "--n", "6", "--scan", "--hi", "0.3", "--step", "0.02"];
    let one = backflow(&[&["--threads", "1"][..], &args].concat());
    let many = backflow(&args);
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.csv");
    let args = ["kernel", "dump", "--alpha", "0.7", "--n", "3"];
    let stdout = backflow(&args).stdout;
    let out = backflow(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read(&path).unwrap(), stdout);
}

#[test]
fn verify_small_run_passes() {
    let out = backflow(&["verify", "--trials", "20", "--random-states", "5"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    let lines: Vec<&str> = text.lines().collect();
    let (summary, checks) = lines.split_last().unwrap();
    assert!(checks.iter().all(|l| l.starts_with("PASS")), "{text}");
    assert!(summary.ends_with("checks passed"));
}
