use std::process::{Command, Output};

use serde_json::Value;

fn bohr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bohr")).args(args).output().expect("spawn bohr")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let o = bohr(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn field(v: &Value, key: &str) -> f64 {
    v["rows"][0][key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn lower_bound_command_examples() {
    let v = json(&["theorem1", "--optimize"]);
    assert!((field(&v, "r_star") - 0.563777).abs() < 1e-5);
    let v = json(&["theorem1", "--s", "0.5"]);
    assert!((field(&v, "r") - 0.55356).abs() < 1e-4);

    let o = bohr(&["--format", "json", "theorem1", "--s", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["error"].as_str().unwrap().contains("domain"));
}

#[test]
fn upper_bound_command_examples() {
    let v = json(&["theorem4", "--a", "0.35", "--R", "0.769"]);
    assert_eq!(v["rows"][0]["exceeded"], Value::Bool(true));
    let v = json(&["theorem4", "--a", "0.35", "--R", "0.70710678"]);
    assert_eq!(v["rows"][0]["exceeded"], Value::Bool(false));
    assert_eq!(bohr(&["theorem4", "--a", "0.6", "--R", "0.7"]).status.code(), Some(1));
}

#[test]
fn weight_and_bombieri_examples() {
    let v = json(&["weight-check", "--weight", "constant", "--r0", "1"]);
    assert_eq!(v["rows"][0]["passed"], Value::Bool(true));
    let v = json(&["weight-check", "--weight", "standard"]);
    assert_eq!(v["rows"][0]["r0"], Value::Null);
    assert_eq!(v["rows"][0]["passed"], Value::Bool(false));
    let v = json(&["weight-check", "--weight", "standard", "--r0", "0.8"]);
    assert!(v["rows"][0]["violation_witness"].is_number());

    let o = bohr(&["bombieri", "--r", "0.70710678"]);
    assert_eq!(stdout(&o), "r,m_infty,mobius_sup,cauchy_bound\n0.70710678,1.41421356,1.41421356,1.41421356\n");
    let v = json(&["bombieri", "--r", "0.70710678"]);
    assert!((field(&v, "m_infty") - std::f64::consts::SQRT_2).abs() < 1e-7);
}

#[test]
fn sharpness_and_profile() {
    let v = json(&["sharpness", "--weight", "example2:r0=0.8,alpha=1"]);
    assert_eq!(v["rows"][0]["passed"], Value::Bool(true));
    assert!(field(&v, "relative_gap") <= 1e-9);
    assert_eq!(bohr(&["sharpness", "--weight", "standard", "--r0", "0.8"]).status.code(), Some(1));

    let o = bohr(&["h-profile", "--r0", "0.8", "--n", "11"]);
    let text = stdout(&o);
    assert!(text.starts_with("r,omega1,omega2,h\n"));
    assert!(text.contains("\n0.8,1,1,1\n"));
}

#[test]
fn csv_is_byte_identical_across_runs() {
    let args = ["bombieri", "--n", "7"];
    assert_eq!(bohr(&args).stdout, bohr(&args).stdout);
    let args = ["theorem2-check", "--samples", "50", "--a-points", "20", "--grid", "128"];
    assert_eq!(bohr(&args).stdout, bohr(&args).stdout);
}

#[test]
fn unknown_and_non_decimal_tokens_rejected() {
    for args in [
        &["bogus"][..],
        &["theorem1", "--s", "5e-1"],
        &["theorem1", "--s", "inf"],
        &["theorem1", "--wat"],
        &["--format", "xml", "theorem1", "--optimize"],
    ] {
        let o = bohr(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty());
    }
    let o = bohr(&["weight-check", "--weight", "example2:r0=0.8,beta=1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn norms_reads_series_and_writes_out_file() {
    let dir = std::env::temp_dir().join(format!("bohr-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let series = dir.join("series.json");
    let out = dir.join("norms.csv");
    // f(z) = z + i z^2 / 2, so (1-r^2)|f'| peaks at r = 1/3 with value 32/27.
    std::fs::write(&series, r#"{"coeffs": [[0, 0], [1, 0], [0, 0.5]], "tail": {"rho": 0, "M": 0}}"#).unwrap();
    let o = bohr(&["--out", out.to_str().unwrap(), "norms", "--series", series.to_str().unwrap(), "--r", "0.5"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,sup_norm,l2_norm,coeff_sum,sup_theta,error_bound,bloch_norm"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[1] - 0.625).abs() < 1e-8);
    assert!((row[6] - 32.0 / 27.0).abs() < 1e-8);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_code_tracks_error_record() {
    for args in [&["theorem1", "--s", "0.25"][..], &["theorem1", "--s", "1.5"], &["theorem1"]] {
        let o = bohr(args);
        let has_error = stdout(&o).starts_with("error\n");
        assert_eq!(o.status.success(), !has_error, "{args:?}");
    }
}
