use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn catlep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catlep")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn default_lep3_is_the_reference_point() {
    let v = json(&catlep(&["lep3"]));
    assert_eq!(v["exists"], true);
    assert!((v["eps_norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["delta_norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn lep3_phase_dependence() {
    let v = json(&catlep(&["--theta", "0", "lep3"]));
    assert!((v["eps_norm"].as_f64().unwrap() - 1.41).abs() < 0.02);
    let v = json(&catlep(&["--theta", "0.5pi", "lep3"]));
    assert_eq!(v["exists"], false);
    assert!(v["refined_eps"].is_null());
}

#[test]
fn winding_loops() {
    let v = json(&catlep(&["winding"]));
    assert_eq!(v["w"].as_i64().unwrap().abs(), 1);
    assert_eq!(v["confidence"], "refined");
    let v = json(&catlep(&["winding", "--center", "1.5,1"]));
    assert_eq!(v["w"], 0);
    for n in ["64", "256", "1024", "4096"] {
        let v = json(&catlep(&["winding", "--samples", n]));
        assert_eq!(v["w"].as_i64().unwrap().abs(), 1);
    }
    let cw = json(&catlep(&["winding", "--clockwise"]));
    assert_eq!(cw["w"].as_i64().unwrap(), -json(&catlep(&["winding"]))["w"].as_i64().unwrap());
}

#[test]
fn zero_radius_is_a_usage_error() {
    let out = catlep(&["winding", "--radii", "0,0.4"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_and_io_exit_codes() {
    assert_eq!(code(&catlep(&["--bogus"])), 2);
    assert_eq!(code(&catlep(&["--kappa", "-1", "spectrum"])), 2);
    assert_eq!(code(&catlep(&["--kappa2", "2", "spectrum"])), 2);
    assert_eq!(code(&catlep(&["--config", "/nonexistent/config.json", "spectrum"])), 3);
    assert_eq!(code(&catlep(&["--out", "/nonexistent/dir/out.json", "spectrum"])), 3);
    assert_eq!(code(&catlep(&["--help"])), 0);
}

#[test]
fn csv_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        let out = catlep(&["--seed", seed, "--format", "csv", "--out", p, "spectrum", "--random-draws", "200"]);
        assert!(out.status.success());
        std::fs::read(&path).unwrap()
    };
    let a = run("a.csv", "3");
    let b = run("b.csv", "3");
    let c = run("c.csv", "4");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let text = String::from_utf8(a).unwrap();
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().next().unwrap(), "kappa,eps,delta,eps2,theta,rel_dev,reciprocal_dev,max_re");
    assert_eq!(text.lines().count(), 201);
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[5] < 1e-10 && f[6] < 1e-10 && f[7] <= 1e-12);
    }
}

#[test]
fn json_round_trips() {
    let v = json(&catlep(&["spectrum"]));
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(v, again);
    let e = v["eigenvalues"].as_array().unwrap();
    assert_eq!(e.len(), 4);
    assert_eq!(e[0][0].as_f64().unwrap(), 0.0);
    assert!((v["alpha"][0].as_f64().unwrap() - 1.3638181696985856).abs() < 1e-15);
}

#[test]
fn contours_csv_schema() {
    let out = catlep(&["contours", "--eps-count", "81", "--delta-count", "81"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "contour_id,which,eps,delta");
    let mut kinds = std::collections::BTreeSet::new();
    for l in lines {
        let cols: Vec<&str> = l.split(',').collect();
        assert_eq!(cols.len(), 4);
        kinds.insert(cols[1].to_string());
    }
    assert!(kinds.contains("R1") && kinds.contains("R2"));
}

#[test]
fn sweep_over_theta() {
    let out = catlep(&["sweep", "--count", "9"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "sweep_var,eps_abs,delta_abs,eps_norm,delta_norm,exists");
    assert_eq!(rows.len(), 10);
    // θ = π/2 is the third point.
    assert!(rows[3].ends_with("false"));
}

#[test]
fn config_file_in_absolute_units() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"units": "absolute_hz", "kappa": 14e3, "kappa2": 2.16e6, "eps": 15e3, "eps2": 2.008e6, "theta": 4.71238898038469}"#,
    )
    .unwrap();
    let v = json(&catlep(&["--config", cfg.to_str().unwrap(), "params"]));
    assert_eq!(v["units"], "absolute_hz");
    let n = &v["normalized"];
    assert!((n["kappa"].as_f64().unwrap() - 14e3 / 2.16e6).abs() < 1e-15);
    assert!((n["eps2"].as_f64().unwrap() - 0.9296296296296296).abs() < 1e-15);

    std::fs::write(&cfg, r#"{"kapa": 0.01}"#).unwrap();
    assert_eq!(code(&catlep(&["--config", cfg.to_str().unwrap(), "params"])), 2);
}

#[test]
fn small_validation_run() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let csv = dir.path().join("fid.csv");
    let out = catlep(&[
        "--out",
        csv.to_str().unwrap(),
        "validate",
        "--delta-count",
        "2",
        "--t-max",
        "2",
        "--t-count",
        "3",
        "--no-doubled-check",
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s: Value = serde_json::from_slice(&std::fs::read(&summary).unwrap()).unwrap();
    assert!(s["min_fidelity"].as_f64().unwrap() > 0.99);
    assert_eq!(s["dim"], 27);
    assert!(s["dim_doubled_check"].is_null());
    let text = std::fs::read_to_string(Path::new(&csv)).unwrap();
    assert_eq!(text.lines().count(), 7);
}
