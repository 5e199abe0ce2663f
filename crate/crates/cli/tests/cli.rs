//! End-to-end tests of the binary: exit codes, shipped examples, output
//! determinism, machine-readable diagnostics.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ustokes"))
}

fn specs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn shipped_specs_pass_verification() {
    for name in ["general_solution.json", "swirl_decay.json", "forced_power.json"] {
        let out = bin()
            .args(["verify", "--spec"])
            .arg(specs_dir().join(name))
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stderr(&out));
        assert!(stdout(&out).contains("verdict: pass"), "{name}: {}", stdout(&out));
    }
}

#[test]
fn construct_json_output_is_deterministic() {
    let run = || {
        bin()
            .args(["construct", "--json", "--spec"])
            .arg(specs_dir().join("general_solution.json"))
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b), "output must be byte-identical across runs");
    // The last stdout line is the JSON report in the documented shape.
    let json_line = stdout(&a).lines().last().unwrap().to_string();
    let parsed: serde_json::Value = serde_json::from_str(&json_line).unwrap();
    assert!(parsed["pass"].as_bool().unwrap());
    assert!(parsed["residuals"]["momentum"]["max"].is_f64());
    // 17 significant digits in the raw text.
    assert!(json_line.contains("e0") || json_line.contains("e-"));
}

#[test]
fn invalid_spec_exits_2_with_diagnostic() {
    // B = z exp(t) with T = 0 violates the toroidal balance.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"nu":1.0,"mu":1.0,"rho":1.0,"p0":0.0,
           "B":[{"n":1,"m":0,"radial":{"kind":"solid_growing"},
                 "time":{"kind":"exp","sigma":1.0},"coeff":1.0}]}"#,
    )
    .unwrap();
    let out = bin().args(["verify", "--spec"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    let parsed: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(parsed["error"]["kind"], "spec_validation");
    assert!(
        parsed["error"]["message"].as_str().unwrap().contains("toroidal balance"),
        "diagnostic must name the violated balance: {err}"
    );
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = bin().args(["verify", "--spec"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("format"));
}

#[test]
fn demo_counterexample_reports_and_exits_1() {
    let out = bin().args(["demo-counterexample", "--json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    // Loop integrals 2 pi and 2 pi e at t = 0 and t = 1.
    assert!(text.contains("6.283185e0"), "{text}");
    assert!(text.contains("1.707947e1"), "{text}");
    assert!(text.contains("vorticity_condition"));
    let json_line = text.lines().last().unwrap();
    let parsed: serde_json::Value = serde_json::from_str(json_line).unwrap();
    assert!(!parsed["report"]["pass"].as_bool().unwrap());
    let loops = parsed["loop_integrals"].as_array().unwrap();
    assert_eq!(loops.len(), 2);
    let l0 = loops[0]["loop"].as_f64().unwrap();
    assert!((l0 - 2.0 * std::f64::consts::PI).abs() < 1e-5);
}

#[test]
fn decompose_recovers_rigid_rotation() {
    let out = bin()
        .args(["decompose", "--lmax", "4", "--json", "--samples"])
        .arg(specs_dir().join("rigid_rotation.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    // B corresponds to B = -z: coefficient -sqrt(4 pi/3) * r at r = 1.4.
    assert!(text.contains("B = -2.865315e0"), "{text}");
    let json_line = text.lines().last().unwrap();
    let parsed: serde_json::Value = serde_json::from_str(json_line).unwrap();
    assert_eq!(parsed["lmax"], 4);
    // Flat index of (n=1, m=0) is 2.
    let b_val = parsed["B"][0][5][2].as_f64().unwrap();
    assert!((b_val + 2.046653415892977 * 1.4).abs() < 1e-6, "B(1,0) = {b_val}");
}

#[test]
fn psi_short_time_value() {
    let out = bin()
        .args(["psi", "--ball", "2", "--point", "0,0,0", "--t", "0.01", "--json", "--pressure"])
        .arg(specs_dir().join("unit_pressure.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json_line = stdout(&out).lines().last().unwrap().to_string();
    let parsed: serde_json::Value = serde_json::from_str(&json_line).unwrap();
    let psi = parsed[0]["psi"].as_f64().unwrap();
    assert!((psi + 0.01).abs() < 1e-5, "psi = {psi}");
}

#[test]
fn psi_budget_error_exits_2() {
    let out = bin()
        .args([
            "psi", "--ball", "2", "--point", "0.3,0,0", "--t", "0.05", "--budget", "3,2,3,2",
            "--tol", "1e-10", "--pressure",
        ])
        .arg(specs_dir().join("unit_pressure.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("quadrature_budget"));
}

#[test]
fn suite_is_deterministic() {
    let run = || bin().args(["suite", "--count", "2", "--seed", "3", "--json"]).output().unwrap();
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("\"pass\":true"));
}
