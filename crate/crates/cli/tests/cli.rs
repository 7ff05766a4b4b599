//! Exit-code and output contract for the command-line interface.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wulff-willmore"))
}

fn repo_config() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../acceptance.json")
}

fn tmp_config(name: &str, body: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("wulff-cli-{}-{name}.json", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wulff-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn single_scenario_report_on_stdout() {
    let out = bin()
        .args(["verify", "--config"])
        .arg(repo_config())
        .args(["--scenario", "sphere_fullspace", "--json", "-", "--out-dir"])
        .arg(tmp_dir("single"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["scenario"], "sphere_fullspace");
    assert_eq!(report["status"], "equality");
}

#[test]
fn invalid_theta0_is_a_schema_error() {
    let cfg = tmp_config(
        "theta0",
        r#"{"scenarios": [{
            "name": "bad",
            "norm": {"family": "capillary", "theta0": 0.0},
            "region": {"kind": "half_space", "normal": [0, 0, 1]},
            "surface": {"kind": "sphere_cap", "radius": 1.0, "center": [0, 0, 0],
                        "clip": "upper_halfspace"},
            "theorem": "capillary_halfspace", "theta0": 0.0
        }]}"#,
    );
    let out = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .args(["--out-dir"])
        .arg(tmp_dir("theta0"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("theta0 out of open interval"), "stderr: {err}");
}

#[test]
fn duplicate_scenario_names_rejected() {
    let one = r#"{"name": "dup", "norm": {"family": "euclidean"},
        "region": {"kind": "full_space"},
        "surface": {"kind": "sphere_cap", "radius": 1.0, "center": [0, 0, 0]},
        "theorem": "iso_convex"}"#;
    let cfg = tmp_config("dup", &format!(r#"{{"scenarios": [{one}, {one}]}}"#));
    let out = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .args(["--out-dir"])
        .arg(tmp_dir("dup"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate scenario name"));
}

#[test]
fn violated_capillary_hypothesis_exits_3() {
    // a pi/3 cap claimed at contact angle 2pi/3: the boundary angle
    // condition fails, so the inequality is not asserted
    let cfg = tmp_config(
        "hyp",
        r#"{"scenarios": [{
            "name": "wrong_angle",
            "norm": {"family": "euclidean"},
            "region": {"kind": "half_space", "normal": [0, 0, 1]},
            "surface": {"kind": "sphere_cap", "radius": 1.0, "center": [0, 0, -0.5],
                        "clip": "upper_halfspace"},
            "theorem": "capillary_halfspace", "theta0": 2.0943951023931953,
            "order": 32
        }]}"#,
    );
    let out = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .args(["--out-dir"])
        .arg(tmp_dir("hyp"))
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn unresolved_quadrature_failure_exits_2() {
    // order 5 under-resolves this equality case below -tol, which must be
    // reported as a failure
    let cfg = tmp_config(
        "fail",
        r#"{"scenarios": [{
            "name": "coarse_cap",
            "norm": {"family": "euclidean"},
            "region": {"kind": "half_space", "normal": [0, 0, 1]},
            "surface": {"kind": "sphere_cap", "radius": 1.0, "center": [0, 0, 0.5],
                        "clip": "upper_halfspace"},
            "theorem": "capillary_halfspace", "theta0": 2.0943951023931953,
            "order": 5
        }]}"#,
    );
    let out = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .args(["--out-dir"])
        .arg(tmp_dir("fail"))
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(2),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn order_sweep_margin_shrinks() {
    let out = bin()
        .args(["sweep", "--config"])
        .arg(repo_config())
        .args([
            "--scenario",
            "sphere_fullspace",
            "--parameter",
            "order",
            "--grid",
            "8,16,32",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("parameter,lhs,rhs,margin,error"));
    let margins: Vec<f64> = lines
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(margins.len(), 3);
    assert!(
        margins[2].abs() <= margins[0].abs() + 1e-12,
        "margins {margins:?}"
    );
    assert!(margins[2].abs() <= 1e-9);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dirs = [tmp_dir("det-a"), tmp_dir("det-b")];
    for dir in &dirs {
        let out = bin()
            .args(["verify", "--config"])
            .arg(repo_config())
            .args(["--scenario", "cap_theta0_pi_3", "--out-dir"])
            .arg(dir)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(dirs[0].join("cap_theta0_pi_3.json")).unwrap();
    let b = std::fs::read(dirs[1].join("cap_theta0_pi_3.json")).unwrap();
    assert_eq!(a, b);
}
