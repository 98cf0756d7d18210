use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn apapr(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_apapr"));
    cmd.args(args).env_remove("APAPR_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let Output {
        status,
        stdout,
        stderr,
    } = cmd.output().expect("binary runs");
    Run {
        code: status.code().expect("exit code"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn spec(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("valid JSON")
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

fn check<'a>(report: &'a Value, id: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == id)
        .unwrap_or_else(|| panic!("no check {id}"))
}

#[test]
fn verify_flat_cone_passes() {
    let dir = TempDir::new().unwrap();
    let p = spec(
        &dir,
        "s.json",
        r#"{"construction": "cone", "base": {"kind": "round", "k_prime": 1}, "sampling": {"count": 6, "seed": 5}}"#,
    );
    let r = apapr(&["verify", "--spec", s(&p)], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report = json(&r.stdout);
    assert_eq!(report["pass"], true);
    assert_eq!(check(&report, "cone_flat")["pass"], true);
    assert_eq!(report["metadata"]["point_count"], 6);
    assert_eq!(report["metadata"]["seed"], 5);
    for point in report["points"].as_array().unwrap() {
        assert!(f(&point["tau"]).abs() < 1e-8);
    }
    assert!(
        r.stderr.lines().all(|l| l.starts_with("PASS ")),
        "{}",
        r.stderr
    );
}

#[test]
fn verify_flat_extension() {
    let dir = TempDir::new().unwrap();
    let p = spec(
        &dir,
        "s.json",
        r#"{"construction": "hyperbolic_extension", "base": {"kind": "flat_product"},
            "points": [[0.5, 0, 0], [1.5, 0.2, -0.3]]}"#,
    );
    let r = apapr(&["verify", "--spec", s(&p)], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report = json(&r.stdout);
    assert_eq!(report["base_is_w0"], true);
    assert_eq!(report["metadata"]["seed"], Value::Null);
    for id in [
        "lee_forms",
        "ext_k0i",
        "ext_para_eta_einstein",
        "ext_ricci_star",
        "ext_f4",
    ] {
        assert_eq!(check(&report, id)["pass"], true, "{id}");
    }
    for point in report["points"].as_array().unwrap() {
        assert!((f(&point["theta"][0]) + 2.0).abs() < 1e-8);
        assert!((f(&point["k01"]) + 1.0).abs() < 1e-8);
        assert_eq!(point["membership"], serde_json::json!(["F4"]));
    }
}

#[test]
fn failing_check_exits_one_and_still_writes_the_report() {
    let dir = TempDir::new().unwrap();
    let p = spec(
        &dir,
        "s.json",
        r#"{"construction": "cone", "base": {"kind": "flat_product"}, "points": [[1, 0, 0]]}"#,
    );
    let out = dir.path().join("r.json");
    // with a huge class tolerance the F5 part no longer counts as present
    let r = apapr(
        &[
            "verify",
            "--spec",
            s(&p),
            "--out",
            s(&out),
            "--tol-class",
            "1e3",
        ],
        &[],
    );
    assert_eq!(r.code, 1, "{}", r.stderr);
    assert!(r.stderr.contains("FAIL "));
    let report = json(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(report["pass"], false);
    assert_eq!(check(&report, "cone_f5")["pass"], false);
    assert_eq!(check(&report, "structure")["pass"], true);
}

#[test]
fn errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let empty = spec(
        &dir,
        "e.json",
        r#"{"construction": "cone", "base": {"kind": "flat_product"}, "sampling": {"count": 0}}"#,
    );
    let r = apapr(&["verify", "--spec", s(&empty)], &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("empty sample"), "{}", r.stderr);
    assert!(r.stdout.is_empty());

    let r = apapr(
        &["verify", "--spec", s(&dir.path().join("missing.json"))],
        &[],
    );
    assert_eq!(r.code, 2);

    let bad = spec(&dir, "b.json", r#"{"construction": "cylinder"}"#);
    assert_eq!(apapr(&["classify", "--spec", s(&bad)], &[]).code, 2);

    let ok = spec(
        &dir,
        "ok.json",
        r#"{"construction": "cone", "base": {"kind": "flat_product"}, "points": [[1, 0, 0]]}"#,
    );
    let r = apapr(&["classify", "--spec", s(&ok), "--point", "-1,0,0"], &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("--point"), "{}", r.stderr);
    assert_eq!(
        apapr(&["verify", "--spec", s(&ok), "--tol-class", "-1"], &[]).code,
        2
    );
    assert_eq!(
        apapr(&["curvature", "--spec", s(&ok)], &[("APAPR_THREADS", "0")]).code,
        2
    );
}

fn membership(spec_body: &str, point: &str) -> Value {
    let dir = TempDir::new().unwrap();
    let p = spec(&dir, "s.json", spec_body);
    let r = apapr(&["classify", "--spec", s(&p), "--point", point], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    json(&r.stdout)["points"][0]["membership"].clone()
}

#[test]
fn classify_examples() {
    let cone_flat =
        r#"{"construction": "cone", "base": {"kind": "flat_product"}, "sampling": {"count": 1}}"#;
    assert_eq!(membership(cone_flat, "1,0,0"), serde_json::json!(["F5"]));
    let cone_conformal = r#"{"construction": "cone", "base": {"kind": "conformal", "u": "x + y", "p_kind": "swap"},
                            "sampling": {"count": 1}}"#;
    assert_eq!(
        membership(cone_conformal, "1,0.3,0.2"),
        serde_json::json!(["F1", "F5"])
    );
    let ext_flat = r#"{"construction": "hyperbolic_extension", "base": {"kind": "flat_product"}, "sampling": {"count": 1}}"#;
    assert_eq!(
        membership(ext_flat, "0.7,-0.2,0.4"),
        serde_json::json!(["F4"])
    );
}

#[test]
fn classify_defaults_to_the_spec_points() {
    let dir = TempDir::new().unwrap();
    let p = spec(
        &dir,
        "s.json",
        r#"{"construction": "cone", "base": {"kind": "flat_swap"}, "sampling": {"count": 4, "seed": 11}}"#,
    );
    let r = apapr(&["classify", "--spec", s(&p)], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report = json(&r.stdout);
    assert_eq!(report["points"].as_array().unwrap().len(), 4);
    assert_eq!(report["metadata"]["seed"], 11);
}

#[test]
fn curvature_of_the_round_cone_on_a_grid() {
    let dir = TempDir::new().unwrap();
    let p = spec(
        &dir,
        "s.json",
        r#"{"construction": "cone", "base": {"kind": "round", "k_prime": 4},
            "sampling": {"count": 1, "t_range": [1, 2], "xy_box": [-0.5, 0.5]}}"#,
    );
    let r = apapr(&["curvature", "--spec", s(&p), "--grid", "2"], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let points = json(&r.stdout)["points"].as_array().unwrap().clone();
    assert_eq!(points.len(), 8);
    for point in &points {
        let t = f(&point["t"]);
        let want = if t == 1.0 { 6.0 } else { 1.5 };
        assert!((f(&point["tau"]) - want).abs() < 1e-8, "{point}");
        assert!(f(&point["tau_star"]).abs() < 1e-8);
        assert!((f(&point["k12"]) - 3.0 / (t * t)).abs() < 1e-8);
    }
}

#[test]
fn curvature_of_the_flat_extension() {
    let dir = TempDir::new().unwrap();
    let p = spec(
        &dir,
        "s.json",
        r#"{"construction": "hyperbolic_extension", "base": {"kind": "flat_product"}, "sampling": {"count": 5}}"#,
    );
    let r = apapr(&["curvature", "--spec", s(&p)], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    for point in json(&r.stdout)["points"].as_array().unwrap() {
        assert!((f(&point["tau"]) + 2.0).abs() < 1e-8);
        assert!(f(&point["tau_star"]).abs() < 1e-8);
    }
}

const SAMPLED: &str = r#"{"construction": "cone", "base": {"kind": "conformal", "u": "0.3*x - 0.2*y^2"},
                          "sampling": {"count": 6, "seed": 9}}"#;

#[test]
fn reports_are_byte_reproducible_and_independent_of_threads() {
    let dir = TempDir::new().unwrap();
    let p = spec(&dir, "s.json", SAMPLED);
    let run = |threads: &str, name: &str| {
        let out = dir.path().join(name);
        let r = apapr(
            &["verify", "--spec", s(&p), "--out", s(&out)],
            &[("APAPR_THREADS", threads)],
        );
        assert_eq!(r.code, 0, "{}", r.stderr);
        std::fs::read(out).unwrap()
    };
    let a = run("1", "a.json");
    assert_eq!(a, run("1", "b.json"));
    assert_eq!(a, run("3", "c.json"));
    let other = apapr(&["verify", "--spec", s(&p), "--seed", "10"], &[]);
    assert_ne!(a, other.stdout.into_bytes());
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let dir = TempDir::new().unwrap();
    let p = spec(&dir, "s.json", SAMPLED);
    let j = json(&apapr(&["verify", "--spec", s(&p)], &[]).stdout);
    let c = apapr(&["verify", "--spec", s(&p), "--format", "csv"], &[]).stdout;
    let mut lines = c.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&header[..5], ["index", "t", "x", "y", "structure_residual"]);
    assert_eq!(*header.last().unwrap(), "membership");
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let points = j["points"].as_array().unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), points.len());
    for (row, point) in rows.iter().zip(points) {
        for (column, value) in [
            ("tau", &point["tau"]),
            ("k12", &point["k12"]),
            ("theta_star_0", &point["theta_star"][0]),
            ("rho_12", &point["ricci"][1][2]),
            ("F_120", &point["f"][1][2][0]),
            ("R_1212", &point["riemann"][1][2][1][2]),
            ("norm_F5", &point["class_norms"]["F5"]),
        ] {
            assert_eq!(row[col(column)], value.to_string(), "{column}");
        }
        assert_eq!(row[col("membership")], "F1 F5");
    }
}
