use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use margulis_core::{build_halfspaces, margin_lp, DeformationSpace, SchottkyGroup};
use serde_json::Value;
use tempfile::TempDir;

fn margulis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_margulis"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SPHERE: [&str; 2] = ["--preset", "three_holed_sphere"];

#[test]
fn group_preset_echoes_boundary_lengths() {
    let out = margulis(&[
        "group",
        "--preset",
        "three_holed_sphere",
        "--params",
        r#"{"l1":4,"l2":4}"#,
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let b = v["boundary"].as_array().unwrap();
    for side in &b[..2] {
        assert!((side["ell"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    }
    assert!(v["margin"].as_f64().unwrap() > 0.0);
}

#[test]
fn near_identity_generators_are_rejected() {
    let dir = TempDir::new().unwrap();
    let (c, s) = (
        (std::f64::consts::PI / 8.0).cos(),
        (std::f64::consts::PI / 8.0).sin(),
    );
    let (e, f) = (1.05f64, 1.0 / 1.05);
    let body = format!(
        "{{\"generators\": [[{e},0,0,{f}],[{},{},{},{}]]}}",
        c * c * e + s * s * f,
        c * s * (e - f),
        c * s * (e - f),
        s * s * e + c * c * f
    );
    let g = write(dir.path(), "g.json", &body);
    let out = margulis(&["group", "--group", &g]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ping-pong") && err.contains("I_1^+"), "{err}");
}

#[test]
fn malformed_json_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.json", "{not json");
    assert_eq!(code(&margulis(&["group", "--group", &g])), 3);
    assert_eq!(code(&margulis(&["group", "--preset", "klein_bottle"])), 3);
    assert_eq!(
        code(&margulis(&[
            "cone",
            "--preset",
            "three_holed_sphere",
            "--L",
            "13"
        ])),
        3
    );
}

#[test]
fn group_file_and_preset_agree() {
    let dir = TempDir::new().unwrap();
    let g = write(
        dir.path(),
        "g.json",
        r#"{"r": 1, "preset": "one_holed_torus", "params": {"l1": 5, "l2": 5}}"#,
    );
    let a = margulis(&["group", "--group", &g]);
    let b = margulis(&["group", "--preset", "one_holed_torus"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn zero_cocycle_has_zero_invariants() {
    let dir = TempDir::new().unwrap();
    let u = write(dir.path(), "u.json", r#"{"u": [[0,0,0],[0,0,0]]}"#);
    let out = margulis(&[
        "invariants",
        SPHERE[0],
        SPHERE[1],
        "--cocycle",
        &u,
        "--L",
        "4",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 50);
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["alpha"].as_f64().unwrap(), 0.0);
        assert!(v["ell"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn cache_never_changes_output() {
    let dir = TempDir::new().unwrap();
    let u = write(
        dir.path(),
        "u.json",
        r#"{"u": [[0.1,-0.4,0.3],[0.2,0.5,-0.1]]}"#,
    );
    let cache = dir.path().join("cache");
    let cache = cache.to_str().unwrap();
    let base = [
        "invariants",
        SPHERE[0],
        SPHERE[1],
        "--cocycle",
        &u,
        "--L",
        "6",
    ];
    let cold = margulis(&base);
    let with = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        margulis(&args)
    };
    let first = with(&["--cache", cache]);
    let warm = with(&["--cache", cache]);
    assert_eq!(code(&first), 0);
    assert_eq!(cold.stdout, first.stdout);
    assert_eq!(first.stdout, warm.stdout);

    // a stale record is ignored and the file rewritten
    let file = fs::read_dir(cache).unwrap().next().unwrap().unwrap().path();
    let mut text = fs::read_to_string(&file).unwrap();
    text.push_str(
        "{\"hash\":\"00\",\"r\":1,\"word\":\"a\",\"ell\":1.0,\"coefficients\":[0,0,0,0,0,0]}\n",
    );
    fs::write(&file, text).unwrap();
    assert_eq!(with(&["--cache", cache]).stdout, cold.stdout);
    assert!(!fs::read_to_string(&file)
        .unwrap()
        .contains("\"hash\":\"00\""));
}

#[test]
fn fold_inverses_halves_odd_tables() {
    let dir = TempDir::new().unwrap();
    let u = write(
        dir.path(),
        "u.json",
        r#"{"u": [[0.1,-0.4,0.3],[0.2,0.5,-0.1]]}"#,
    );
    let out = margulis(&[
        "invariants",
        SPHERE[0],
        SPHERE[1],
        "--cocycle",
        &u,
        "--L",
        "1",
        "--fold-inverses",
    ]);
    let words: Vec<String> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| {
            serde_json::from_str::<Value>(l).unwrap()["word"]
                .as_str()
                .unwrap()
                .to_string()
        })
        .collect();
    assert_eq!(words, ["a", "b"]);
}

#[test]
fn cocycle_dimension_mismatch_exits_2() {
    let dir = TempDir::new().unwrap();
    let u = write(dir.path(), "u.json", r#"{"u": [[0,0,0],[0,0,0]]}"#);
    let out = margulis(&[
        "invariants",
        SPHERE[0],
        SPHERE[1],
        "--r",
        "2",
        "--cocycle",
        &u,
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension mismatch"));
}

#[test]
fn sphere_cone_is_feasible_with_polygon() {
    let dir = TempDir::new().unwrap();
    let section = dir.path().join("section.json");
    let report = dir.path().join("report.json");
    let out = margulis(&[
        "cone",
        SPHERE[0],
        SPHERE[1],
        "--L",
        "8",
        "--section",
        section.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let t = v["t_plus"].as_f64().unwrap();
    assert!(t > 0.0);
    assert!((t - v["t_minus"].as_f64().unwrap()).abs() < 1e-9);

    // the witness clears every constraint of the same grading
    let s = DeformationSpace::new(SchottkyGroup::three_holed_sphere(4.0, 4.0).unwrap(), 1).unwrap();
    let h = build_halfspaces(&s, 8, false).unwrap();
    let x: Vec<f64> = v["witness_plus"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a.as_f64().unwrap())
        .collect();
    let x = nalgebra::DVector::from_vec(x);
    assert!(h.evaluate(&x).unwrap().iter().all(|f| *f >= t - 1e-12));

    let cs: Value = serde_json::from_str(&fs::read_to_string(&section).unwrap()).unwrap();
    assert_eq!(cs["L"], 8);
    assert!(cs["vertices"].as_array().unwrap().len() >= 3);
    assert!(cs["area"].as_f64().unwrap() > 0.0);
}

#[test]
fn even_r_reports_carry_the_flag() {
    let out = margulis(&["cone", SPHERE[0], SPHERE[1], "--L", "2", "--r", "2"]);
    assert_eq!(code(&out), 0);
    let notes = stdout_json(&out)["notes"].to_string();
    assert!(notes.contains("even r: no proper actions in this dimension"));
}

#[test]
fn torus_areas_shrink() {
    let out = margulis(&["report", "--preset", "one_holed_torus", "--L", "8"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("L,count,t_plus,t_minus,area"));
    let areas: Vec<f64> = lines
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert_eq!(areas.len(), 8);
    assert!(areas[1..].windows(2).any(|a| a[1] < a[0]));
}

#[test]
fn mixed_cocycle_is_certified() {
    let dir = TempDir::new().unwrap();
    // u(a) pairs to -1 with the neutral vector xy of the diagonal generator
    let u = write(dir.path(), "u.json", r#"{"u": [[0,-1,0],[0.3,0.2,0.1]]}"#);
    let out = margulis(&["certify", SPHERE[0], SPHERE[1], "--cocycle", &u, "--L", "1"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert!(v["certificate"]["negative"]["alpha"].as_f64().unwrap() < 0.0);
    assert!(v["certificate"]["positive"]["alpha"].as_f64().unwrap() > 0.0);
    let weights: f64 = v["zero_current"]["atoms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["weight"].as_f64().unwrap())
        .sum();
    assert!((weights - 1.0).abs() < 1e-12);
    assert!(v["psi"].as_f64().unwrap().abs() <= 1e-10);
}

#[test]
fn lp_witness_has_no_certificate() {
    let s = DeformationSpace::new(SchottkyGroup::three_holed_sphere(4.0, 4.0).unwrap(), 1).unwrap();
    let h = build_halfspaces(&s, 8, false).unwrap();
    let u = s
        .cocycle_from_coords(&margin_lp(&h, 1).unwrap().witness)
        .unwrap();
    let body = serde_json::json!({ "u": u.values().iter().map(|v| v.as_slice().to_vec()).collect::<Vec<_>>() });
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "u.json", &body.to_string());
    let out = margulis(&[
        "certify",
        SPHERE[0],
        SPHERE[1],
        "--cocycle",
        &path,
        "--L",
        "8",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout_json(&out)["certificate"].is_null());
}

#[test]
fn coboundary_is_radiant() {
    let s = DeformationSpace::new(SchottkyGroup::three_holed_sphere(4.0, 4.0).unwrap(), 1).unwrap();
    let u = s
        .coboundary(&nalgebra::DVector::from_vec(vec![0.3, -1.2, 0.7]))
        .unwrap();
    let body = serde_json::json!({ "u": u.values().iter().map(|v| v.as_slice().to_vec()).collect::<Vec<_>>() });
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "u.json", &body.to_string());
    let out = margulis(&["certify", SPHERE[0], SPHERE[1], "--cocycle", &path]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("radiant (α ≡ 0)"));
}

#[test]
fn quadrature_matches_alpha_and_is_seeded() {
    let dir = TempDir::new().unwrap();
    let u = write(
        dir.path(),
        "u.json",
        r#"{"u": [[0.1,-0.4,0.3],[0.2,0.5,-0.1]]}"#,
    );
    let args = [
        "quadrature",
        SPHERE[0],
        SPHERE[1],
        "--cocycle",
        &u,
        "--word",
        "abAB",
        "--seed",
        "9",
    ];
    let a = margulis(&args);
    assert_eq!(code(&a), 0);
    assert!(stdout_json(&a)["abs_err"].as_f64().unwrap() <= 1e-6);
    assert_eq!(a.stdout, margulis(&args).stdout);
    let bad = margulis(&[
        "quadrature",
        SPHERE[0],
        SPHERE[1],
        "--cocycle",
        &u,
        "--word",
        "a1",
    ]);
    assert_eq!(code(&bad), 3);
}
