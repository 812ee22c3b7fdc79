use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn togglekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_togglekit"))
        .args(args)
        .env("TOGGLEKIT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = togglekit(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn phases(doc: &Value) -> Vec<f64> {
    doc["elements"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["phase"].as_f64().unwrap())
        .collect()
}

fn same_angle(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d) < 1e-12
}

#[test]
fn dual_of_narrowband_inverter() {
    let doc: Value = serde_json::from_str(&stdout(&["dual", "NB1_TPG"])).unwrap();
    let phi = (-0.25f64).acos();
    let got = phases(&doc);
    for (p, k) in got.iter().zip([1.0, 3.0, 4.0, 5.0, 7.0]) {
        assert!(same_angle(*p, k * phi), "{p} vs {k}φ");
        assert!((0.0..2.0 * PI).contains(p));
    }
}

#[test]
fn cycle_of_f1() {
    assert_eq!(stdout(&["cycle", "F1", "--max-m", "6"]), "2\n");
    assert_eq!(stdout(&["cycle", "P34", "--max-m", "6"]), "3\n");
    assert_eq!(stdout(&["cycle", "P34", "--max-m", "2"]), "none\n");
}

#[test]
fn profile_of_f1() {
    let text = stdout(&["profile", "F1"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "beta_prime,q,vx,vy,vz,err_deg");
    assert_eq!(lines.len(), 722);
    let q = |i: usize| lines[i].split(',').nth(1).unwrap().parse::<f64>().unwrap();
    assert_eq!(q(1), 1.0);
    assert!((q(361) + 1.0).abs() < 1e-12);
    assert!(text.ends_with('\n') && !text.contains('\r'));
}

#[test]
fn outputs_are_byte_identical() {
    for args in [
        &["profile", "PB1", "--xi", "x"][..],
        &["search", "--axes", "octahedron", "--n", "6", "--m", "4", "--target", "equatorial-pi", "--equatorial"],
        &["ddmap", "KDD20", "--omega-points", "5", "--scale-points", "7"],
    ] {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
}

#[test]
fn seventeen_significant_digits() {
    let text = stdout(&["trajectory", "P34", "--v0", "x"]);
    for field in text.lines().skip(1).flat_map(|l| l.split(',').skip(1)) {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.replace('.', "").len(), 17, "{field}");
    }
}

#[test]
fn file_inputs_and_degrees() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("xy.json");
    std::fs::write(
        &path,
        r#"{"name":"xy","elements":[{"beta":180,"phase":0},{"beta":180,"phase":90}]}"#,
    )
    .unwrap();
    let arg = format!("@{}", path.display());
    let doc: Value = serde_json::from_str(&stdout(&["--deg", "dual", &arg])).unwrap();
    let p = phases(&doc);
    assert!(same_angle(p[0], 0.0) && same_angle(p[1], -PI / 2.0));
    assert!((doc["elements"][0]["beta"].as_f64().unwrap() - PI).abs() < 1e-15);

    let shown = dir.path().join("f1.json");
    let out = dir.path().join("dual.json");
    std::fs::write(&shown, stdout(&["catalog", "show", "F1"])).unwrap();
    let shown_arg = format!("@{}", shown.display());
    stdout(&["dual", &shown_arg, "-o", out.to_str().unwrap()]);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let direct: Value = serde_json::from_str(&stdout(&["dual", "F1"])).unwrap();
    assert_eq!(written["name"], direct["name"]);
    assert!(phases(&written).iter().zip(phases(&direct)).all(|(a, b)| same_angle(*a, b)));
}

#[test]
fn decoupling_file_with_delays() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dd.json");
    std::fs::write(
        &path,
        r#"{"name":"x","elements":[{"beta":3.141592653589793,"phase":0}],"delays":[0,1]}"#,
    )
    .unwrap();
    let text = stdout(&["kappa", &format!("@{}", path.display()), "--lambda", "0"]);
    assert_eq!(text.lines().count(), 2);
    let re: f64 = text.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert_eq!(re, 1.0);
}

#[test]
fn search_lines_are_sequences() {
    let text = stdout(&[
        "search", "--axes", "octahedron", "--n", "6", "--m", "4", "--target", "axis-cycling", "--dedupe", "axis-set",
    ]);
    assert!(!text.is_empty());
    for line in text.lines() {
        let doc: Value = serde_json::from_str(line).unwrap();
        assert_eq!(doc["elements"].as_array().unwrap().len(), 6);
    }
    let text = stdout(&[
        "search", "--axes", "tet", "--n", "4", "--m", "3", "--target", "1,1,1@120", "--deg",
    ]);
    assert!(text.lines().count() >= 1);
}

#[test]
fn other_subcommands() {
    let c: Value = serde_json::from_str(&stdout(&["centroid", "F1"])).unwrap();
    assert_eq!(c["balanced"], Value::Bool(true));
    let c: Value = serde_json::from_str(&stdout(&["centroid", "NB1_TPG", "--frame", "0"])).unwrap();
    assert_eq!(c["balanced"], Value::Bool(true));
    let o: Value = serde_json::from_str(&stdout(&["orders", "F1"])).unwrap();
    assert_eq!(o["symmetry"], "antisymmetric");
    let g: Value = serde_json::from_str(&stdout(&["glide", "B':5", "N':5"])).unwrap();
    assert!(g["best"].as_f64().unwrap() < 1e-9);
    let conv: Value = serde_json::from_str(&stdout(&["convert24", "B':5"])).unwrap();
    assert_eq!(conv["elements"].as_array().unwrap().len(), 10);
    assert_eq!(stdout(&["mas", "--points", "5"]).lines().count(), 6);
    let twice: Value = serde_json::from_str(&stdout(&["toggle", "F1", "--m", "2", "--closed-form"])).unwrap();
    let f1: Value = serde_json::from_str(&stdout(&["catalog", "show", "F1"])).unwrap();
    assert!(phases(&twice).iter().zip(phases(&f1)).all(|(a, b)| same_angle(*a, b)));
    assert!(stdout(&["catalog", "list"]).lines().any(|l| l.starts_with("KDD20\t")));
}

#[test]
fn exit_codes() {
    assert_eq!(togglekit(&["dual", "Wimperis"]).status.code(), Some(1));
    assert_eq!(togglekit(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(togglekit(&["centroid", "F1", "--frame", "2"]).status.code(), Some(1));
    assert_eq!(togglekit(&["dual", "@/no/such/file.json"]).status.code(), Some(3));
    assert_eq!(togglekit(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = togglekit(&["dual", &format!("@{}", bad.display())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed JSON"));

    let blocked = dir.path().join("missing").join("out.csv");
    let out = togglekit(&["profile", "F1", "-o", blocked.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let threads = Command::new(env!("CARGO_BIN_EXE_togglekit"))
        .args(["cycle", "F1"])
        .env("TOGGLEKIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(1));
}

#[test]
fn verify_reports_every_criterion() {
    let out = togglekit(&["verify"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with('[')).collect();
    assert_eq!(lines.len(), 15);
    let all_pass = lines.iter().all(|l| l.starts_with("[PASS]"));
    assert_eq!(out.status.code(), Some(if all_pass { 0 } else { 2 }));
}
