use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const EUCLIDEAN_SQUARE: &str = r#"{
  "points": ["a", "b", "c", "d", "w"],
  "infinite_point": "w",
  "distances": [
    [0, 1, 1.4142135623730951, 1, "inf"],
    [1, 0, 1, 1.4142135623730951, "inf"],
    [1.4142135623730951, 1, 0, 1, "inf"],
    [1, 1.4142135623730951, 1, 0, "inf"],
    ["inf", "inf", "inf", "inf", 0]
  ]
}"#;

const L1_SQUARE: &str = "a,b,c,d\n0,1,2,1\n1,0,1,2\n2,1,0,1\n1,2,1,0\n";

const EUCLIDEAN_SQUARE_FINITE: &str = r#"{
  "points": ["a", "b", "c", "d"],
  "distances": [
    [0, 1, 1.4142135623730951, 1],
    [1, 0, 1, 1.4142135623730951],
    [1.4142135623730951, 1, 0, 1],
    [1, 1.4142135623730951, 1, 0]
  ]
}"#;

fn moebius(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moebius"))
        .args(args)
        .env_remove("MOEBIUS_OUTPUT")
        .env_remove("MOEBIUS_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_distinguishes_valid_invalid_and_malformed() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(&dir, "square.json", EUCLIDEAN_SQUARE);
    let bad = write(&dir, "bad.json", r#"{"points": ["a","b","c"], "distances": [[0,1,5],[1,0,1],[5,1,0]]}"#);
    let broken = write(&dir, "broken.json", "{");
    let out = moebius(&["validate", s(&good), "--output", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["valid"], true);
    let out = moebius(&["validate", s(&bad), "--output", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["report"]["violations"][0]["axiom"], "triangle");
    assert_eq!(moebius(&["validate", s(&broken)]).status.code(), Some(2));
    assert_eq!(moebius(&["validate", "/nonexistent/space.json"]).status.code(), Some(2));
}

#[test]
fn crt_of_collinear_points_with_infinity() {
    let dir = tempfile::tempdir().unwrap();
    let line = write(
        &dir,
        "line.json",
        r#"{"points": ["x", "y", "z", "w"], "infinite_point": "w",
            "distances": [[0, 1, 3, "inf"], [1, 0, 2, "inf"], [3, 2, 0, "inf"], ["inf", "inf", "inf", 0]]}"#,
    );
    let out = moebius(&["crt", s(&line), "x", "y", "z", "w", "--output", "json", "--arithmetic", "exact"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["exact"]["triple"], serde_json::json!(["1/3", "1", "2/3"]));
    assert_eq!(v["exact"]["ptolemy_defect"], "0");
    assert_eq!(moebius(&["crt", s(&line), "x", "y", "z"]).status.code(), Some(2));
    assert_eq!(moebius(&["crt", s(&line), "x", "x", "x", "y"]).status.code(), Some(2));
    assert_eq!(moebius(&["crt", s(&line), "x", "y", "z", "nope"]).status.code(), Some(2));
}

#[test]
fn check_ptolemy_exit_codes_and_exact_witness() {
    let dir = tempfile::tempdir().unwrap();
    let euclid = write(&dir, "square.json", EUCLIDEAN_SQUARE);
    let l1 = write(&dir, "l1.csv", L1_SQUARE);
    assert_eq!(moebius(&["check-ptolemy", s(&euclid)]).status.code(), Some(0));
    let out = moebius(&["check-ptolemy", s(&l1), "--arithmetic", "exact", "--output", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["status"], "fail");
    assert_eq!(v["exact_max_defect"], "1/2");
    assert_eq!(v["witness"].as_array().unwrap().len(), 4);
}

#[test]
fn invert_round_trips_through_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let square = write(&dir, "square.json", EUCLIDEAN_SQUARE);
    let csv_out = dir.path().join("inv.csv");
    let out = moebius(&["invert", s(&square), "--at", "a", "--radius", "2", "--report", s(&csv_out)]);
    assert_eq!(out.status.code(), Some(0));
    let json_out = dir.path().join("inv.json");
    moebius(&["invert", s(&square), "--at", "a", "--radius", "2", "--output", "json", "--report", s(&json_out)]);
    let v: Value = serde_json::from_str(&fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(v["infinite_point"], "a");
    // inverting back at the old infinite point restores the table
    let back = moebius(&["invert", s(&csv_out), "--at", "w", "--radius", "2", "--output", "json"]);
    assert_eq!(back.status.code(), Some(0), "{}", String::from_utf8_lossy(&back.stderr));
    let v = json(&back);
    assert_eq!(v["infinite_point"], "w");
    let d = v["distances"][0][2].as_f64().unwrap();
    assert!((d - 2f64.sqrt()).abs() < 1e-14, "{d}");
    assert_eq!(moebius(&["invert", s(&square), "--at", "w"]).status.code(), Some(2));
}

#[test]
fn equivalence_flags_the_l1_square() {
    let dir = tempfile::tempdir().unwrap();
    let euclid = write(&dir, "square.json", EUCLIDEAN_SQUARE_FINITE);
    let l1 = write(&dir, "l1.csv", L1_SQUARE);
    let map = write(&dir, "map.json", r#"{"a": "a", "b": "b", "c": "c", "d": "d"}"#);
    let out = moebius(&["equivalence", s(&euclid), s(&l1), "--map", s(&map), "--output", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!((json(&out)["discrepancy"].as_f64().unwrap() - 0.25).abs() < 1e-15);
    assert_eq!(moebius(&["equivalence", s(&euclid), s(&euclid)]).status.code(), Some(0));
    let partial = write(&dir, "partial.json", r#"{"a": "a"}"#);
    assert_eq!(moebius(&["equivalence", s(&euclid), s(&l1), "--map", s(&partial)]).status.code(), Some(2));
}

#[test]
fn model_verify_reports_under_the_suite_name() {
    let out = moebius(&["model-verify", "--suite", "busemann", "--dim", "2", "--seed", "5", "--output", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "pass");
    let report = &v["suites"]["busemann"];
    assert_eq!(report["seed"], 5);
    assert!(!report["convergence"][0]["rows"].as_array().unwrap().is_empty());
    assert_eq!(moebius(&["model-verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(moebius(&["model-verify", "--suite", "busemann", "--dim", "9"]).status.code(), Some(2));
}

#[test]
fn model_verify_is_deterministic_and_honours_env() {
    let a = moebius(&["model-verify", "--suite", "crt-invariance", "--seed", "11", "--output", "json"]);
    let b = Command::new(env!("CARGO_BIN_EXE_moebius"))
        .args(["model-verify", "--suite", "crt-invariance"])
        .env("MOEBIUS_SEED", "11")
        .env("MOEBIUS_OUTPUT", "json")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn model_verify_fails_on_a_non_ptolemy_space() {
    let dir = tempfile::tempdir().unwrap();
    let l1 = write(&dir, "l1.csv", L1_SQUARE);
    let out = moebius(&["model-verify", "--suite", "ptolemy", "--space", s(&l1), "--output", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let check = &json(&out)["suites"]["ptolemy"]["checks"][0];
    assert_eq!(check["passed"], false);
    assert!(check["witness"]["witness"].is_array());
    let out = moebius(&["model-verify", "--suite", "homothety", "--space", s(&l1)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn model_verify_checks_a_map_word_and_maps_circles() {
    let dir = tempfile::tempdir().unwrap();
    let word = write(
        &dir,
        "word.json",
        r#"[{"a": [0, 0], "invert": true, "A": [[1, 0], [0, 1]], "lambda": 4, "b": [1, 0]},
            {"a": [0.5, 0], "invert": false, "A": [[0, -1], [1, 0]], "lambda": 2, "b": [0, 0]}]"#,
    );
    let circles = write(
        &dir,
        "circles.json",
        r#"[{"type": "circle", "center": [0, 0], "radius": 1, "plane": [[1, 0], [0, 1]]},
            {"type": "line", "base": [0, 2], "direction": [1, 0]}]"#,
    );
    let out = moebius(&["model-verify", "--map", s(&word), "--circles", s(&circles), "--output", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["suites"]["map-word"]["status"], "pass");
    assert_eq!(v["normal_form"]["invert"], true);
    assert_eq!(v["circle_images"].as_array().unwrap().len(), 2);
    let bad = write(
        &dir,
        "bad.json",
        r#"[{"a": [0, 0], "invert": false, "A": [[1, 0], [0, 1]], "lambda": -1, "b": [0, 0]}]"#,
    );
    assert_eq!(moebius(&["model-verify", "--map", s(&bad)]).status.code(), Some(2));
}

#[test]
fn coordinatize_emits_a_chart() {
    let out = moebius(&["coordinatize", "--dim", "4", "--output", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["chart"]["dimension"], 4);
    assert_eq!(v["chart"]["directions"].as_array().unwrap().len(), 4);
    assert_eq!(v["suites"]["coordinatize"]["status"], "pass");
    assert_eq!(moebius(&["coordinatize", "--dim", "0"]).status.code(), Some(2));
}

#[test]
fn bad_flags_are_input_errors() {
    assert_eq!(moebius(&["model-verify", "--mode", "sometimes"]).status.code(), Some(2));
    assert_eq!(moebius(&["model-verify", "--mode", "sample:0"]).status.code(), Some(2));
    assert_eq!(moebius(&["model-verify", "--tolerance", "-1"]).status.code(), Some(2));
    assert_eq!(moebius(&["frobnicate"]).status.code(), Some(2));
    let out = moebius(&["coordinatize", "--report", "/nonexistent/dir/out.json"]);
    assert_eq!(out.status.code(), Some(2));
}
