use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn system(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../systems").join(name)
}

fn charbox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charbox")).args(args).output().expect("spawn charbox")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_reports_kind_and_multiplicity() {
    let v = json(&charbox(&["classify", system("cusp_n1.json").to_str().unwrap()]));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "classify");
    assert_eq!(v["classification"]["kind"], "cusp");
    assert_eq!(v["char_data"]["m"], 2);
}

#[test]
fn compact_json_is_one_line() {
    let out = charbox(&["classify", system("focus_cubic.json").to_str().unwrap(), "--json"]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.trim_end().lines().count(), 1);
    assert_eq!(json(&out)["classification"]["kind"], "center_or_focus");
}

#[test]
fn unitmap_writes_csv_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let out = charbox(&[
        "unitmap",
        system("node_m5.json").to_str().unwrap(),
        "--orbit-n",
        "200",
        "--csv-dir",
        dir.path().to_str().unwrap(),
    ]);
    let v = json(&out);
    assert_eq!(v["char_map"]["dim_ch"], "4/5");
    assert!(dir.path().join("unit_map.csv").exists());
    assert!(dir.path().join("char_map_orbit.csv").exists());
}

#[test]
fn dimension_on_a_cusp() {
    let v = json(&charbox(&["dimension", system("cusp_plain.json").to_str().unwrap(), "--orbit-n", "400"]));
    assert_eq!(v["command"], "dimension");
    let seps = v["separatrices"].as_array().unwrap();
    assert!(!seps.is_empty());
}

#[test]
fn poincare_on_a_weak_focus() {
    let v = json(&charbox(&["poincare", system("focus_cubic.json").to_str().unwrap(), "--returns", "60"]));
    assert_eq!(v["focus_conditions"]["holds"], true);
    assert_eq!(v["poincare"]["k_bound"], 0);
    let d = v["poincare"]["seq_dim"]["estimate"].as_f64().unwrap();
    assert!((d - 0.5).abs() < 0.05, "{d}");
}

#[test]
fn infinity_chart_dimension() {
    let v = json(&charbox(&["infinity", system("cusp_n1.json").to_str().unwrap()]));
    assert!(v["infinity"].is_object());
}

#[test]
fn bt_atlas_single_point() {
    let v = json(&charbox(&["bt-atlas", "--point", "0.1,-0.2"]));
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 1);
    assert_eq!(entries[0]["label"], "1");
}

#[test]
fn missing_file_is_an_input_error() {
    let out = charbox(&["classify", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn non_normal_form_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("linear.json");
    std::fs::write(&p, r#"{"xdot": [[0,1,"1"]], "ydot": [[1,0,"1"]]}"#).unwrap();
    assert_eq!(charbox(&["classify", p.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn bad_grid_is_an_input_error() {
    assert_eq!(charbox(&["bt-atlas", "--grid", "0:1"]).status.code(), Some(1));
}

#[test]
fn unknown_subcommand_exits_nonzero() {
    assert_eq!(charbox(&["frobnicate"]).status.code(), Some(1));
}
