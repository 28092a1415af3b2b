use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use slicecalc::linalg::relative_residual;
use slicecalc::nalgebra::DMatrix;
use slicecalc::operator::parse_tuple_json;
use slicecalc::OperatorTuple;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn tuple(name: &str) -> OperatorTuple {
    parse_tuple_json(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slicecalc")).args(args).output().unwrap()
}

fn run_json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--output", "json"]);
    let out = run(&all);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn matrix(v: &Value) -> DMatrix<f64> {
    let rows: Vec<Vec<f64>> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect())
        .collect();
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn diagonal_fixture_has_two_real_points() {
    let v = run_json(&["spectrum", "--input", &fixture("diag.json")]);
    assert_eq!(v["schema"], "slicecalc.report/1");
    let spheres = v["spheres"].as_array().unwrap();
    assert_eq!(spheres.len(), 2);
    for (s, c) in spheres.iter().zip([1.0, 2.0]) {
        assert!((num(&s["sphere"]["center"]) - c).abs() < 1e-12);
        assert_eq!(num(&s["sphere"]["radius"]), 0.0);
    }
    assert_eq!(v["compactness"]["holds"], true);
}

#[test]
fn sphere_fixture_has_one_sphere_and_oracle_agrees() {
    let v = run_json(&["spectrum", "--input", &fixture("sphere.json"), "--oracle", "--oracle-grid", "61"]);
    let spheres = v["spheres"].as_array().unwrap();
    assert_eq!(spheres.len(), 1);
    assert!((num(&spheres[0]["sphere"]["center"]) - 0.5).abs() < 1e-12);
    assert!((num(&spheres[0]["sphere"]["radius"]) - 1.5).abs() < 1e-12);
    assert_eq!(v["oracle"]["comparison"]["agree"], true);
    let text = String::from_utf8(run(&["spectrum", "--input", &fixture("sphere.json"), "--oracle", "--oracle-grid", "61"]).stdout).unwrap();
    assert!(text.contains("agree"));
}

#[test]
fn sc_calculus_of_identity_function_is_the_tuple() {
    let v = run_json(&["apply", "--input", &fixture("split.json"), "--calculus", "sc", "--f", "poly left [0;1]"]);
    let t = tuple("split.json");
    assert!(relative_residual(&matrix(&v["value"]), &t.encode()) < 1e-10);
}

#[test]
fn f_calculus_on_low_powers() {
    let t = tuple("split.json");
    let v = run_json(&[
        "apply",
        "--input",
        &fixture("split.json"),
        "--calculus",
        "f",
        "--f",
        "poly left [0;0;1]",
        "--check-independence",
    ]);
    assert!(relative_residual(&matrix(&v["value"]), &(t.rep().identity() * -4.0)) < 1e-8);
    assert!(num(&v["independence"]["max_difference"]) < 1e-8);
    let v = run_json(&["apply", "--input", &fixture("split.json"), "--calculus", "f", "--f", "poly right [0;1]", "--side", "right"]);
    assert!(matrix(&v["value"]).amax() < 1e-8);
}

#[test]
fn quaternion_input_and_plane_flag() {
    let v = run_json(&[
        "apply",
        "--input",
        &fixture("quaternion_split.json"),
        "--calculus",
        "sc",
        "--f",
        "poly left [1; i:1, k:-2]",
        "--plane",
        "0,1,1",
    ]);
    assert_eq!(v["input"]["algebra"], "H");
    let plane: Vec<f64> = v["contour"]["plane"].as_array().unwrap().iter().map(num).collect();
    assert!((plane[1] - plane[2]).abs() < 1e-15 && plane[0] == 0.0);
}

#[test]
fn projectors_on_the_split_fixture() {
    let t = tuple("split.json");
    let v = run_json(&["project", "--input", &fixture("split.json"), "--subset", "all"]);
    let p = matrix(&v["projectors"][0]["projector"]);
    assert!(relative_residual(&p, &t.rep().identity()) < 1e-10);

    let v = run_json(&["project", "--input", &fixture("split.json"), "--subset", "0,1"]);
    let items = v["projectors"].as_array().unwrap();
    assert_eq!(items.len(), 2);
    for item in items {
        assert!(num(&item["diagnostics"]["idempotence"]) < 1e-6);
        assert!(num(&item["diagnostics"]["left_intertwining"]) < 1e-8);
    }
    assert!(num(&v["completeness"]) < 1e-6);
}

#[test]
fn verify_single_entries() {
    let out = run(&["verify", "--only", "FREL"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("FREL") && text.contains("pass"));

    let v = run_json(&["verify", "--only", "BINOM", "--m-max", "12"]);
    assert_eq!(v["results"][0]["residual"].as_f64(), Some(0.0));
    assert_eq!(v["all_pass"], true);

    let v = run_json(&["verify", "--list", "--algebra", "quaternion"]);
    assert!(v["catalog"].as_array().unwrap().iter().all(|e| e["id"].as_str().unwrap().starts_with("QUAT-")));
}

#[test]
fn verify_respects_dimension_filter() {
    let v = run_json(&["verify", "--list", "--n", "5", "--algebra", "clifford"]);
    let ids: Vec<&str> = v["catalog"].as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap()).collect();
    assert!(ids.contains(&"PROJ-N5") && ids.contains(&"FREL"));
    assert!(!ids.contains(&"N3") && !ids.contains(&"PROJ"));
    assert_eq!(run(&["verify", "--n", "7"]).status.code(), Some(1));
}

#[test]
fn timings_only_when_requested() {
    let v = run_json(&["verify", "--only", "BINOM", "--m-max", "3"]);
    assert!(v["results"][0].get("runtime_ms").is_none());
    let v = run_json(&["verify", "--only", "BINOM", "--m-max", "3", "--timings"]);
    assert!(v["results"][0].get("runtime_ms").is_some());
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "--only", "SCRES", "--samples", "8", "--seed", "77", "--output", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let input = fixture("n5.json");
    let args = ["project", "--input", input.as_str(), "--nodes", "32", "--output", "json"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, run(&args).stdout);
}

#[test]
fn exit_codes() {
    let split = fixture("split.json");
    let cases: [(&[&str], i32); 11] = [
        (&["--help"], 0),
        (&["spectrum"], 1),
        (&["spectrum", "--input", "/nonexistent/tuple.json"], 1),
        (&["spectrum", "--input", &fixture("malformed.json")], 1),
        (&["spectrum", "--input", &split, "--n", "5"], 1),
        (&["apply", "--input", &split, "--calculus", "sc", "--f", "poly sideways [1]"], 1),
        (&["spectrum", "--input", &fixture("noncommuting.json")], 2),
        (&["project", "--input", &split, "--subset", "2"], 3),
        (&["apply", "--input", &split, "--calculus", "f", "--f", "rational [1] / [-2.1; 1]"], 3),
        (&["verify", "--only", "PROJ", "--nodes", "4"], 4),
        (&["verify", "--only", "N3", "--n", "5"], 1),
    ];
    for (args, want) in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(want), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn non_commuting_report_names_the_pair() {
    let v: Value = serde_json::from_slice(&run(&["spectrum", "--input", &fixture("noncommuting.json"), "--output", "json"]).stdout).unwrap();
    assert_eq!(v["commutator"]["pass"], false);
    assert_eq!(v["commutator"]["pair"], serde_json::json!([1, 2]));
}
