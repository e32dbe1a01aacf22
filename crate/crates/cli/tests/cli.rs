use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn crosspack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crosspack"))
        .args(args)
        .env_remove("CROSSPACK_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn write_construction(dir: &Path, name: &str, n: &str) -> String {
    let out = crosspack(&["construct", "--name", name, "--n", n]);
    assert!(out.status.success(), "construct {name}");
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, &out.stdout).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn construct_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("vertices", "3", "1"),
        ("vertices_plus_centroids", "3", "2/3"),
        ("q10", "3", "2/3"),
        ("q12", "3", "3/5"),
        ("q13", "3", "6/11"),
    ];
    for (name, n, r) in cases {
        let path = write_construction(dir.path(), name, n);
        let out = crosspack(&["verify", "--input", &path, "--r", r]);
        assert_eq!(out.status.code(), Some(0), "{name} at {r}");
        assert_eq!(stdout_json(&out)["violating_pairs"], Value::Array(vec![]));
        let out = crosspack(&["radius", "--input", &path]);
        assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), r, "{name}");
    }
}

#[test]
fn verify_q10_above_its_radius_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_construction(dir.path(), "q10", "3");
    let out = crosspack(&["verify", "--input", &path, "--r", "7/10"]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert!(!report["violating_pairs"].as_array().unwrap().is_empty());
    assert_eq!(report["min_pairwise"], "4/3");
    assert_eq!(stderr_json(&out)["error"], "verification");
}

#[test]
fn table_is_stable_and_has_the_twelve_row() {
    let a = crosspack(&["table"]);
    let b = crosspack(&["table"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("\"(4/7,3/5]\",12,12,exact,certified"));
    let j1 = crosspack(&["table", "--format", "json"]);
    let j2 = crosspack(&["table", "--format", "json"]);
    assert_eq!(j1.stdout, j2.stdout);
    let rows = stdout_json(&j1);
    let row = rows.as_array().unwrap().iter().find(|r| r["interval"] == "(4/7,3/5]").unwrap();
    assert_eq!((row["lower"].as_u64(), row["upper"].as_u64()), (Some(12), Some(12)));
}

#[test]
fn table_decimal_column_is_separate() {
    let out = crosspack(&["table", "--decimal"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().ends_with(",lo_approx,hi_approx"));
    assert!(text.contains("\"(4/7,3/5]\",12,12,exact,certified,0.571429,0.600000"));
}

#[test]
fn bound_on_the_lowest_interval() {
    let out = crosspack(&["bound", "--interval", "(1/2,4/7]"]);
    assert_eq!(out.status.code(), Some(0));
    let cert = stdout_json(&out);
    assert_eq!(cert["total"], 14);
    assert_eq!(cert["pipeline"], "diameter");
}

#[test]
fn bound_certificate_replays() {
    let dir = tempfile::tempdir().unwrap();
    let out = crosspack(&["bound", "--interval", "(3/5,2/3]"]);
    assert_eq!(out.status.code(), Some(0));
    let path = dir.path().join("cert.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let out = crosspack(&["replay", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["total"], 10);

    let mut cert: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    cert["total"] = Value::from(9);
    std::fs::write(&path, serde_json::to_vec(&cert).unwrap()).unwrap();
    let out = crosspack(&["replay", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_input_exits_two() {
    for args in [
        &["bound", "--interval", "(1/2,4/7"][..],
        &["bound", "--interval", "(4/7,1/2]"],
        &["bound", "--interval", "(1/2,2/3]"],
        &["verify", "--input", "/nonexistent.json", "--r", "1"],
        &["construct", "--name", "q99"],
        &["table", "--bogus"],
    ] {
        let out = crosspack(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = stderr_json(&out);
        assert!(err["message"].is_string(), "{args:?}");
    }
}

#[test]
fn bad_thread_variable_is_malformed() {
    let out = Command::new(env!("CARGO_BIN_EXE_crosspack"))
        .args(["table"])
        .env("CROSSPACK_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_crosspack"))
        .args(["radius", "--input", "/nonexistent"])
        .env("CROSSPACK_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(stderr_json(&out)["error"], "io");
}

#[test]
fn certify_lemma_variants() {
    let out = crosspack(&["certify-lemma", "--id", "capture", "--r", "3/5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["holds"], true);

    let out = crosspack(&["certify-lemma", "--id", "decomposition", "--r", "4/7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out).as_array().unwrap().len(), 32);

    let out = crosspack(&["certify-lemma", "--id", "blocking-a", "--interval", "(3/5,2/3]"]);
    assert_eq!(stdout_json(&out)["occupancy"]["bound"], 4);
    let out = crosspack(&["certify-lemma", "--id", "blocking-b", "--interval", "(4/7,3/5]"]);
    assert_eq!(stdout_json(&out)["occupancy"]["bound"], 6);
    let out = crosspack(&["certify-lemma", "--id", "diameter", "--interval", "(1/2,4/7]"]);
    assert_eq!(stdout_json(&out)["occupancy"]["bound"], 8);

    let out = crosspack(&["certify-lemma", "--id", "diameter", "--r", "3/5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn frontier_of_q13() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_construction(dir.path(), "q13", "3");
    let out = crosspack(&["frontier", "--input", &path, "--r", "6/11"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = stdout_json(&out);
    assert_eq!(rep["regions"][0]["state"], "blocked");
    assert_eq!(rep["regions"][0]["blockers"][0]["distances"], serde_json::json!(["10/11", "10/11", "10/11", "2/11"]));
}

#[test]
fn search_output_feeds_verify() {
    let dir = tempfile::tempdir().unwrap();
    let args: Vec<&str> = "search --dim 3 --k 6 --restarts 2 --seed 1 --denoms 1 --iters 2000".split(' ').collect();
    let out = crosspack(&args);
    assert_eq!(out.status.code(), Some(0));
    let result = stdout_json(&out);
    assert_eq!(result["certified_radius"], "1");
    let path = dir.path().join("found.json");
    std::fs::write(&path, serde_json::to_vec(&result["snapped"]).unwrap()).unwrap();
    let out = crosspack(&["verify", "--input", path.to_str().unwrap(), "--r", "1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn emit_figure_for_q13() {
    let out = crosspack(&["emit-figure", "--config", "q13", "--r", "6/11"]);
    assert_eq!(out.status.code(), Some(0));
    let fig = stdout_json(&out);
    assert_eq!(fig["regions"].as_array().unwrap().len(), 8);
    assert_eq!(fig["packing_balls"].as_array().unwrap().len(), 13);
    assert_eq!(fig["capture_balls"][0]["center"], serde_json::json!(["5/11", "0", "0"]));
}
