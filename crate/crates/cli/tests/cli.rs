use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_arithdyn"));
    c.env_remove("ARITHDYN_DIGIT_BUDGET");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect()
}

#[test]
fn envelope_fields() {
    let r = report(&["fan", "simple", "--fan", "p2"]);
    assert_eq!(r["schema_version"], "1");
    assert_eq!(strings(&r["command"]), ["fan", "simple", "--fan", "p2"]);
    assert!(!r["citations"].as_array().unwrap().is_empty());
    assert_eq!(r["result"]["simple"], true);
}

#[test]
fn counterexample_eigenvalues() {
    let r = report(&["abelian", "counterexample", "--a", "3", "--b", "2"]);
    let vals: Vec<&str> =
        r["result"]["eigenvalues"].as_array().unwrap().iter().map(|e| e["value"].as_str().unwrap()).collect();
    assert_eq!(vals, ["9", "6", "4"]);
    let nef: Vec<bool> =
        r["result"]["eigenvalues"].as_array().unwrap().iter().map(|e| e["nef"].as_bool().unwrap()).collect();
    assert_eq!(nef, [true, false, true]);
    assert_eq!(strings(&r["result"]["realizable"]), ["9", "1"]);
    assert_eq!(strings(&r["result"]["non_realizable"]), ["6", "4"]);
    for label in r["result"]["labels"].as_array().unwrap() {
        assert!(!label["citations"].as_array().unwrap().is_empty(), "label without citation: {label}");
    }
}

#[test]
fn alpha_of_squaring_is_two() {
    let r = report(&["height", "alpha", "--system", "square", "--point", "2,1", "--iters", "10"]);
    assert!((r["result"]["estimate"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn alpha_from_system_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sq.json");
    std::fs::write(&path, r#"{"factors":[{"kind":"p1map","f":[1,0,0],"g":[0,0,1]}]}"#).unwrap();
    let r = report(&["height", "alpha", "--system", path.to_str().unwrap(), "--point", "2,1", "--iters", "10"]);
    assert!((r["result"]["estimate"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn exe_classify_example() {
    let r = report(&["exe", "classify", "--a", "2", "--b", "3", "--curve", "0,-2", "--P", "3,5", "--Q", "inf"]);
    assert_eq!(r["result"]["alpha"], "4");
    assert_eq!(r["result"]["label"], "a^2");
}

#[test]
fn elliptic_commands() {
    let r = report(&["elliptic", "add", "--curve", "0,-2", "--p", "3,5", "--q", "3,-5"]);
    assert_eq!(r["result"]["display"], "inf");
    let r = report(&["elliptic", "torsion", "--curve", "0,1", "--point", "2,3"]);
    assert_eq!(r["result"]["order"], 6);
    let r = report(&["elliptic", "multiply", "--curve", "0,1", "--point", "2,3", "--k", "6"]);
    assert_eq!(r["result"]["display"], "inf");
    let r = report(&["elliptic", "canheight", "--curve", "0,-2", "--point", "3,5", "--depth", "8"]);
    assert!(r["result"]["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn toric_commands() {
    let r = report(&["ns", "pullback", "--fan", "p2", "--scalar", "2"]);
    assert_eq!(r["result"]["matrix"], serde_json::json!([["2"]]));
    let r = report(&["ns", "potdeg", "--fan", "p1xp1", "--endo", "2,0;0,3"]);
    let vals: Vec<&str> = r["result"]["potential_arithmetic_degrees"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["value"].as_str().unwrap())
        .collect();
    assert_eq!(vals, ["3", "2"]);
    let r = report(&["ns", "nef", "--fan", "hirzebruch2", "--divisor", "0,1,0,0"]);
    assert_eq!(r["result"]["nef"], false);
    let r = report(&["endo", "decompose", "--fan", "p1xp1", "--endo", "2,0;0,3"]);
    assert_eq!(r["result"]["factors"].as_array().unwrap().len(), 2);
    let r = report(&["endo", "witness", "--fan", "p1xp1", "--n1", "2", "--n2", "3"]);
    assert_eq!(r["result"]["pullback_eigenvalues"].as_array().unwrap().len(), 2);
    let r = report(&["fan", "validate", "--fan", "p2xp1"]);
    assert_eq!(r["result"]["valid"], true);
    report(&["fan", "star", "--fan", "p2xp1", "--cone", "3"]);
    report(&["fan", "product", "--fan", "p2", "--with", "p1xp1"]);
    report(&["ns", "classgroup", "--fan", "hirzebruch2"]);
    report(&["ns", "nefcone", "--fan", "p2xp1"]);
    report(&["endo", "permutation", "--fan", "p2", "--endo", "0,1;1,0"]);
    report(&["endo", "check", "--fan", "p2", "--endo", "1,1;0,1"]);
    report(&["ns", "realize-equivariant", "--fan", "p1xp1", "--endo", "2,0;0,3"]);
    report(&["abelian", "theta", "--matrix", "2,1;0,3"]);
}

#[test]
fn deterministic_output() {
    let args = ["ns", "potdeg", "--fan", "p2xp1", "--endo", "2,0,0;0,2,0;0,0,3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = run(&["fan", "simple", "--fan", "p1xp1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["result"]["simple"], false);
}

#[test]
fn exit_codes() {
    let e = |args: &[&str]| run(args).status.code();
    assert_eq!(e(&["fan", "simple", "--fan", "no-such-fan"]), Some(2));
    assert_eq!(e(&["endo", "check", "--fan", "p2", "--endo", "1,0;0,0"]), Some(2));
    assert_eq!(e(&["endo", "decompose", "--fan", "p2", "--endo", "1,1;0,1"]), Some(2));
    assert_eq!(e(&["abelian", "counterexample", "--a", "2", "--b", "3"]), Some(2));
    assert_eq!(e(&["abelian", "theta", "--matrix", "1,0;0,1", "--algebra", "quaternion"]), Some(4));
    assert_eq!(e(&["elliptic", "canheight", "--curve", "0,-2", "--point", "3,6"]), Some(2));
    assert_eq!(e(&["elliptic", "canheight", "--curve", "0,-2", "--point", "3,5", "--depth", "40"]), Some(3));
    assert_eq!(e(&["not-a-command"]), Some(2));
}

#[test]
fn error_object_is_machine_readable() {
    let out = run(&["fan", "simple", "--fan", "no-such-fan"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "validation");
    assert!(v["error"]["tag"].is_string());
}

#[test]
fn budget_abort_reports_partial_heights() {
    let out = bin()
        .env("ARITHDYN_DIGIT_BUDGET", "50")
        .args(["height", "alpha", "--system", "square", "--point", "2,1", "--iters", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["tag"], "digit_budget");
    assert!(!v["error"]["partial_heights"].as_array().unwrap().is_empty());
}

#[test]
fn demo_passes() {
    let out = run(&["demo"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r["passed"] == true));
}

#[test]
fn demo_rejects_corrupted_fixture() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("p2.fan.json"), r#"{"dim":2,"rays":[[1,0],[2,0]],"max_cones":[[0,1]]}"#).unwrap();
    let out = run(&["demo", "--fixtures", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn demo_budget_abort() {
    let out = bin().env("ARITHDYN_DIGIT_BUDGET", "1000").arg("demo").output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}
