use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn cqembed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cqembed"))
        .args(args)
        .env_remove("CQEMBED_MAX_DIM")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn embed_n3_report() {
    let o = cqembed(&["embed", "--n", "3"]);
    assert!(o.status.success());
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["vertex_map"].as_array().unwrap().len(), 13);
    assert_eq!(report["metrics"]["dilation"], 2);
    assert_eq!(
        report["vertex_map"][1],
        serde_json::json!({"pqt": "01", "cq": "0100"})
    );
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("n5.json");
    assert!(
        cqembed(&["embed", "--n", "5", "--out", good.to_str().unwrap()])
            .status
            .success()
    );
    let o = cqembed(&["verify", "--in", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let mut report: Value = serde_json::from_str(&fs::read_to_string(&good).unwrap()).unwrap();
    report["vertex_map"][2]["cq"] = report["vertex_map"][1]["cq"].clone();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, report.to_string()).unwrap();
    let o = cqembed(&["verify", "--in", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("injective: false"));

    let o = cqembed(&[
        "verify",
        "--in",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(cqembed(&["verify"]).status.code(), Some(2));
}

#[test]
fn non_edge_hop_loads_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n3.json");
    let o = cqembed(&["embed", "--n", "3"]);
    let mut report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    // 0-03 runs 0000-1000-1100; 0000-0011 is not an edge.
    let paths = report["edge_paths"].as_array_mut().unwrap();
    let long = paths
        .iter_mut()
        .find(|p| p["path"].as_array().unwrap().len() == 3)
        .unwrap();
    long["path"][1] = Value::from("0011");
    fs::write(&path, report.to_string()).unwrap();
    let o = cqembed(&["verify", "--in", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("paths_valid: false"));
}

#[test]
fn golden_check_verdicts() {
    let o = cqembed(&["golden-check", "--n", "4", "--table", "T2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).matches("match").count(), 5);
    let o = cqembed(&["golden-check", "--n", "5", "--table", "T7"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("A 0-02"));
}

#[test]
fn export_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bundle");
    let o = cqembed(&[
        "export",
        "--n",
        "2",
        "--out",
        out.to_str().unwrap(),
        "--format",
        "edgelist",
    ]);
    assert!(o.status.success());
    let mut names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["cq_2.edgelist", "embedding.edgelist", "pqt_2.edgelist"]
    );
    assert_eq!(
        fs::read_to_string(out.join("cq_2.edgelist")).unwrap(),
        "00 01\n00 10\n01 11\n10 11\n"
    );
}

#[test]
fn identical_runs_are_byte_identical() {
    for args in [
        &["embed", "--n", "6"][..],
        &["gen-pqt", "--n", "3", "--format", "dot"],
        &["metrics", "--n", "5"],
    ] {
        assert_eq!(cqembed(args).stdout, cqembed(args).stdout, "{args:?}");
    }
}

#[test]
fn dimension_cap_from_environment() {
    let o = cqembed(&["embed", "--n", "10"]);
    assert!(o.status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_cqembed"))
        .args(["gen-cq", "--m", "16"])
        .env("CQEMBED_MAX_DIM", "12")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_cqembed"))
        .args(["gen-cq", "--m", "17"])
        .env("CQEMBED_MAX_DIM", "17")
        .output()
        .unwrap();
    assert!(o.status.success());
}
