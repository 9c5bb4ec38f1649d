use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn blendvis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blendvis"))
        .current_dir(workspace())
        .env_remove("LIGER_DATA_DIR")
        .args(args)
        .output()
        .unwrap()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, value: &Value) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, value.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn no_script_emits_the_initial_spec() {
    let out = blendvis(&["--data", "data/mini8.csv", "--emit-spec", "-"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let spec: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(spec["revision"], 0);
    assert_eq!(spec["vis_type"], "Scatterplot");
    assert_eq!(spec["bindings"], json!({}));
}

#[test]
fn walkthrough_matches_its_golden_spec() {
    let out = blendvis(&["--script", "scripts/walkthrough.json", "--assert", "scripts/walkthrough.golden.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = String::from_utf8_lossy(&out.stderr);
    assert_eq!(report.lines().filter(|l| l.starts_with("step")).count(), 18);
    assert!(!report.contains("FAILED"));
}

#[test]
fn emitted_outputs_are_canonical_json() {
    let dir = tempfile::tempdir().unwrap();
    let view = dir.path().join("view.json");
    let recs = dir.path().join("recs.json");
    let out = blendvis(&[
        "-q",
        "--script",
        "scripts/mini8_filters.json",
        "--emit-view",
        view.to_str().unwrap(),
        "--emit-recs",
        recs.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stderr.is_empty());
    let view: Value = serde_json::from_str(&std::fs::read_to_string(view).unwrap()).unwrap();
    assert_eq!(view["vis_type"], "BarChart");
    assert_eq!(view["bar_order"][0], 6.0);
    let recs: Value = serde_json::from_str(&std::fs::read_to_string(recs).unwrap()).unwrap();
    assert!(recs["set_id"].as_str().unwrap().starts_with("cli."));
}

#[test]
fn assertion_mismatch_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let expected = write_temp(&dir, "expect.json", &json!({ "spec": { "revision": 99 } }));
    let out = blendvis(&["--data", "data/mini8.csv", "--assert", &expected]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spec differs"));

    let unknown = write_temp(&dir, "unknown.json", &json!({ "specs": {} }));
    assert_eq!(blendvis(&["--data", "data/mini8.csv", "--assert", &unknown]).status.code(), Some(2));
}

#[test]
fn failing_step_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let script = json!({
        "dataset": "mini8.csv",
        "steps": [
            { "op": "set_axis", "channel": "X", "attribute": "Horsepower" },
            { "op": "set_axis", "channel": "X", "attribute": "Origin" },
            { "op": "set_axis", "channel": "Y", "attribute": "MPG" }
        ]
    });
    let path = write_temp(&dir, "bad.json", &script);
    let out = blendvis(&["--script", &path]);
    assert_eq!(out.status.code(), Some(1));
    let report = String::from_utf8_lossy(&out.stderr);
    assert!(report.contains("FAILED"), "{report}");
    assert_eq!(report.lines().filter(|l| l.starts_with("step")).count(), 2);
}

#[test]
fn bad_input_exits_2() {
    assert_eq!(blendvis(&[]).status.code(), Some(2));
    assert_eq!(blendvis(&["--data", "data/missing.csv"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "s.json", &json!({ "steps": [{ "op": "teleport" }] }));
    assert_eq!(blendvis(&["--data", "data/mini8.csv", "--script", &path]).status.code(), Some(2));
}

#[test]
fn data_dir_resolves_script_datasets() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(workspace().join("data/mini8.csv"), dir.path().join("mini8.csv")).unwrap();
    let script = workspace().join("scripts/mini8_encodings.json");
    let out = Command::new(env!("CARGO_BIN_EXE_blendvis"))
        .env("LIGER_DATA_DIR", dir.path())
        .args(["-q", "--script", script.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
