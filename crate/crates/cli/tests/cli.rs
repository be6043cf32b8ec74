use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn opminimal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opminimal")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_model(dir: &Path, name: &str, args: &[&str]) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut full = vec!["model"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let o = opminimal(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn unitary_ass_summary() {
    let o = opminimal(&["model", "--operad", "ass_plus", "--max-arity", "4", "--mode", "unitary"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("arity 2: 2 in degree 0"));
    assert!(s.contains("arity 3: 6 in degree -1"));
    assert!(s.contains("arity 4: 24 in degree -2"));
    assert!(s.contains("δ = [0; 0; 0; 0]"));
    assert!(!s.contains("FAIL"));
}

#[test]
fn base_step_only() {
    let o = opminimal(&["model", "--operad", "ass", "--max-arity", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("arity 2: 2 in degree 0"));
}

#[test]
fn commutative_target_has_no_unit() {
    let o = opminimal(&["model", "--operad", "com", "--mode", "unitary"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn fresh_model_verifies_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--operad", "ass_plus", "--max-arity", "3", "--mode", "unitary"];
    let a = write_model(dir.path(), "a.json", &args);
    let b = write_model(dir.path(), "b.json", &args);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let o = opminimal(&["verify", a.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = opminimal(&["verify", "--file", a.to_str().unwrap(), "--format", "json"]);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn corrupted_coefficient_fails_d_squared() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_model(dir.path(), "m.json", &["--operad", "ass", "--max-arity", "4"]);
    let mut j: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    j["differential"]["e4.0"][0]["coef"] = Value::from("2");
    std::fs::write(&path, serde_json::to_string(&j).unwrap()).unwrap();
    let o = opminimal(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("FAIL d_squared"));
}

#[test]
fn zeroed_restriction_fails_compatibility() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_model(dir.path(), "m.json", &["--operad", "ass_plus", "--max-arity", "3", "--mode", "unitary"]);
    let mut j: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    j["restrictions"]["e2.1"][1] = Value::Array(vec![]);
    std::fs::write(&path, serde_json::to_string(&j).unwrap()).unwrap();
    let o = opminimal(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let s = stdout(&o);
    assert!(s.contains("FAIL restriction_compat"));
    assert!(s.contains("PASS d_squared"));
}

#[test]
fn truncated_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_model(dir.path(), "m.json", &["--operad", "com", "--max-arity", "3"]);
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&opminimal(&["verify", path.to_str().unwrap()])), 1);
    assert_eq!(code(&opminimal(&["verify", dir.path().join("missing.json").to_str().unwrap()])), 1);
}

#[test]
fn cohomology_of_builtins() {
    let o = opminimal(&["cohomology", "--operad", "ass_plus"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    for line in ["H(P(0)): 1 in degree 0", "H(P(1)): 1 in degree 0", "H(P(3)): 6 in degree 0", "H(P(4)): 24 in degree 0"] {
        assert!(s.contains(line), "{s}");
    }
    let o = opminimal(&["cohomology", "--operad", "com_plus", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for n in 0..=4 {
        assert_eq!(v["cohomology"][n.to_string()]["0"], 1);
    }
    assert_eq!(v["hypotheses"]["hold"], true);
}

#[test]
fn acyclic_arity_zero_is_flagged() {
    // com_plus with P(0) replaced by an acyclic pair a → b
    let dir = tempfile::tempdir().unwrap();
    let o = opminimal(&["model", "--operad", "com", "--max-arity", "2", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let model: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(model["target"]["builtin"], "com");
    let op = opminimal_core::Builtin::Com.build(2).unwrap();
    let mut j: Value = serde_json::from_str(&op.to_json_string()).unwrap();
    j["arities"][0]["degrees"] = serde_json::json!({"-1": ["a"], "0": ["b"]});
    j["arities"][0]["transpositions"] = serde_json::json!({"-1": [], "0": []});
    j["arities"][0]["differential"] = serde_json::json!({"-1": [["1"]]});
    for m in 1..=2usize {
        let rows = if m == 1 { 2 } else { 1 };
        for i in 1..=m {
            j["arities"][m]["compositions"][format!("{m},{i},0")] = serde_json::json!(vec![vec!["0"; 2]; rows]);
        }
    }
    j["unit0"] = Value::from("b");
    let path = dir.path().join("acyclic.json");
    std::fs::write(&path, serde_json::to_string(&j).unwrap()).unwrap();
    let o = opminimal(&["cohomology", "--file", path.to_str().unwrap(), "--max-arity", "2"]);
    assert_eq!(code(&o), 2, "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("H(P(0)): 0"));
    assert!(s.contains("FAIL"));
}

#[test]
fn builtins_listing() {
    let o = opminimal(&["builtins"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = opminimal(&["builtins", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert_eq!(code(&opminimal(&["builtins", "--frobnicate"])), 64);
    assert_eq!(code(&opminimal(&["model", "--operad", "ass", "--max-arity", "1"])), 64);
    assert_eq!(code(&opminimal(&["model", "--operad", "nope"])), 64);
}
