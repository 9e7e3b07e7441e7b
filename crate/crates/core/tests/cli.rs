//! End-to-end runs of the `schatten` binary: exit codes, JSON documents and written files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const IDENTITY: &str = r#"{"kind": "kraus", "in_dim": 2, "out_dim": 2, "operators": [[[1, 0], [0, 1]]]}"#;
const Z_DIFFERENCE: &str = r#"{"kind": "kraus", "in_dim": 2, "out_dim": 2,
    "operators": [[[1, 0], [0, 1]], [[1, 0], [0, -1]]], "signs": [1, -1]}"#;
const SAT_INSTANCE: &str = r#"{"d": 4, "clauses": [{"indices": [1, 2, 3, 4], "signs": ["+", "+", "+", "+"]}]}"#;
const UNSAT_INSTANCE: &str = r#"{"d": 4, "clauses": [
    {"indices": [1, 2, 3, 4], "signs": ["+", "+", "+", "+"]},
    {"indices": [1, 2, 3, 4], "signs": ["+", "+", "+", "-"]}]}"#;

/// A scratch directory unique to this test process and `name`.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("schatten-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn file(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schatten")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn compute_document() {
    let dir = scratch("compute");
    let map = file(&dir, "id.json", IDENTITY);
    let out = run(&["compute", "--map", &map, "--q", "inf", "--p", "4/3", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    for key in ["command", "request", "map", "result", "provenance"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    assert_eq!(doc["command"], "compute");
    assert_eq!(doc["request"]["q"], "inf");
    assert_eq!(doc["request"]["mode"], "norm");
    assert_eq!(doc["map"]["in_dim"], 2);
    assert_eq!(doc["provenance"]["route"]["path"], "boyd");
    // ‖id‖_{∞→4/3} = 2^{3/4}.
    let (lo, hi) = (doc["result"]["value_lo"].as_f64().unwrap(), doc["result"]["value_hi"].as_f64().unwrap());
    let want = 2f64.powf(0.75);
    assert!(lo <= want * (1.0 + 1e-9) && hi >= want * (1.0 - 1e-9), "[{lo}, {hi}]");

    let text = run(&["compute", "--map", &map, "--q", "2", "--p", "2"]);
    assert_eq!(code(&text), 0);
    assert!(String::from_utf8_lossy(&text.stdout).contains("value in ["));
}

#[test]
fn mode_names() {
    let dir = scratch("modes");
    let map = file(&dir, "id.json", IDENTITY);
    for mode in ["norm_positive", "norm-positive", "cb_positive", "cb-positive"] {
        let out = run(&["compute", "--map", &map, "--q", "2", "--p", "2", "--mode", mode, "--format", "json"]);
        assert_eq!(code(&out), 0, "{mode}");
        assert_eq!(json(&out)["request"]["mode"], mode.replace('-', "_"));
    }
}

#[test]
fn cb_command() {
    let dir = scratch("cb");
    let map = file(&dir, "zdiff.json", Z_DIFFERENCE);
    let out = run(&["cb", "--map", &map, "--p", "1", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["command"], "cb");
    assert_eq!(doc["request"]["positive"], false);
    assert_eq!(doc["map"]["flags"]["is_cp"], "no");
    let lo = doc["result"]["value_lo"].as_f64().unwrap();
    let hi = doc["result"]["value_hi"].as_f64().unwrap();
    assert!(lo <= 2.0 * (1.0 + 1e-6) && hi >= 2.0 * (1.0 - 1e-6), "diamond norm 2 in [{lo}, {hi}]");
    let pos = run(&["cb", "--map", &map, "--p", "1", "--positive", "--format", "json"]);
    assert_eq!(json(&pos)["request"]["positive"], true);
}

#[test]
fn refusals_exit_with_two() {
    let dir = scratch("refuse");
    let map = file(&dir, "zdiff.json", Z_DIFFERENCE);
    let out = run(&["compute", "--map", &map, "--q", "inf", "--p", "1", "--format", "json"]);
    assert_eq!(code(&out), 2);
    let doc = json(&out);
    assert_eq!(doc["error"]["kind"], "hardness");
    assert!(doc["error"]["message"].as_str().unwrap().contains("NP-hard"));
    let id = file(&dir, "id.json", IDENTITY);
    let open = run(&["compute", "--map", &id, "--q", "3/2", "--p", "3"]);
    assert_eq!(code(&open), 2);
    assert!(String::from_utf8_lossy(&open.stderr).contains("no efficient algorithm"));
    let oracle = run(&["compute", "--map", &map, "--q", "inf", "--p", "1", "--method", "oracle", "--format", "json"]);
    assert_eq!(code(&oracle), 0);
    assert_eq!(json(&oracle)["provenance"]["method"], "oracle");
}

#[test]
fn open_brackets_exit_with_three() {
    let dir = scratch("unconverged");
    let map = file(&dir, "zdiff.json", Z_DIFFERENCE);
    // Positive inputs on a non-CP map: the bracket [√2, 2] stays open.
    let out = run(&["compute", "--map", &map, "--q", "2", "--p", "2", "--mode", "norm_positive", "--format", "json"]);
    assert_eq!(code(&out), 3);
    let doc = json(&out);
    assert_eq!(doc["result"]["converged"], false);
    assert_eq!(doc["provenance"]["route"]["path"], "exact22_upper");
}

#[test]
fn input_errors_exit_with_four() {
    let dir = scratch("input");
    let map = file(&dir, "id.json", IDENTITY);
    let missing = dir.join("absent.json").display().to_string();
    let out = run(&["compute", "--map", &missing, "--q", "2", "--p", "2"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.json"));
    assert_eq!(code(&run(&["compute", "--map", &map, "--q", "1/2", "--p", "2"])), 4);
    assert_eq!(code(&run(&["compute", "--map", &map, "--q", "2", "--p", "abc"])), 4);
    assert_eq!(code(&run(&["compute", "--map", &map, "--q", "2", "--p", "2", "--eps", "0.9"])), 4);
    let broken = file(&dir, "broken.json", "{\"kind\": \"kraus\"");
    assert_eq!(code(&run(&["compute", "--map", &broken, "--q", "2", "--p", "2"])), 4);
    let inst = file(&dir, "sat.json", SAT_INSTANCE);
    assert_eq!(code(&run(&["certify", "--instance", &inst, "--eta", "-1", "--p", "2"])), 4);
    assert_eq!(code(&run(&["frobnicate"])), 4);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["compute", "--help"])), 0);
}

#[test]
fn certify_and_reduce() {
    let dir = scratch("sat");
    let sat = file(&dir, "sat.json", SAT_INSTANCE);
    let unsat = file(&dir, "unsat.json", UNSAT_INSTANCE);
    let out = run(&["certify", "--instance", &sat, "--eta", "1", "--p", "2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let report = &json(&out)["report"];
    assert_eq!(report["satisfiable"], true);
    assert!((report["gadget_bound"].as_f64().unwrap() - 1036f64.sqrt() / 64.0).abs() < 1e-12);

    let out = run(&["certify", "--instance", &unsat, "--eta", "1", "--p", "2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let report = &json(&out)["report"];
    assert_eq!(report["satisfiable"], false);
    assert_eq!(report["verified"], true);
    assert!(report["max_certificate_value"].as_f64().unwrap() < report["gadget_bound"].as_f64().unwrap());

    let gadgets = dir.join("gadgets");
    let out = run(&["reduce-sat", "--instance", &unsat, "--eta", "2", "--out", &gadgets.display().to_string(), "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    let files = doc["files"].as_array().unwrap();
    assert_eq!(files.len(), 5);
    for f in files {
        assert!(Path::new(f.as_str().unwrap()).is_file());
    }
    // Each written channel reads back through the compute command.
    let first = files[0].as_str().unwrap();
    assert_eq!(code(&run(&["compute", "--map", first, "--q", "2", "--p", "2"])), 0);
}
