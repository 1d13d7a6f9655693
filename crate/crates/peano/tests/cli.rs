//! The `peano` binary: exit codes, chain verbs, file round trips and
//! determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn peano(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_peano"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn scratch(name: &str, contents: &Value) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("peano-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(contents).unwrap()).unwrap();
    path
}

fn interval_chain(points: &[[[i64; 2]; 2]]) -> Value {
    json!({ "space": "interval", "vertices": points })
}

#[test]
fn missing_command_and_unknown_suite_are_usage_errors() {
    assert_eq!(peano(&[]).status.code(), Some(2));
    assert_eq!(peano(&["suite", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(peano(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn winding_suite_passes_and_is_deterministic() {
    let a = peano(&["--seed", "7", "suite", "winding-lemmas"]);
    let b = peano(&["--seed", "7", "suite", "winding-lemmas"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report = stdout_json(&a);
    for p in report["properties"].as_array().unwrap() {
        assert_eq!(p["violations"], 0, "{p}");
    }
}

#[test]
fn chain_verbs_on_files() {
    let staircase = scratch(
        "staircase.json",
        &interval_chain(&[
            [[1, 2], [1, 2]],
            [[1, 2], [3, 4]],
            [[1, 4], [3, 4]],
            [[0, 1], [1, 1]],
        ]),
    );
    let mirrored = scratch(
        "mirrored.json",
        &interval_chain(&[
            [[1, 3], [1, 3]],
            [[1, 3], [1, 2]],
            [[1, 5], [1, 2]],
            [[0, 1], [1, 1]],
        ]),
    );
    let left_first = scratch(
        "left-first.json",
        &interval_chain(&[
            [[1, 2], [1, 2]],
            [[1, 4], [1, 2]],
            [[1, 4], [3, 4]],
            [[0, 1], [1, 1]],
        ]),
    );
    let s = staircase.to_str().unwrap();
    let m = mirrored.to_str().unwrap();
    let l = left_first.to_str().unwrap();

    let out = peano(&["chain", "classify", s]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["structure"], json!(["V", "H", "S"]));

    let out = peano(&["chain", "conjugate", s, m]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verified"], true);

    let out = peano(&["chain", "equiv", s, l]);
    assert_eq!(stdout_json(&out)["equivalent"], false);
    assert_eq!(peano(&["chain", "conjugate", s, l]).status.code(), Some(1));
}

#[test]
fn malformed_chain_file_is_a_usage_error() {
    let bad = scratch("bad.json", &json!({ "space": "sphere", "vertices": [] }));
    let out = peano(&["chain", "generic", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn covering_round_trip_through_files() {
    let out = peano(&["calculus", "cycle2cover", "--space", "cycle:12", "--partition", "bands:4"]);
    assert_eq!(out.status.code(), Some(0));
    let cover = scratch("cover.json", &stdout_json(&out));
    let out = peano(&["calculus", "cover2cycle", "--covering", cover.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let nerve = &stdout_json(&out)["nerve"];
    assert_eq!(nerve["vertices"], 4);
    assert_eq!(nerve["edges"].as_array().unwrap().len(), 4);
}

#[test]
fn config_with_unknown_field_is_rejected() {
    let cfg = scratch("cfg.json", &json!({ "seed": 1, "colour": "blue" }));
    let out = peano(&["--config", cfg.to_str().unwrap(), "suite", "interval-chains"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn demo_emits_dot_when_asked() {
    let out = peano(&["--format", "dot", "demo", "cycle-robust"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("graph S"));
    // no robust cycle exists on a circle
    assert_eq!(out.status.code(), Some(1));
}
