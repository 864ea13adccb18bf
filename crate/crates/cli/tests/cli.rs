use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mvdecomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvdecomp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn generate(dir: &TempDir, kind: &str, extra: &[&str]) -> (PathBuf, PathBuf) {
    let out = dir.path().join(format!("{kind}.json"));
    let hidden = dir.path().join(format!("{kind}-hidden.json"));
    let mut args = vec![
        "generate",
        "--kind",
        kind,
        "-o",
        path_str(&out),
        "--hidden",
        path_str(&hidden),
    ];
    args.extend_from_slice(extra);
    let res = mvdecomp(&args);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    (out, hidden)
}

#[test]
fn decompose_is_deterministic_and_verifiable() {
    let dir = TempDir::new().unwrap();
    let (t, _) = generate(&dir, "tensor", &["--m", "7", "--n", "6", "--p", "4", "--ranks", "2,1,2", "--seed", "11"]);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let res = mvdecomp(&["decompose", "-i", path_str(&t), "-o", path_str(out), "--seed", "5"]);
        assert_eq!(res.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let doc = read(&a);
    assert_eq!(doc["rank"], 5);
    assert_eq!(doc["verification"]["passed"], true);
    assert_eq!(doc["verification"]["residual"], 0.0);

    let res = mvdecomp(&["verify", "-i", path_str(&t), "-d", path_str(&a)]);
    assert_eq!(res.status.code(), Some(0));
}

#[test]
fn other_seed_gives_same_output() {
    let dir = TempDir::new().unwrap();
    let (t, _) = generate(&dir, "tensor", &["--m", "6", "--n", "6", "--p", "3", "--ranks", "1,2", "--seed", "3"]);
    let outs: Vec<Vec<u8>> = ["1", "2"]
        .iter()
        .map(|seed| mvdecomp(&["decompose", "-i", path_str(&t), "--seed", seed]).stdout)
        .collect();
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn verify_accepts_hidden_and_rejects_tampering() {
    let dir = TempDir::new().unwrap();
    let (t, hidden) = generate(&dir, "tensor", &["--m", "5", "--n", "5", "--p", "3", "--ranks", "1,2", "--seed", "8"]);
    assert_eq!(mvdecomp(&["verify", "-i", path_str(&t), "-d", path_str(&hidden)]).status.code(), Some(0));

    let mut doc = read(&hidden);
    doc["terms"][0]["w"][0] = Value::String("12345".into());
    let bad = dir.path().join("bad.json");
    fs::write(&bad, doc.to_string()).unwrap();
    let res = mvdecomp(&["verify", "-i", path_str(&t), "-d", path_str(&bad)]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn float_mode_decompose() {
    let dir = TempDir::new().unwrap();
    let (t, _) = generate(
        &dir,
        "tensor",
        &["--m", "6", "--n", "7", "--p", "3", "--ranks", "2,2", "--seed", "2", "--mode", "float"],
    );
    let out = dir.path().join("d.json");
    let res = mvdecomp(&["decompose", "-i", path_str(&t), "-o", path_str(&out)]);
    assert_eq!(res.status.code(), Some(0));
    let doc = read(&out);
    assert_eq!(doc["mode"], "float");
    assert!(doc["verification"]["residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn rank_one_tensor_file() {
    let dir = TempDir::new().unwrap();
    let t = dir.path().join("t.json");
    fs::write(
        &t,
        r#"{"m":2,"n":2,"p":2,"mode":"exact","slices":[[["1","2"],["2","4"]],[["-1","-2"],["-2","-4"]]]}"#,
    )
    .unwrap();
    let res = mvdecomp(&["decompose", "-i", path_str(&t)]);
    assert_eq!(res.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(doc["terms"].as_array().unwrap().len(), 1);
    assert_eq!(doc["rank"], 1);
}

#[test]
fn malformed_json_exits_1() {
    let dir = TempDir::new().unwrap();
    let t = dir.path().join("t.json");
    fs::write(&t, "{\"m\": 2,").unwrap();
    let res = mvdecomp(&["decompose", "-i", path_str(&t)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(!res.stderr.is_empty());

    fs::write(&t, r#"{"m":2,"n":2,"p":1,"slices":[[["1"]]]}"#).unwrap();
    assert_eq!(mvdecomp(&["decompose", "-i", path_str(&t)]).status.code(), Some(1));

    let missing = dir.path().join("missing.json");
    assert_eq!(mvdecomp(&["decompose", "-i", path_str(&missing)]).status.code(), Some(1));
}

#[test]
fn bad_flags_are_rejected() {
    let dir = TempDir::new().unwrap();
    let (t, _) = generate(&dir, "tensor", &["--m", "3", "--n", "3", "--p", "2", "--ranks", "1,1"]);
    assert_eq!(mvdecomp(&["decompose", "-i", path_str(&t), "--bound", "0"]).status.code(), Some(1));
    assert_eq!(mvdecomp(&["decompose", "-i", path_str(&t), "--tol-rank=-1"]).status.code(), Some(1));
    assert_eq!(mvdecomp(&["decompose", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(mvdecomp(&["--help"]).status.code(), Some(0));
}

#[test]
fn minrank_recovers_hidden_minimizer() {
    let dir = TempDir::new().unwrap();
    let (b, hidden) = generate(&dir, "basis", &["--m", "6", "--n", "6", "--p", "3", "--ranks", "1,2,2", "--seed", "4"]);
    let res = mvdecomp(&["minrank", "-i", path_str(&b)]);
    assert_eq!(res.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(doc["rho"], 1);
    assert_eq!(doc["minimizers"].as_array().unwrap().len(), 1);
    assert_eq!(doc["certificate"]["valid"], true);
    assert_eq!(doc["hidden_basis"].as_array().unwrap().len(), 3);
    assert_eq!(read(&hidden)["matrices"].as_array().unwrap().len(), 3);
}

#[test]
fn coordinate_basis_has_minrank_one() {
    let dir = TempDir::new().unwrap();
    let b = dir.path().join("b.json");
    fs::write(&b, r#"{"matrices":[[["1","0"],["0","0"]],[["0","0"],["0","1"]]],"mode":"exact"}"#).unwrap();
    let res = mvdecomp(&["minrank", "-i", path_str(&b)]);
    assert_eq!(res.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(doc["rho"], 1);
    assert_eq!(doc["minimizers"].as_array().unwrap().len(), 2);
}

#[test]
fn dependent_basis_exits_2() {
    let dir = TempDir::new().unwrap();
    let b = dir.path().join("b.json");
    fs::write(
        &b,
        r#"{"matrices":[[["1","0"],["0","0"]],[["0","0"],["0","1"]],[["1","0"],["0","1"]]],"mode":"exact"}"#,
    )
    .unwrap();
    let res = mvdecomp(&["minrank", "-i", path_str(&b)]);
    assert_eq!(res.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(doc["certificate"]["p_equals_q"], false);
}

#[test]
fn shared_right_factor_exits_2() {
    let dir = TempDir::new().unwrap();
    let b = dir.path().join("b.json");
    fs::write(&b, r#"{"matrices":[[["1","2"],["0","0"]],[["0","0"],["1","2"]]]}"#).unwrap();
    let res = mvdecomp(&["minrank", "-i", path_str(&b)]);
    assert_eq!(res.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(doc["certificate"]["valid"], false);
}

#[test]
fn jennrich_modes() {
    let dir = TempDir::new().unwrap();
    let (t, _) = generate(
        &dir,
        "tensor",
        &["--m", "5", "--n", "4", "--p", "3", "--ranks", "1,1,1", "--seed", "6", "--mode", "float"],
    );
    let res = mvdecomp(&["jennrich", "-i", path_str(&t)]);
    assert_eq!(res.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert!(doc["residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(doc["W"].as_array().unwrap().len(), 3);

    assert_eq!(mvdecomp(&["jennrich", "-i", path_str(&t), "--mode", "exact"]).status.code(), Some(1));

    let colinear = dir.path().join("c.json");
    fs::write(
        &colinear,
        r#"{"m":2,"n":2,"p":2,"mode":"float","slices":[[[1,0],[0,1]],[[2,0],[0,2]]]}"#,
    )
    .unwrap();
    assert_eq!(mvdecomp(&["jennrich", "-i", path_str(&colinear)]).status.code(), Some(2));
}

#[test]
fn generate_from_spec_file() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, r#"{"m":4,"n":4,"p":2,"ranks":[1,2],"seed":1,"mode":"exact"}"#).unwrap();
    let out = dir.path().join("t.json");
    let res = mvdecomp(&["generate", "--spec", path_str(&spec), "-o", path_str(&out)]);
    assert_eq!(res.status.code(), Some(0));
    let doc = read(&out);
    assert_eq!(doc["p"], 2);
    assert_eq!(doc["mode"], "exact");

    fs::write(&spec, r#"{"m":2,"n":2,"p":2,"ranks":[2,2],"seed":1,"mode":"exact"}"#).unwrap();
    assert_eq!(mvdecomp(&["generate", "--spec", path_str(&spec)]).status.code(), Some(1));
}
