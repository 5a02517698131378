use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn braidcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_braidcalc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cable_prints_word_and_invariants() {
    let o = braidcalc(&["cable", "--pairs", "2,3;2,13"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let word: serde_json::Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
    assert_eq!(word["n"], 4);
    assert!(out.contains("index 4"));
}

#[test]
fn bennequin_of_trefoil() {
    let o = braidcalc(&["bennequin", "--pairs", "2,3"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "1"));
}

#[test]
fn exit_codes() {
    assert_eq!(braidcalc(&["bogus"]).status.code(), Some(2));
    assert_eq!(braidcalc(&["bennequin"]).status.code(), Some(2));
    assert_eq!(braidcalc(&["bennequin", "--pairs", "2,4"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"n":2,"word":[2]}"#).unwrap();
    let o = braidcalc(&["bennequin", "--word", path(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("out of range"));
    assert_eq!(braidcalc(&["movie-classify", path(&dir.path().join("missing.json"))]).status.code(), Some(1));
}

#[test]
fn reduce_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("w.json");
    let cert = dir.path().join("cert.json");
    // Stabilized trefoil, conjugated.
    fs::write(&input, r#"{"n":3,"word":[-1,1,1,1,2,1]}"#).unwrap();
    let o = braidcalc(&["reduce", path(&input), "--pairs", "2,3", "--budget", "100000", "--output", path(&cert)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let c: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(c["final"]["n"], 2);
    assert_eq!(braidcalc(&["verify", path(&cert)]).status.code(), Some(0));
    let mut tampered = c.clone();
    tampered["final"]["word"] = serde_json::json!([1]);
    fs::write(&cert, tampered.to_string()).unwrap();
    assert_eq!(braidcalc(&["verify", path(&cert)]).status.code(), Some(1));
    assert_eq!(braidcalc(&["reduce", path(&input)]).status.code(), Some(1));
}

#[test]
fn movie_commands() {
    let dir = tempfile::tempdir().unwrap();
    let circ = dir.path().join("circular.json");
    fs::write(&circ, stdout(&braidcalc(&["fixture", "circular"]))).unwrap();
    assert_eq!(stdout(&braidcalc(&["movie-classify", path(&circ)])).trim(), "Circular");
    let t = dir.path().join("t.json");
    fs::write(&t, stdout(&braidcalc(&["fixture", "torus35"]))).unwrap();
    assert_eq!(stdout(&braidcalc(&["movie-validate", path(&t)])).trim(), "valid");
    let stats: serde_json::Value = serde_json::from_str(&stdout(&braidcalc(&["movie-stats", path(&t)]))).unwrap();
    assert_eq!(stats["valence_balance"]["holds"], true);
    assert_eq!(braidcalc(&["fixture", "nope"]).status.code(), Some(1));
}

#[test]
fn pipeline_writes_trace_movie_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    fs::write(&t, stdout(&braidcalc(&["fixture", "torus35"]))).unwrap();
    let run = |tag: &str| {
        let (trace, out, snaps) = (dir.path().join(format!("trace{tag}.json")), dir.path().join(format!("final{tag}.json")), dir.path().join(format!("snaps{tag}")));
        let o = braidcalc(&["movie-pipeline", path(&t), "--trace", path(&trace), "--output", path(&out), "--snapshots", path(&snaps)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        (fs::read_to_string(trace).unwrap(), out, fs::read_dir(snaps).unwrap().count())
    };
    let (trace_a, out, snaps) = run("a");
    let (trace_b, _, _) = run("b");
    assert_eq!(trace_a, trace_b);
    let trace: serde_json::Value = serde_json::from_str(&trace_a).unwrap();
    assert_eq!(snaps, trace["steps"].as_array().unwrap().len() + 1);
    assert_eq!(stdout(&braidcalc(&["movie-classify", path(&out)])).trim(), "Circular");
}

#[test]
fn dot_export_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    fs::write(&t, stdout(&braidcalc(&["fixture", "torus35"]))).unwrap();
    let a = stdout(&braidcalc(&["export-dot", path(&t)]));
    assert_eq!(a, stdout(&braidcalc(&["export-dot", path(&t)])));
    assert!(a.starts_with("graph"));
}

#[test]
fn random_movie_follows_seed_env() {
    let gen = |seed: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_braidcalc")).args(["movie-random"]).env("BRAIDCALC_SEED", seed).output().unwrap();
        assert_eq!(o.status.code(), Some(0));
        stdout(&o)
    };
    assert_eq!(gen("9"), gen("9"));
    assert_eq!(gen("9"), stdout(&braidcalc(&["movie-random", "--seed", "9"])));
}
