use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn evcat(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evcat"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("evcat runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = evcat(dir, args);
    assert!(
        out.status.success(),
        "evcat {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn synth(dir: &Path, sentences: usize, seed: u64) -> PathBuf {
    let out = format!("synth-{sentences}-{seed}");
    ok(
        dir,
        &["synth", "--sentences", &sentences.to_string(), "--seed", &seed.to_string(), "--out-dir", &out],
    );
    dir.join(out).join("corpus.jsonl")
}

#[test]
fn synth_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("table1.json"), r#"{"sentences": 300}"#).unwrap();
    for out in ["a", "b"] {
        ok(tmp.path(), &["synth", "--params", "table1.json", "--seed", "7", "--out-dir", out]);
    }
    for f in ["corpus.jsonl", "synth.manifest.json"] {
        let a = std::fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(f)).unwrap_or_default();
        if f == "corpus.jsonl" {
            assert_eq!(a, b);
        } else {
            // manifests differ only in the output directory
            let strip = |v: &[u8]| String::from_utf8_lossy(v).replace("\"a", "\"").replace("\"b", "\"");
            assert_eq!(strip(&a), strip(&b));
        }
    }
}

#[test]
fn crossval_report_has_ten_folds_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth(tmp.path(), 2544, 7);
    std::fs::write(tmp.path().join("best.json"), "{}").unwrap();
    let c = corpus.to_str().unwrap();
    for out in ["r1", "r2"] {
        ok(tmp.path(), &["crossval", "--config", "best.json", "--corpus", c, "--seed", "3", "--out-dir", out]);
    }
    let a = std::fs::read(tmp.path().join("r1/report.json")).unwrap();
    assert_eq!(a, std::fs::read(tmp.path().join("r2/report.json")).unwrap());
    let report: Value = serde_json::from_slice(&a).unwrap();
    let folds = report["folds"].as_array().unwrap();
    assert_eq!(folds.len(), 10);
    for f in folds {
        let t = &f["test"];
        let (acc, prec, rec) = (t["accuracy"].as_f64().unwrap(), t["precision"].as_f64().unwrap(), t["recall"].as_f64().unwrap());
        assert!((prec * rec - acc).abs() < 1e-9);
        // whole documents move between folds, so sizes wander by up to a document
        assert!((254 - 36..=255 + 36).contains(&f["test_size"].as_u64().unwrap()));
    }
    let text = std::fs::read_to_string(tmp.path().join("r1/report.txt")).unwrap();
    assert!(text.lines().any(|l| l.starts_with("mean")));
    let manifest = json(tmp.path().join("r1/crossval.manifest.json"));
    assert_eq!(manifest["tool"], "evcat");
    assert!(manifest["inputs"]["corpus"]["sha256"].as_str().unwrap().len() == 64);
    assert!(manifest["inputs"]["config"].is_object());
}

#[test]
fn crossval_equals_the_manual_chain() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let corpus = synth(dir, 600, 11);
    let c = corpus.to_str().unwrap();
    ok(dir, &["crossval", "--corpus", c, "--seed", "4", "--out-dir", "cv"]);
    let report = json(dir.join("cv/report.json"));
    for fold in 0..10 {
        let d = format!("fold{fold}");
        let p = |f: &str| format!("{d}/{f}");
        ok(dir, &["split", "--corpus", c, "--seed", "4", "--fold", &fold.to_string(), "--out-dir", &d]);
        ok(dir, &["select", "--corpus", &p("search.jsonl"), "--out-dir", &d]);
        ok(
            dir,
            &["features", "--corpus", &p("search.jsonl"), "--inventory", &p("inventory.json"), "--out-dir", &d],
        );
        ok(dir, &["search", "--table", &p("features.tsv"), "--pin-features", "--out-dir", &d]);
        ok(
            dir,
            &[
                "classify",
                "--inventory",
                &p("inventory.json"),
                "--table",
                &p("features.tsv"),
                "--trace",
                &p("trace.json"),
                "--select-on",
                &p("selection.jsonl"),
                "--corpus",
                &p("test.jsonl"),
                "--out-dir",
                &d,
            ],
        );
        let manual = json(dir.join(p("classification.json")));
        let auto = &report["folds"][fold];
        assert_eq!(manual["step"], auto["selected_step"], "fold {fold}");
        assert_eq!(manual["metrics"], auto["test"], "fold {fold}");
    }
}

#[test]
fn pinned_search_keeps_every_feature() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let c = synth(dir, 400, 2);
    let c = c.to_str().unwrap();
    ok(dir, &["select", "--corpus", c, "--out-dir", "o"]);
    ok(dir, &["features", "--corpus", c, "--inventory", "o/inventory.json", "--out-dir", "o"]);
    ok(dir, &["search", "--table", "o/features.tsv", "--pin-features", "--out-dir", "o"]);
    let trace = json(dir.join("o/trace.json"));
    let n = trace["arities"].as_array().unwrap().len() - 1;
    assert_eq!(n, 8);
    for step in trace["steps"].as_array().unwrap() {
        let edges: Vec<(u64, u64)> = serde_json::from_value(step["edges"].clone()).unwrap();
        for f in 0..n as u64 {
            assert!(edges.contains(&(f, n as u64)));
        }
    }
    let models = json(dir.join("o/models.json"));
    assert_eq!(models.as_array().unwrap().len(), trace["steps"].as_array().unwrap().len());
}

#[test]
fn extract_dumps_matches() {
    let tmp = tempfile::tempdir().unwrap();
    let c = synth(tmp.path(), 50, 1);
    ok(tmp.path(), &["extract", "--corpus", c.to_str().unwrap(), "--patterns", "syntactic,cooc-noun", "--out-dir", "x"]);
    let text = std::fs::read_to_string(tmp.path().join("x/matches.tsv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("doc_id\tsent_index\tpattern\tlemma\ttoken_index"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
    assert!(rows.iter().all(|r| r.len() == 5));
    assert!(rows.iter().any(|r| r[2] == "baseMV"));
    assert!(rows.iter().any(|r| r[2] == "cooc-noun"));
    assert!(!rows.iter().any(|r| r[2] == "cooc-verb"));
}

#[test]
fn failure_classes_have_distinct_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(dir.join("typo.json"), r#"{"organisation": "pc1"}"#).unwrap();
    std::fs::write(dir.join("mode.json"), r#"{"organization": "or1", "selection": {"mode": "per-class", "k": 0.5}}"#)
        .unwrap();
    std::fs::write(dir.join("bad.jsonl"), "not a corpus\n").unwrap();
    let code = |args: &[&str]| evcat(dir, args).status.code();
    assert_eq!(code(&["crossval", "--config", "typo.json"]), Some(2));
    assert_eq!(code(&["crossval", "--config", "mode.json"]), Some(2));
    assert_eq!(code(&["crossval"]), Some(2));
    assert_eq!(code(&["crossval", "--corpus", "bad.jsonl"]), Some(3));
    assert_eq!(code(&["crossval", "--corpus", "missing.jsonl"]), Some(3));
    let small = synth(dir, 8, 1);
    assert_eq!(code(&["crossval", "--corpus", small.to_str().unwrap()]), Some(3));
    let out = evcat(dir, &["crossval", "--corpus", "bad.jsonl"]);
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 1);
}

#[test]
fn training_table_rejects_a_foreign_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let a = synth(dir, 200, 1);
    let b = synth(dir, 200, 2);
    ok(dir, &["select", "--corpus", a.to_str().unwrap(), "--out-dir", "o"]);
    let out = evcat(dir, &["features", "--corpus", b.to_str().unwrap(), "--inventory", "o/inventory.json"]);
    assert_eq!(out.status.code(), Some(3));
    ok(
        dir,
        &["features", "--corpus", b.to_str().unwrap(), "--inventory", "o/inventory.json", "--role", "evaluation", "--out-dir", "o"],
    );
}
