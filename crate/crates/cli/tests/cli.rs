use std::path::Path;
use std::process::{Command, Output};

use filldist_core::{Complex2, Embedding, ExperimentRecord};

fn filldist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_filldist")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sample_writes_csv_to_stdout() {
    let out = filldist(&["sample", "--n", "6,8", "--p", "0.5", "--trials", "3", "--seed", "7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].starts_with("seed,trial_index,n,p,face_count"));
    assert!(lines[1].contains(",0,6,0.5,"));
    assert!(lines[6].contains(",2,8,0.5,"));
}

#[test]
fn output_is_reproducible() {
    let args = ["sweep", "--n", "7", "--p", "0.6", "--trials", "4", "--seed", "3"];
    let a = filldist(&args);
    let b = filldist(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("out.json");
    let out = filldist(&[
        "spectra", "--n", "6", "--eps", "0.5", "--trials", "2", "--format", "json", "--out", path(&file),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let records: Vec<ExperimentRecord> =
        serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(records.len(), 2);
    assert!(records.iter().all(|r| r.lambda1.is_some() && r.min_fill.is_none()));
}

#[test]
fn certificate_of_loaded_complex() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("k5.json");
    Complex2::new_complete(5).unwrap().save(&file).unwrap();
    let out = filldist(&["certificate", "--complex", path(&file), "--format", "json"]);
    assert!(out.status.success());
    let records: Vec<ExperimentRecord> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(records.len(), 1);
    let cert = records[0].certificate.unwrap();
    assert!((cert - (5.0f64 / 9.0).sqrt()).abs() < 1e-9);
    assert_eq!(records[0].p, None);
}

#[test]
fn embed_with_given_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let cx = dir.path().join("x.json");
    let emb = dir.path().join("e.json");
    Complex2::new_complete(6).unwrap().save(&cx).unwrap();
    filldist_core::embed::standard_basis_embedding(6).unwrap().save(&emb).unwrap();
    let out = filldist(&["embed", "--complex", path(&cx), "--embedding", path(&emb), "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let records: Vec<ExperimentRecord> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(records[0].inequality_holds, Some(true));
    assert!(records[0].triangle_distortion.is_some());
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"mode":"sample","n_values":[5],"p_spec":{"p":1.0},"trials":2}"#).unwrap();
    let out = filldist(&["fill", "--config", path(&cfg), "--trials", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    // Every triangle of the full simplex is a face.
    assert!(text.lines().nth(1).unwrap().contains(",10,0,"));
}

#[test]
fn invalid_config_exits_2() {
    for args in [
        vec!["sample", "--n", "6", "--p", "1.5"],
        vec!["sample", "--n", "2", "--p", "0.5"],
        vec!["sample", "--n", "6"],
        vec!["sample", "--n", "6", "--p", "0.5", "--trials", "0"],
        vec!["sample", "--n", "6", "--p", "0.5", "--eps", "0.2"],
        vec!["bogus"],
    ] {
        assert_eq!(filldist(&args).status.code(), Some(2), "{args:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, "{\"mode\": 3}").unwrap();
    assert_eq!(filldist(&["sample", "--config", path(&cfg)]).status.code(), Some(2));
}

#[test]
fn io_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(filldist(&["fill", "--complex", path(&missing)]).status.code(), Some(1));
    let bad_out = dir.path().join("no/such/dir/out.csv");
    let out = filldist(&["sample", "--n", "5", "--p", "0.5", "--out", path(&bad_out)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn embedding_size_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cx = dir.path().join("x.json");
    let emb = dir.path().join("e.json");
    Complex2::new_complete(6).unwrap().save(&cx).unwrap();
    Embedding::new(vec![vec![0.0, 0.0]; 5]).unwrap().save(&emb).unwrap();
    let out = filldist(&["embed", "--complex", path(&cx), "--embedding", path(&emb)]);
    assert_eq!(out.status.code(), Some(2));
}
