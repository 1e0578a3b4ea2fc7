//! End-to-end runs of the `dygcn` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dygcn::cli::load_checkpoint;
use dygcn::dygcn::dygcn_step;
use dygcn::graph::{compute_delta, FeatureKind, FeatureMatrix};
use dygcn::io::{
    format_params, format_records, parse_records, read_embeddings, read_events, write_embeddings,
};
use dygcn::linalg::Matrix;
use dygcn::trainer::{train, TrainConfig, VariantParams};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dygcn")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const SYNTH: &str = "n_nodes=60\nsteps=6\np_in=0.2\np_out=0.02\nchurn_add=3\nchurn_remove=2\nseed=4\n";
const TRAIN: &str = "base_dim=4\nepochs=3\nstatic_epochs=5\nlearning_rate=0.01\nstatic_learning_rate=0.01\nfeatures=onehot\n";

/// Synthesizes a sequence and trains on it; returns (events, checkpoint dir).
fn trained(tmp: &TempDir, variant: &str) -> (PathBuf, PathBuf) {
    let synth_cfg = write(tmp.path(), "synth.cfg", SYNTH);
    let data_dir = tmp.path().join("data");
    ok(&["synth", "--config", s(&synth_cfg), "--out", s(&data_dir)]);
    let train_cfg = write(tmp.path(), "train.cfg", TRAIN);
    let ck = tmp.path().join(format!("ck-{variant}"));
    let events = data_dir.join("events.txt");
    ok(&["train", "--data", s(&events), "--variant", variant, "--config", s(&train_cfg), "--out", s(&ck)]);
    (events, ck)
}

#[test]
fn synth_single_step_has_no_deltas() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c", "n_nodes=20\nsteps=1\n");
    ok(&["synth", "--config", s(&cfg), "--out", s(tmp.path())]);
    assert_eq!(read_events(&tmp.path().join("events.txt")).unwrap().len(), 1);
    assert!(tmp.path().join("manifest.txt").exists());
}

#[test]
fn synth_is_deterministic_and_churn_matches_config() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c", SYNTH);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&["synth", "--config", s(&cfg), "--out", s(&a)]);
    ok(&["synth", "--config", s(&cfg), "--out", s(&b)]);
    for f in ["events.txt", "labels.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
    let seq = read_events(&a.join("events.txt")).unwrap();
    assert_eq!(seq.len(), 6);
    for w in seq.windows(2) {
        let d = compute_delta(&w[0], &w[1]).unwrap();
        assert_eq!((d.added().len(), d.removed().len()), (3, 2));
    }
}

#[test]
fn zero_epoch_checkpoint_is_the_initialisation() {
    let tmp = TempDir::new().unwrap();
    let (events, _) = trained(&tmp, "dygcn");
    let cfg = write(tmp.path(), "zero.cfg", "base_dim=4\nepochs=0\nstatic_epochs=0\nfeatures=onehot\n");
    let out = tmp.path().join("zero");
    ok(&["train", "--data", s(&events), "--config", s(&cfg), "--out", s(&out)]);

    let seq = read_events(&events).unwrap();
    let config = TrainConfig {
        base_dim: 4,
        epochs: 0,
        static_epochs: 0,
        features: FeatureKind::OneHot,
        ..TrainConfig::default()
    };
    let features = FeatureMatrix::build(FeatureKind::OneHot, &seq[0]);
    let lib = train(&seq[..seq.len() / 2], &features, &config).unwrap();
    assert_eq!(fs::read_to_string(out.join("params.ckpt")).unwrap(), format_params(&lib.params));
}

#[test]
fn training_is_reproducible_and_lowers_loss() {
    let tmp = TempDir::new().unwrap();
    let (events, ck) = trained(&tmp, "dygcn");
    let cfg = tmp.path().join("train.cfg");
    let again = tmp.path().join("again");
    ok(&["train", "--data", s(&events), "--variant", "dygcn", "--config", s(&cfg), "--out", s(&again)]);
    for f in ["params.ckpt", "base_gcn.ckpt", "loss.txt"] {
        assert_eq!(fs::read(ck.join(f)).unwrap(), fs::read(again.join(f)).unwrap(), "{f}");
    }
    let log = fs::read_to_string(ck.join("loss.txt")).unwrap();
    let losses = |stage: &str| -> Vec<f64> {
        log.lines()
            .filter(|l| l.starts_with(stage))
            .map(|l| l.split_whitespace().nth(2).unwrap().parse().unwrap())
            .collect()
    };
    for stage in ["static", "update"] {
        let l = losses(stage);
        assert!(l.last().unwrap() < l.first().unwrap(), "{stage}: {l:?}");
    }
}

#[test]
fn step_matches_library() {
    let tmp = TempDir::new().unwrap();
    let (events, ck) = trained(&tmp, "dygcn");
    let out = tmp.path().join("step");
    ok(&["step", "--data", s(&events), "--checkpoint", s(&ck), "--t", "1", "--out", s(&out)]);
    let got = read_embeddings(&out.join("embeddings_2.txt")).unwrap();

    let seq = read_events(&events).unwrap();
    let c = load_checkpoint(&ck).unwrap();
    let z1 = c.gcn.forward(&seq[1], &FeatureMatrix::build(c.features, &seq[0])).unwrap();
    let VariantParams::DyGcn(p) = &c.params else { panic!("expected dygcn parameters") };
    assert_eq!(got, dygcn_step(&seq[1], &seq[2], &z1, p).unwrap());
}

/// Overview graph at t=0, repeated at t=1, then (1,2) added at t=2.
const OVERVIEW: &str = "# n_slots=9\n# n_snapshots=3\n\
    0 1 3 +\n0 1 4 +\n0 2 5 +\n0 2 6 +\n0 3 7 +\n0 6 8 +\n2 1 2 +\n";

fn overview_checkpoint(tmp: &TempDir, variant: &str) -> (PathBuf, PathBuf, PathBuf) {
    let events = write(tmp.path(), "overview.txt", OVERVIEW);
    let cfg = write(tmp.path(), "ov.cfg", "base_dim=3\nepochs=1\nstatic_epochs=1\nmax_order=2\n");
    let ck = tmp.path().join(format!("ov-{variant}"));
    ok(&["train", "--data", s(&events), "--variant", variant, "--config", s(&cfg), "--out", s(&ck)]);
    let z = Matrix::from_fn(9, 3, |r, c| 0.1 * (r as f64 + 1.0) - 0.2 * c as f64);
    let zp = tmp.path().join("z.txt");
    write_embeddings(&zp, &z).unwrap();
    (events, ck, zp)
}

#[test]
fn empty_delta_step_keeps_rows() {
    let tmp = TempDir::new().unwrap();
    let (events, ck, zp) = overview_checkpoint(&tmp, "dygcn");
    let out = tmp.path().join("o");
    ok(&["step", "--data", s(&events), "--checkpoint", s(&ck), "--t", "0", "--embeddings", s(&zp), "--out", s(&out)]);
    assert_eq!(read_embeddings(&out.join("embeddings_1.txt")).unwrap(), read_embeddings(&zp).unwrap());
}

#[test]
fn spectral_step_changes_distant_rows() {
    let tmp = TempDir::new().unwrap();
    let z = {
        let (events, ck, zp) = overview_checkpoint(&tmp, "spectral");
        let out = tmp.path().join("o");
        ok(&["step", "--data", s(&events), "--checkpoint", s(&ck), "--t", "1", "--embeddings", s(&zp), "--out", s(&out)]);
        (read_embeddings(&zp).unwrap(), read_embeddings(&out.join("embeddings_2.txt")).unwrap())
    };
    for v in [7, 8] {
        assert_ne!(z.0.row(v), z.1.row(v), "row {v}");
    }
}

#[test]
fn horizon_zero_equals_single_snapshot_eval() {
    let tmp = TempDir::new().unwrap();
    let (events, ck) = trained(&tmp, "dygcn");
    let (a, b) = (tmp.path().join("lt"), tmp.path().join("at"));
    ok(&["eval", "--data", s(&events), "--checkpoint", s(&ck), "--task", "link", "--long-term", "--horizon", "0", "--out", s(&a)]);
    ok(&["eval", "--data", s(&events), "--checkpoint", s(&ck), "--task", "link", "--at", "0", "--out", s(&b)]);
    let load = |d: &Path| {
        let p = d.join("metrics.txt");
        parse_records(&fs::read_to_string(&p).unwrap(), &p).unwrap()
    };
    let (lt, at) = (load(&a), load(&b));
    assert_eq!(lt.len(), 2);
    for (x, y) in lt.iter().zip(&at) {
        assert_eq!((x.t, &x.metric, x.value), (y.t, &y.metric, y.value));
    }
}

#[test]
fn metric_records_round_trip() {
    let tmp = TempDir::new().unwrap();
    let (events, ck) = trained(&tmp, "spectral");
    let out = tmp.path().join("ev");
    ok(&["eval", "--data", s(&events), "--checkpoint", s(&ck), "--task", "link", "--out", s(&out)]);
    let path = out.join("metrics.txt");
    let text = fs::read_to_string(&path).unwrap();
    let records = parse_records(&text, &path).unwrap();
    assert!(!records.is_empty());
    assert!(records.iter().all(|r| r.task == "link" && r.variant == "spectral"));
    assert_eq!(format_records(&records), text);
}

#[test]
fn classification_eval_uses_labels() {
    let tmp = TempDir::new().unwrap();
    let (events, ck) = trained(&tmp, "dygcn");
    let labels = events.with_file_name("labels.txt");
    let out = tmp.path().join("cls");
    ok(&["eval", "--data", s(&events), "--checkpoint", s(&ck), "--task", "classification", "--labels", s(&labels), "--out", s(&out)]);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.contains("classification,dygcn,accuracy"));
}

#[test]
fn bench_single_variant() {
    let tmp = TempDir::new().unwrap();
    let (events, ck) = trained(&tmp, "dygcn");
    let out = tmp.path().join("b");
    ok(&["bench", "--data", s(&events), "--checkpoint", s(&ck), "--variants", "dygcn", "--repeats", "1", "--out", s(&out)]);
    let fit = fs::read_to_string(out.join("fit.csv")).unwrap();
    assert_eq!(fit.lines().count(), 2);
    assert!(fit.lines().nth(1).unwrap().starts_with("dygcn,"));
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("command=bench") && manifest.contains("threads=1"));
}

#[test]
fn convert_reads_snapshot_directory() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("snaps");
    fs::create_dir(&dir).unwrap();
    fs::write(dir.join("snap_0.edges"), "0 1\n1 2\n").unwrap();
    fs::write(dir.join("snap_1.edges"), "0 1\n2 3\n").unwrap();
    let out = tmp.path().join("c");
    ok(&["convert", "--input", s(&dir), "--out", s(&out)]);
    let seq = read_events(&out.join("events.txt")).unwrap();
    assert_eq!(seq.len(), 2);
    assert!(seq[1].has_edge(2, 3) && !seq[1].has_edge(1, 2));
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let missing = tmp.path().join("nope.txt");
    let out = tmp.path().join("o");
    assert_eq!(run(&["train", "--data", s(&missing), "--out", s(&out)]).status.code(), Some(2));
    let bad = write(tmp.path(), "bad.cfg", "learning_rate=-1\n");
    let events = write(tmp.path(), "e.txt", OVERVIEW);
    assert_eq!(run(&["train", "--data", s(&events), "--config", s(&bad), "--out", s(&out)]).status.code(), Some(2));
    let (events, ck) = trained(&tmp, "dygcn");
    assert_eq!(
        run(&["eval", "--data", s(&events), "--checkpoint", s(&ck), "--task", "classification", "--out", s(&out)]).status.code(),
        Some(2)
    );
}
