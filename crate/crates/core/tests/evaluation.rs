mod common;

use dygcn::dygcn::{dygcn_step, DyGcnParams};
use dygcn::eval::{
    link_prediction_eval_with, long_term_eval, node_classification_eval, sweep, timing_bench,
    BenchOptions, BenchVariant, LogisticRegression, LongTermTask, SweepSetting,
};
use dygcn::gcn::GcnModel;
use dygcn::graph::{compute_delta, influenced_sets, FeatureKind, FeatureMatrix, GraphSnapshot};
use dygcn::linalg::{Activation, Matrix};
use dygcn::rng::derive_seed;
use dygcn::synth::{generate, SynthConfig};
use dygcn::trainer::{train, TrainConfig, VariantParams};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

/// Two 5-cliques; every non-edge crosses between them.
fn two_cliques() -> GraphSnapshot {
    let mut pairs = Vec::new();
    for base in [0, 5] {
        for a in base..base + 5 {
            for b in a + 1..base + 5 {
                pairs.push((a, b));
            }
        }
    }
    GraphSnapshot::from_edges(10, 0, pairs).unwrap()
}

fn block_embeddings(n: usize) -> Matrix {
    Matrix::from_fn(n, 2, |r, c| match (r < n / 2, c) {
        (true, 0) => 1.0,
        (false, 0) => -1.0,
        _ => 0.0,
    })
}

fn frozen_sequence(snap: &GraphSnapshot, len: usize) -> Vec<GraphSnapshot> {
    (0..len).map(|t| snap.clone().with_time_index(t as u64)).collect()
}

#[test]
fn separable_link_scores_are_perfect() {
    let snap = two_cliques();
    let r = link_prediction_eval_with(&block_embeddings(10), &snap, 1, None).unwrap();
    assert_eq!((r.auc, r.f1), (1.0, 1.0));
    assert_eq!(r.n_pos, r.n_neg);
}

#[test]
fn separable_classes_stay_perfect_over_time() {
    let seq = frozen_sequence(&two_cliques(), 5);
    let labels: Vec<usize> = (0..10).map(|v| v / 5).collect();
    let params = VariantParams::DyGcn(DyGcnParams::glorot(2, 2, Activation::Tanh, &mut dygcn::rng::stream(0, "p")));
    let recs = long_term_eval(&block_embeddings(10), &seq, &params, 3, &LongTermTask::NodeClassification { labels: &labels }).unwrap();
    assert_eq!(recs.len(), 4);
    assert!(recs.iter().all(|r| r.value == 1.0 && r.task == "long_term_class"));
}

#[test]
fn shuffled_labels_are_at_chance() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 2000;
    let z = random_matrix(n, 4, 1.0, &mut rng);
    let mut labels: Vec<usize> = (0..n).map(|v| v % 2).collect();
    labels.shuffle(&mut rng);
    let acc = LogisticRegression::fit(&z, &labels).unwrap().accuracy(&z, &labels).unwrap();
    assert!((acc - 0.5).abs() <= 0.05, "accuracy {acc}");
}

#[test]
fn head_degrades_under_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 400;
    let labels: Vec<usize> = (0..n).map(|v| v % 2).collect();
    let z0 = Matrix::from_fn(n, 3, |r, _| if labels[r] == 1 { 0.6 } else { -0.6 } + rng.gen_range(-1.0..1.0));
    let mean = z0.as_slice().iter().sum::<f64>() / z0.as_slice().len() as f64;
    let std = (z0.as_slice().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / z0.as_slice().len() as f64).sqrt();
    let noisy = Matrix::from_fn(n, 3, |r, c| {
        // Box–Muller
        let (u1, u2): (f64, f64) = (rng.gen_range(1e-12..1.0), rng.gen());
        z0.get(r, c) + std * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    });
    let accs = node_classification_eval(&z0, &labels, &[z0.clone(), noisy]).unwrap();
    assert!(accs[0] > accs[1], "{accs:?}");
}

fn sbm(steps: usize, seed: u64) -> Vec<GraphSnapshot> {
    generate(&SynthConfig {
        n_nodes: 120,
        p_in: 0.1,
        p_out: 0.01,
        steps,
        churn_add: 4,
        churn_remove: 4,
        seed,
        ..SynthConfig::default()
    })
    .unwrap()
    .sequence
}

fn link_task() -> LongTermTask<'static> {
    LongTermTask::LinkPrediction {
        seed: 5,
        new_edges_only: false,
    }
}

#[test]
fn horizon_zero_is_a_single_snapshot_eval() {
    let seq = sbm(3, 1);
    let z0 = random_matrix(120, 4, 1.0, &mut ChaCha8Rng::seed_from_u64(6));
    let params = VariantParams::DyGcn(DyGcnParams::glorot(4, 2, Activation::Tanh, &mut dygcn::rng::stream(1, "p")));
    let recs = long_term_eval(&z0, &seq, &params, 0, &link_task()).unwrap();
    let direct = link_prediction_eval_with(&z0, &seq[1], derive_seed(5, "t0"), None).unwrap();
    assert_eq!(recs.len(), 2);
    assert_eq!((recs[0].value, recs[1].value), (direct.auc, direct.f1));
}

#[test]
fn empty_deltas_give_constant_metrics() {
    let seq = frozen_sequence(&sbm(1, 2)[0], 6);
    let z0 = random_matrix(120, 4, 1.0, &mut ChaCha8Rng::seed_from_u64(7));
    let params = VariantParams::DyGcn(DyGcnParams::glorot(4, 2, Activation::Tanh, &mut dygcn::rng::stream(2, "p")));
    let task = LongTermTask::LinkPrediction {
        seed: 5,
        new_edges_only: false,
    };
    let recs = long_term_eval(&z0, &seq, &params, 4, &task).unwrap();
    // Negatives are drawn per step, so compare against a fixed draw.
    for t in 0..=4u64 {
        let want = link_prediction_eval_with(&z0, &seq[t as usize + 1], derive_seed(5, &format!("t{t}")), None).unwrap();
        let got: Vec<f64> = recs.iter().filter(|r| r.t == t).map(|r| r.value).collect();
        assert_eq!(got, vec![want.auc, want.f1]);
    }
}

#[test]
fn horizon_two_is_two_composed_steps() {
    let seq = sbm(4, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let z0 = random_matrix(120, 4, 1.0, &mut rng);
    let p = random_params(4, 2, Activation::Tanh, &mut rng);
    let recs = long_term_eval(&z0, &seq, &VariantParams::DyGcn(p.clone()), 2, &link_task()).unwrap();
    let z2 = dygcn_step(&seq[1], &seq[2], &dygcn_step(&seq[0], &seq[1], &z0, &p).unwrap(), &p).unwrap();
    let want = link_prediction_eval_with(&z2, &seq[3], derive_seed(5, "t2"), None).unwrap();
    let got: Vec<f64> = recs.iter().filter(|r| r.t == 2).map(|r| r.value).collect();
    assert_eq!(got, vec![want.auc, want.f1]);
}

#[test]
fn horizon_must_fit_the_sequence() {
    let seq = sbm(3, 4);
    let z0 = Matrix::zeros(120, 2);
    let params = VariantParams::DyGcn(DyGcnParams::glorot(2, 1, Activation::Tanh, &mut dygcn::rng::stream(0, "p")));
    assert!(long_term_eval(&z0, &seq, &params, 2, &link_task()).is_err());
}

#[test]
fn empty_deltas_are_cheap_to_step() {
    let n = 5000;
    let p_in = SynthConfig::p_in_for_edges(n, 2, 20_000.0, 0.1);
    let first = generate(&SynthConfig { n_nodes: n, p_in, p_out: p_in * 0.1, steps: 1, ..SynthConfig::default() })
        .unwrap()
        .sequence
        .remove(0);
    let seq = frozen_sequence(&first, 4);
    let features = FeatureMatrix::build(FeatureKind::Degree, &first);
    let mut rng = dygcn::rng::stream(3, "bench");
    let gcn = GcnModel::default_architecture(1, 16, &mut rng);
    let params = DyGcnParams::glorot(16, 2, Activation::Tanh, &mut rng);
    let options = BenchOptions {
        variants: vec![BenchVariant::GcnFull, BenchVariant::DyGcn],
        ..BenchOptions::default()
    };
    let report = timing_bench(&seq, &gcn, &features, Some(&params), None, &options).unwrap();
    assert!(report.steps.iter().all(|s| s.influence_sizes.iter().all(|&k| k == 0)));
    let (full, step) = (report.records[0].mean_seconds, report.records[1].mean_seconds);
    assert!(step * 10.0 < full, "full {full} step {step}");
}

#[test]
fn single_variant_gives_one_record() {
    let seq = sbm(3, 5);
    let features = FeatureMatrix::build(FeatureKind::Degree, &seq[0]);
    let mut rng = dygcn::rng::stream(4, "bench");
    let gcn = GcnModel::default_architecture(1, 4, &mut rng);
    let options = BenchOptions {
        variants: vec![BenchVariant::GcnFull],
        repeats: 1,
        ..BenchOptions::default()
    };
    let report = timing_bench(&seq, &gcn, &features, None, None, &options).unwrap();
    assert_eq!(report.records.len(), 1);
    assert_eq!(report.records[0].per_step_seconds.len(), 2);
}

#[test]
fn sweep_rows_count_updated_nodes() {
    let seq = sbm(4, 6);
    let features = FeatureMatrix::build(FeatureKind::Degree, &seq[0]);
    let mut rng = dygcn::rng::stream(5, "sweep");
    let gcn = GcnModel::default_architecture(1, 4, &mut rng);
    let full = DyGcnParams::glorot(4, 2, Activation::Tanh, &mut rng);
    let settings: Vec<SweepSetting> = (1..=2)
        .map(|k| SweepSetting {
            parameter: "K".into(),
            value: k,
            gcn: gcn.clone(),
            params: VariantParams::DyGcn(full.with_max_order(k).unwrap()),
        })
        .collect();
    let rows = sweep(&settings, &seq, &features, 2, 1, 1).unwrap();
    assert_eq!(rows.len(), 2);
    let single = sweep(&settings[..1], &seq, &features, 2, 1, 1).unwrap();
    assert_eq!(single.len(), 1);
    for (i, t) in (1..seq.len() - 1).enumerate() {
        let sets = influenced_sets(&seq[t + 1], &compute_delta(&seq[t], &seq[t + 1]).unwrap(), 2).unwrap();
        assert_eq!(rows[0].updated_nodes[i], sets.sizes()[0]);
        assert_eq!(rows[1].updated_nodes[i], sets.total());
    }
}

#[test]
fn training_lowers_the_loss_on_sbm() {
    let seq = sbm(5, 7);
    let features = FeatureMatrix::build(FeatureKind::OneHot, &seq[0]);
    let config = TrainConfig {
        features: FeatureKind::OneHot,
        base_dim: 8,
        static_epochs: 30,
        static_learning_rate: 1e-2,
        epochs: 20,
        learning_rate: 1e-2,
        ..TrainConfig::default()
    };
    let out = train(&seq, &features, &config).unwrap();
    let (s, u) = (&out.report.static_per_epoch_loss, &out.report.per_epoch_loss);
    assert!(s.last().unwrap() < s.first().unwrap());
    assert!(u.last().unwrap() < u.first().unwrap());
}
