//! Evaluation: link prediction, node classification with a frozen
//! logistic-regression head, long-term rolling, timing and sweeps.

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use argmin::core::{CostFunction, Executor, Gradient, State};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;
use rand::seq::index;
use rand::Rng;

use crate::dygcn::{self, DyGcnParams};
use crate::error::{Error, Result};
use crate::gcn::GcnModel;
use crate::graph::{compute_delta, Edge, FeatureMatrix, GraphDelta, GraphSnapshot};
use crate::io::MetricRecord;
use crate::linalg::{dot, norm, EmbeddingMatrix, Matrix};
use crate::rng;
use crate::spectral::{self, SpectralParams};
use crate::trainer::{self, TrainConfig, VariantParams};

/// Cosine similarity; 0 when either vector is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let denom = norm(a) * norm(b);
    if denom == 0.0 {
        0.0
    } else {
        dot(a, b) / denom
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkPredResult {
    pub auc: f64,
    pub f1: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

/// Probability that a positive outscores a negative, ties counting one
/// half. Computed from sorted scores with integer counts, so the result is
/// exact rather than a float accumulation.
pub fn auc(pos: &[f64], neg: &[f64]) -> Result<f64> {
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Evaluation("AUC needs positive and negative scores".into()));
    }
    if pos.iter().chain(neg).any(|s| s.is_nan()) {
        return Err(Error::Evaluation("NaN score".into()));
    }
    let mut neg_sorted = neg.to_vec();
    neg_sorted.sort_by(f64::total_cmp);
    // Doubled win count: 2 per strict win, 1 per tie.
    let mut doubled: u128 = 0;
    for &p in pos {
        let below = neg_sorted.partition_point(|&n| n < p);
        let not_above = neg_sorted.partition_point(|&n| n <= p);
        doubled += 2 * below as u128 + (not_above - below) as u128;
    }
    Ok(doubled as f64 / (2 * pos.len() as u128 * neg.len() as u128) as f64)
}

/// F1 of the rule `score > median(all scores)`.
pub fn f1_at_median(pos: &[f64], neg: &[f64]) -> f64 {
    let mut all: Vec<f64> = pos.iter().chain(neg).copied().collect();
    if all.is_empty() {
        return 0.0;
    }
    all.sort_by(f64::total_cmp);
    let m = all.len();
    let threshold = if m % 2 == 1 {
        all[m / 2]
    } else {
        0.5 * (all[m / 2 - 1] + all[m / 2])
    };
    let tp = pos.iter().filter(|&&s| s > threshold).count();
    let fp = neg.iter().filter(|&&s| s > threshold).count();
    let fn_ = pos.len() - tp;
    if tp == 0 {
        return 0.0;
    }
    2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
}

/// `count` distinct node pairs that are not edges of `snap`, uniformly.
pub fn sample_non_edges(snap: &GraphSnapshot, count: usize, rng: &mut impl Rng) -> Result<Vec<Edge>> {
    let n = snap.n_slots() as u64;
    let pairs = n * n.saturating_sub(1) / 2;
    let free = pairs - snap.n_edges() as u64;
    if count as u64 > free {
        return Err(Error::Evaluation(format!(
            "{count} negative pairs requested but only {free} non-edges exist"
        )));
    }
    if 2 * count as u64 > free {
        // Dense regime: enumerate the complement.
        let all: Vec<Edge> = (0..snap.n_slots())
            .flat_map(|u| ((u + 1)..snap.n_slots()).map(move |v| (u, v)))
            .filter(|&(u, v)| !snap.has_edge(u, v))
            .map(|(u, v)| Edge::new(u, v).unwrap())
            .collect();
        return Ok(index::sample(rng, all.len(), count)
            .into_iter()
            .map(|i| all[i])
            .collect());
    }
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = rng.gen_range(0..snap.n_slots());
        let v = rng.gen_range(0..snap.n_slots());
        if u == v || snap.has_edge(u, v) {
            continue;
        }
        let e = Edge::new(u, v)?;
        if seen.insert(e) {
            out.push(e);
        }
    }
    Ok(out)
}

/// Scores the edges of `next` (or only the edges new since `prev`) against
/// an equal number of sampled non-edges by embedding cosine.
pub fn link_prediction_eval_with(
    z: &EmbeddingMatrix,
    next: &GraphSnapshot,
    seed: u64,
    new_since: Option<&GraphSnapshot>,
) -> Result<LinkPredResult> {
    if z.rows() != next.n_slots() {
        return Err(Error::Shape(format!(
            "{} embedding rows for {} slots",
            z.rows(),
            next.n_slots()
        )));
    }
    let positives: Vec<Edge> = match new_since {
        Some(prev) => {
            let d = compute_delta_loose(prev, next)?;
            d.added().to_vec()
        }
        None => next.edges().collect(),
    };
    if positives.is_empty() {
        return Err(Error::Evaluation("no positive edges to predict".into()));
    }
    let mut rng = rng::stream(seed, "eval/link-negatives");
    let negatives = sample_non_edges(next, positives.len(), &mut rng)?;
    let score = |e: &Edge| cosine(z.row(e.lo()), z.row(e.hi()));
    let pos: Vec<f64> = positives.iter().map(score).collect();
    let neg: Vec<f64> = negatives.iter().map(score).collect();
    Ok(LinkPredResult {
        auc: auc(&pos, &neg)?,
        f1: f1_at_median(&pos, &neg),
        n_pos: pos.len(),
        n_neg: neg.len(),
    })
}

pub fn link_prediction_eval(z: &EmbeddingMatrix, next: &GraphSnapshot, seed: u64) -> Result<LinkPredResult> {
    link_prediction_eval_with(z, next, seed, None)
}

/// Delta between any two snapshots of one universe, ignoring time indices.
fn compute_delta_loose(prev: &GraphSnapshot, next: &GraphSnapshot) -> Result<GraphDelta> {
    let prev = prev.clone().with_time_index(next.time_index().wrapping_sub(1));
    compute_delta(&prev, next)
}

// ----------------------------------------------------- classification

pub const LOGREG_C: f64 = 1.0;
pub const LOGREG_TOL: f64 = 1e-4;
pub const LOGREG_MAX_ITER: u64 = 100;

/// Multinomial logistic regression with an L2 penalty on the weights
/// (not the intercepts): `½‖W‖² + C Σ_i −log softmax(x_i W + b)_{y_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogisticRegression {
    /// `dim × classes`
    pub weights: Matrix,
    pub intercepts: Vec<f64>,
    /// Original label of each class column.
    pub classes: Vec<usize>,
}

struct LogRegProblem<'a> {
    x: &'a Matrix,
    y: &'a [usize],
    n_classes: usize,
    c: f64,
}

impl LogRegProblem<'_> {
    fn cost_grad(&self, p: &[f64], want_grad: bool) -> (f64, Vec<f64>) {
        let (d, k) = (self.x.cols(), self.n_classes);
        let (w, b) = p.split_at(d * k);
        let mut grad = vec![0.0; p.len()];
        let mut loss = 0.5 * w.iter().map(|x| x * x).sum::<f64>();
        let mut logits = vec![0.0; k];
        for (i, &yi) in self.y.iter().enumerate() {
            let xi = self.x.row(i);
            logits.copy_from_slice(b);
            for (j, &xv) in xi.iter().enumerate() {
                for (c, l) in logits.iter_mut().enumerate() {
                    *l += xv * w[j * k + c];
                }
            }
            let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = logits.iter().map(|l| (l - max).exp()).sum();
            let lse = max + sum.ln();
            loss += self.c * (lse - logits[yi]);
            if want_grad {
                for c in 0..k {
                    let r = self.c * ((logits[c] - lse).exp() - if c == yi { 1.0 } else { 0.0 });
                    for (j, &xv) in xi.iter().enumerate() {
                        grad[j * k + c] += r * xv;
                    }
                    grad[d * k + c] += r;
                }
            }
        }
        if want_grad {
            for (g, &wv) in grad.iter_mut().zip(w) {
                *g += wv;
            }
        }
        (loss, grad)
    }
}

impl CostFunction for LogRegProblem<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.cost_grad(p, false).0)
    }
}

impl Gradient for LogRegProblem<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, p: &Vec<f64>) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        Ok(self.cost_grad(p, true).1)
    }
}

impl LogisticRegression {
    /// L-BFGS from zero, stopping when the gradient norm drops below
    /// [`LOGREG_TOL`] or after [`LOGREG_MAX_ITER`] iterations.
    pub fn fit(x: &Matrix, labels: &[usize]) -> Result<Self> {
        if x.rows() != labels.len() {
            return Err(Error::Shape("one label per embedding row required".into()));
        }
        let classes: Vec<usize> = labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        if classes.len() < 2 {
            return Err(Error::Evaluation("classification needs at least two classes".into()));
        }
        if !x.is_finite() {
            return Err(Error::Numeric("non-finite embeddings".into()));
        }
        let y: Vec<usize> = labels
            .iter()
            .map(|l| classes.binary_search(l).unwrap())
            .collect();
        let (d, k) = (x.cols(), classes.len());
        let problem = LogRegProblem {
            x,
            y: &y,
            n_classes: k,
            c: LOGREG_C,
        };
        let solver = LBFGS::new(MoreThuenteLineSearch::new(), 10)
            .with_tolerance_grad(LOGREG_TOL)
            .map_err(|e| Error::Evaluation(e.to_string()))?
            .with_tolerance_cost(0.0)
            .map_err(|e| Error::Evaluation(e.to_string()))?;
        let res = Executor::new(problem, solver)
            .configure(|s| s.param(vec![0.0; d * k + k]).max_iters(LOGREG_MAX_ITER))
            .run()
            .map_err(|e| Error::Evaluation(format!("logistic regression: {e}")))?;
        let p = res
            .state()
            .get_best_param()
            .ok_or_else(|| Error::Evaluation("logistic regression produced no solution".into()))?
            .clone();
        let (w, b) = p.split_at(d * k);
        Ok(Self {
            weights: Matrix::from_vec(d, k, w.to_vec())?,
            intercepts: b.to_vec(),
            classes,
        })
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<usize>> {
        if x.cols() != self.weights.rows() {
            return Err(Error::Shape("embedding width differs from the fitted head".into()));
        }
        let logits = x.matmul(&self.weights)?;
        Ok((0..x.rows())
            .map(|i| {
                let row = logits.row(i);
                let best = (0..row.len())
                    .max_by(|&a, &b| {
                        (row[a] + self.intercepts[a]).total_cmp(&(row[b] + self.intercepts[b]))
                    })
                    .unwrap();
                self.classes[best]
            })
            .collect())
    }

    pub fn accuracy(&self, x: &Matrix, labels: &[usize]) -> Result<f64> {
        let pred = self.predict(x)?;
        if pred.len() != labels.len() {
            return Err(Error::Shape("one label per embedding row required".into()));
        }
        let hits = pred.iter().zip(labels).filter(|(p, l)| p == l).count();
        Ok(hits as f64 / labels.len() as f64)
    }
}

/// Fits the head on `z0` once and reports its accuracy on each later
/// embedding matrix with the head held fixed.
pub fn node_classification_eval(
    z0: &EmbeddingMatrix,
    labels: &[usize],
    later: &[EmbeddingMatrix],
) -> Result<Vec<f64>> {
    let head = LogisticRegression::fit(z0, labels)?;
    later.iter().map(|z| head.accuracy(z, labels)).collect()
}

// ------------------------------------------------------------ long term

#[derive(Clone, Debug)]
pub enum LongTermTask<'a> {
    /// Link prediction of `Z_t` against snapshot `t+1`.
    LinkPrediction { seed: u64, new_edges_only: bool },
    /// Accuracy of a head fitted on `Z_0`.
    NodeClassification { labels: &'a [usize] },
}

/// Rolls `Z_0` forward through `sequence` with the variant's own outputs as
/// inputs and evaluates the task at every `t = 0..=horizon`.
pub fn long_term_eval(
    z0: &EmbeddingMatrix,
    sequence: &[GraphSnapshot],
    params: &VariantParams,
    horizon: usize,
    task: &LongTermTask<'_>,
) -> Result<Vec<MetricRecord>> {
    if horizon + 2 > sequence.len() {
        return Err(Error::Parameter(format!(
            "horizon {horizon} needs {} snapshots, have {}",
            horizon + 2,
            sequence.len()
        )));
    }
    let head = match task {
        LongTermTask::NodeClassification { labels } => Some(LogisticRegression::fit(z0, labels)?),
        LongTermTask::LinkPrediction { .. } => None,
    };
    let variant = params.variant().name();
    let mut z = z0.clone();
    let mut out = Vec::new();
    for t in 0..=horizon {
        if t > 0 {
            let delta = compute_delta(&sequence[t - 1], &sequence[t])?;
            params.step_in_place(&mut z, &sequence[t], &delta)?;
            if !z.is_finite() {
                return Err(Error::Numeric(format!("non-finite embeddings after step {t}")));
            }
        }
        let tt = t as u64;
        match task {
            LongTermTask::LinkPrediction {
                seed,
                new_edges_only,
            } => {
                let prev = new_edges_only.then(|| &sequence[t]);
                let r = link_prediction_eval_with(&z, &sequence[t + 1], rng::derive_seed(*seed, &format!("t{t}")), prev)?;
                out.push(MetricRecord::new("long_term_link", variant, tt, "auc", r.auc));
                out.push(MetricRecord::new("long_term_link", variant, tt, "f1", r.f1));
            }
            LongTermTask::NodeClassification { labels } => {
                let acc = head.as_ref().unwrap().accuracy(&z, labels)?;
                out.push(MetricRecord::new("long_term_class", variant, tt, "accuracy", acc));
            }
        }
    }
    Ok(out)
}

/// Link prediction on held-out steps: for each `t ≥ train_len − 1` with
/// `t + 2` in range, `Z^{t+1}` = step from the base-GCN embedding of
/// snapshot `t`, scored against snapshot `t + 2`. Records carry `t + 1`.
pub fn heldout_link_prediction(
    gcn: &GcnModel,
    features: &FeatureMatrix,
    params: &VariantParams,
    sequence: &[GraphSnapshot],
    train_len: usize,
    seed: u64,
    new_edges_only: bool,
) -> Result<Vec<(u64, LinkPredResult)>> {
    let first = train_len.saturating_sub(1);
    let mut out = Vec::new();
    for t in first..sequence.len().saturating_sub(2) {
        let z_t = gcn.forward(&sequence[t], features)?;
        let delta = compute_delta(&sequence[t], &sequence[t + 1])?;
        let z_next = params.step(&sequence[t + 1], &delta, &z_t)?;
        let prev = new_edges_only.then(|| &sequence[t + 1]);
        let r = link_prediction_eval_with(
            &z_next,
            &sequence[t + 2],
            rng::derive_seed(seed, &format!("t{}", t + 1)),
            prev,
        )?;
        out.push(((t + 1) as u64, r));
    }
    if out.is_empty() {
        return Err(Error::Evaluation("no held-out steps to evaluate".into()));
    }
    Ok(out)
}

// --------------------------------------------------------------- timing

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchVariant {
    /// Full base-GCN forward pass on the next snapshot.
    GcnFull,
    /// Base-GCN refit on the next snapshot, bracketing retrain-per-step
    /// baselines.
    GcnRetrain,
    DyGcn,
    Spectral,
}

impl BenchVariant {
    pub fn name(self) -> &'static str {
        match self {
            BenchVariant::GcnFull => "gcn_full",
            BenchVariant::GcnRetrain => "gcn_retrain",
            BenchVariant::DyGcn => "dygcn",
            BenchVariant::Spectral => "spectral",
        }
    }
}

impl std::str::FromStr for BenchVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gcn_full" => Ok(BenchVariant::GcnFull),
            "gcn_retrain" => Ok(BenchVariant::GcnRetrain),
            "dygcn" => Ok(BenchVariant::DyGcn),
            "spectral" => Ok(BenchVariant::Spectral),
            other => Err(Error::Parameter(format!("unknown bench variant '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimingRecord {
    pub variant: String,
    pub per_step_seconds: Vec<f64>,
    pub mean_seconds: f64,
}

impl TimingRecord {
    fn new(variant: &str, per_step_seconds: Vec<f64>) -> Self {
        let mean_seconds = if per_step_seconds.is_empty() {
            0.0
        } else {
            per_step_seconds.iter().sum::<f64>() / per_step_seconds.len() as f64
        };
        Self {
            variant: variant.into(),
            per_step_seconds,
            mean_seconds,
        }
    }
}

/// Size of one step's change.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepStats {
    /// Time index of the post-change snapshot.
    pub t: u64,
    /// `|ΔE|`
    pub changed_edges: usize,
    /// `|ΔV|`: distinct endpoints of changed edges.
    pub changed_nodes: usize,
    /// `|V_1| … |V_K|`
    pub influence_sizes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub records: Vec<TimingRecord>,
    pub steps: Vec<StepStats>,
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub variants: Vec<BenchVariant>,
    /// Each step is timed this many times; the minimum is kept.
    pub repeats: usize,
    /// Used for the retrain variant only.
    pub retrain: TrainConfig,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            variants: vec![BenchVariant::GcnFull, BenchVariant::DyGcn, BenchVariant::Spectral],
            repeats: 3,
            retrain: TrainConfig {
                static_epochs: 1,
                ..Default::default()
            },
        }
    }
}

fn min_time(repeats: usize, mut f: impl FnMut() -> Result<()>) -> Result<f64> {
    let mut best = f64::INFINITY;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        f()?;
        best = best.min(start.elapsed().as_secs_f64());
    }
    Ok(best)
}

/// Times every variant on every step of `sequence`. Incremental variants
/// roll their own embeddings forward from the base-GCN embedding of the
/// first snapshot; deltas are precomputed and not timed. Run on a single
/// thread for meaningful wall-clock numbers.
pub fn timing_bench(
    sequence: &[GraphSnapshot],
    gcn: &GcnModel,
    features: &FeatureMatrix,
    dygcn: Option<&DyGcnParams>,
    spectral: Option<&SpectralParams>,
    options: &BenchOptions,
) -> Result<BenchReport> {
    if sequence.len() < 2 {
        return Err(Error::Parameter("timing needs at least two snapshots".into()));
    }
    let deltas: Vec<GraphDelta> = sequence
        .windows(2)
        .map(|w| compute_delta(&w[0], &w[1]))
        .collect::<Result<_>>()?;
    let max_order = dygcn.map_or(1, DyGcnParams::max_order);
    let steps = deltas
        .iter()
        .zip(&sequence[1..])
        .map(|(d, next)| {
            let sets = crate::graph::influenced_sets(next, d, max_order)?;
            Ok(StepStats {
                t: next.time_index(),
                changed_edges: d.churn(),
                changed_nodes: d.endpoints().len(),
                influence_sizes: sets.sizes(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let z0 = gcn.forward(&sequence[0], features)?;
    let mut records = Vec::new();
    for &variant in &options.variants {
        let mut times = Vec::with_capacity(deltas.len());
        match variant {
            BenchVariant::GcnFull => {
                for next in &sequence[1..] {
                    times.push(min_time(options.repeats, || gcn.forward(next, features).map(drop))?);
                }
            }
            BenchVariant::GcnRetrain => {
                for next in &sequence[1..] {
                    times.push(min_time(options.repeats, || {
                        let (m, _) = trainer::train_static(gcn.clone(), next, features, &options.retrain)?;
                        m.forward(next, features).map(drop)
                    })?);
                }
            }
            BenchVariant::DyGcn => {
                let params = dygcn
                    .ok_or_else(|| Error::Parameter("dygcn timing needs DyGCN parameters".into()))?;
                let mut z = z0.clone();
                let mut saved = z0.clone();
                for (delta, next) in deltas.iter().zip(&sequence[1..]) {
                    let mut best = f64::INFINITY;
                    for r in 0..options.repeats.max(1) {
                        let start = Instant::now();
                        let sets = dygcn::dygcn_step_in_place(&mut z, next, delta, params)?;
                        best = best.min(start.elapsed().as_secs_f64());
                        // Undo only the touched rows so repeats see the same
                        // input without a full copy evicting the cache.
                        for &v in sets.orders().iter().flatten() {
                            if r + 1 < options.repeats.max(1) {
                                z.row_mut(v).copy_from_slice(saved.row(v));
                            } else {
                                saved.row_mut(v).copy_from_slice(z.row(v));
                            }
                        }
                    }
                    times.push(best);
                }
            }
            BenchVariant::Spectral => {
                let params = spectral
                    .ok_or_else(|| Error::Parameter("spectral timing needs spectral parameters".into()))?;
                let mut z = z0.clone();
                for (delta, next) in deltas.iter().zip(&sequence[1..]) {
                    let mut out = None;
                    let t = min_time(options.repeats, || {
                        out = Some(spectral::spectral_step_with_delta(next, delta, &z, params)?);
                        Ok(())
                    })?;
                    z = out.unwrap();
                    times.push(t);
                }
            }
        }
        records.push(TimingRecord::new(variant.name(), times));
    }
    Ok(BenchReport { records, steps })
}

/// Ordinary least squares `y ≈ slope · x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Evaluation("linear fit needs at least two (x, y) points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Evaluation("linear fit with constant x".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

// ---------------------------------------------------------------- sweep

/// One trained configuration of a sweep.
#[derive(Clone, Debug)]
pub struct SweepSetting {
    /// Swept parameter name, `K` or `d`.
    pub parameter: String,
    pub value: usize,
    pub gcn: GcnModel,
    pub params: VariantParams,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub parameter: String,
    pub value: usize,
    pub mean_auc: f64,
    pub mean_step_seconds: f64,
    /// Rows rewritten by each held-out step.
    pub updated_nodes: Vec<usize>,
}

/// Held-out AUC and per-step update time of each setting. Steps start from
/// the base-GCN embedding of their snapshot; timing keeps the minimum of
/// `repeats` runs.
pub fn sweep(
    settings: &[SweepSetting],
    sequence: &[GraphSnapshot],
    features: &FeatureMatrix,
    train_len: usize,
    seed: u64,
    repeats: usize,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(settings.len());
    for s in settings {
        let heldout =
            heldout_link_prediction(&s.gcn, features, &s.params, sequence, train_len, seed, false)?;
        let mean_auc = heldout.iter().map(|(_, r)| r.auc).sum::<f64>() / heldout.len() as f64;
        let mut times = Vec::new();
        let mut updated = Vec::new();
        for t in train_len.saturating_sub(1)..sequence.len() - 1 {
            let z_t = s.gcn.forward(&sequence[t], features)?;
            let delta = compute_delta(&sequence[t], &sequence[t + 1])?;
            let next = &sequence[t + 1];
            let mut best = f64::INFINITY;
            let mut count = next.n_slots();
            for _ in 0..repeats.max(1) {
                let mut work = z_t.clone();
                let start = Instant::now();
                match &s.params {
                    VariantParams::DyGcn(p) => {
                        count = dygcn::dygcn_step_in_place(&mut work, next, &delta, p)?.total();
                    }
                    VariantParams::Spectral(p) => {
                        spectral::spectral_step_with_delta(next, &delta, &work, p)?;
                    }
                }
                best = best.min(start.elapsed().as_secs_f64());
            }
            times.push(best);
            updated.push(count);
        }
        rows.push(SweepRow {
            parameter: s.parameter.clone(),
            value: s.value,
            mean_auc,
            mean_step_seconds: times.iter().sum::<f64>() / times.len().max(1) as f64,
            updated_nodes: updated,
        });
    }
    Ok(rows)
}

pub fn format_sweep(rows: &[SweepRow]) -> String {
    let mut s = String::from("parameter,value,mean_auc,mean_step_seconds,mean_updated_nodes\n");
    for r in rows {
        let mean_updated =
            r.updated_nodes.iter().sum::<usize>() as f64 / r.updated_nodes.len().max(1) as f64;
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.parameter, r.value, r.mean_auc, r.mean_step_seconds, mean_updated
        ));
    }
    s
}
