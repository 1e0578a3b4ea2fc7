//! Unsupervised training of the static base GCN and of the update
//! matrices, with analytic gradients and a finite-difference gate.

use std::fmt;
use std::str::FromStr;

use crate::dygcn::{self, DyGcnParams};
use crate::error::{Error, Result};
use crate::gcn::GcnModel;
use crate::graph::{compute_delta, FeatureKind, FeatureMatrix, GraphDelta, GraphSnapshot};
use crate::linalg::{Activation, EmbeddingMatrix, Matrix};
use crate::loss::{loss_and_grad, unsupervised_loss, NegativeSamples};
use crate::rng::{self, StreamRng};
use crate::spectral::{self, SpectralParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    DyGcn,
    Spectral,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::DyGcn => "dygcn",
            Variant::Spectral => "spectral",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dygcn" => Ok(Variant::DyGcn),
            "spectral" => Ok(Variant::Spectral),
            other => Err(Error::Parameter(format!("unknown variant '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sgd" => Ok(OptimizerKind::Sgd),
            "adam" => Ok(OptimizerKind::Adam),
            other => Err(Error::Parameter(format!("unknown optimizer '{other}'"))),
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Adam => "adam",
        })
    }
}

/// Starting point of the update matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitScheme {
    /// Every matrix Glorot-uniform.
    Glorot,
    /// `W_0 = I`, other matrices (including `W_s`) zero: the first step
    /// leaves embeddings unchanged under identity activation.
    Identity,
}

impl FromStr for InitScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "glorot" => Ok(InitScheme::Glorot),
            "identity" => Ok(InitScheme::Identity),
            other => Err(Error::Parameter(format!("unknown init scheme '{other}'"))),
        }
    }
}

impl fmt::Display for InitScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitScheme::Glorot => "glorot",
            InitScheme::Identity => "identity",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub negatives_per_positive: usize,
    pub seed: u64,
    pub optimizer: OptimizerKind,
    pub base_dim: usize,
    pub max_order: usize,
    pub variant: Variant,
    /// Activation of the update layers.
    pub activation: Activation,
    pub features: FeatureKind,
    pub init: InitScheme,
    /// Epochs for the static base GCN on snapshot 0.
    pub static_epochs: usize,
    pub static_learning_rate: f64,
    /// Draw fresh negatives every epoch instead of once per snapshot.
    pub resample_negatives: bool,
    /// Run the finite-difference gate on the first training pair.
    pub grad_check: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            epochs: 50,
            negatives_per_positive: 1,
            seed: 0,
            optimizer: OptimizerKind::Adam,
            base_dim: 32,
            max_order: 2,
            variant: Variant::DyGcn,
            activation: Activation::Tanh,
            features: FeatureKind::Degree,
            init: InitScheme::Glorot,
            static_epochs: 50,
            static_learning_rate: 1e-3,
            resample_negatives: true,
            grad_check: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, lr) in [
            ("learning_rate", self.learning_rate),
            ("static_learning_rate", self.static_learning_rate),
        ] {
            if !lr.is_finite() || lr < 0.0 {
                return Err(Error::Config(format!("{name} must be a non-negative finite number")));
            }
        }
        if self.negatives_per_positive < 1 {
            return Err(Error::Config("negatives_per_positive must be at least 1".into()));
        }
        if self.base_dim < 1 {
            return Err(Error::Config("base_dim must be at least 1".into()));
        }
        if self.max_order < 1 || self.max_order > crate::graph::MAX_ORDER {
            return Err(Error::Config("max_order must be in 1..=255".into()));
        }
        Ok(())
    }
}

/// Trained update matrices of either variant.
#[derive(Clone, Debug, PartialEq)]
pub enum VariantParams {
    DyGcn(DyGcnParams),
    Spectral(SpectralParams),
}

impl VariantParams {
    pub fn init(config: &TrainConfig, rng: &mut StreamRng) -> Self {
        let d = config.base_dim;
        let (base, ws) = match config.init {
            InitScheme::Glorot => (
                DyGcnParams::glorot(d, config.max_order, config.activation, rng),
                rng::glorot_uniform(d, d, rng),
            ),
            InitScheme::Identity => (
                DyGcnParams {
                    w0: Matrix::identity(d),
                    wk: vec![Matrix::zeros(d, d); config.max_order],
                    activation: config.activation,
                },
                Matrix::zeros(d, d),
            ),
        };
        match config.variant {
            Variant::DyGcn => VariantParams::DyGcn(base),
            Variant::Spectral => VariantParams::Spectral(SpectralParams { base, ws }),
        }
    }

    pub fn variant(&self) -> Variant {
        match self {
            VariantParams::DyGcn(_) => Variant::DyGcn,
            VariantParams::Spectral(_) => Variant::Spectral,
        }
    }

    pub fn base(&self) -> &DyGcnParams {
        match self {
            VariantParams::DyGcn(p) => p,
            VariantParams::Spectral(p) => &p.base,
        }
    }

    pub fn dim(&self) -> usize {
        self.base().dim()
    }

    /// `W_0, W_1 … W_K[, W_s]`
    pub fn matrices(&self) -> Vec<&Matrix> {
        let base = self.base();
        let mut out: Vec<&Matrix> = std::iter::once(&base.w0).chain(&base.wk).collect();
        if let VariantParams::Spectral(p) = self {
            out.push(&p.ws);
        }
        out
    }

    pub fn matrices_mut(&mut self) -> Vec<&mut Matrix> {
        let (base, ws) = match self {
            VariantParams::DyGcn(p) => (p, None),
            VariantParams::Spectral(p) => (&mut p.base, Some(&mut p.ws)),
        };
        let mut out: Vec<&mut Matrix> = std::iter::once(&mut base.w0).chain(&mut base.wk).collect();
        out.extend(ws);
        out
    }

    /// One forward step of this variant.
    pub fn step(
        &self,
        next: &GraphSnapshot,
        delta: &GraphDelta,
        z_t: &EmbeddingMatrix,
    ) -> Result<EmbeddingMatrix> {
        match self {
            VariantParams::DyGcn(p) => dygcn::dygcn_step_with_delta(next, delta, z_t, p),
            VariantParams::Spectral(p) => spectral::spectral_step_with_delta(next, delta, z_t, p),
        }
    }

    /// Advances `z` by one step; DyGCN rewrites only influenced rows.
    pub fn step_in_place(
        &self,
        z: &mut EmbeddingMatrix,
        next: &GraphSnapshot,
        delta: &GraphDelta,
    ) -> Result<()> {
        match self {
            VariantParams::DyGcn(p) => dygcn::dygcn_step_in_place(z, next, delta, p).map(|_| ()),
            VariantParams::Spectral(p) => {
                *z = spectral::spectral_step_with_delta(next, delta, z, p)?;
                Ok(())
            }
        }
    }
}

/// Gradients in [`VariantParams::matrices`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamGrads {
    pub matrices: Vec<Matrix>,
}

impl ParamGrads {
    pub fn norm(&self) -> f64 {
        self.matrices
            .iter()
            .map(|m| m.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Loss on `next` of the step output, and its gradient with respect to every
/// transformation matrix.
pub fn loss_gradients(
    z_t: &EmbeddingMatrix,
    prev: &GraphSnapshot,
    next: &GraphSnapshot,
    params: &VariantParams,
    negatives: &NegativeSamples,
) -> Result<(f64, ParamGrads)> {
    let delta = compute_delta(prev, next)?;
    loss_gradients_with_delta(z_t, next, &delta, params, negatives)
}

pub fn loss_gradients_with_delta(
    z_t: &EmbeddingMatrix,
    next: &GraphSnapshot,
    delta: &GraphDelta,
    params: &VariantParams,
    negatives: &NegativeSamples,
) -> Result<(f64, ParamGrads)> {
    match params {
        VariantParams::DyGcn(p) => {
            let trace = dygcn::step_trace(next, delta, z_t, p)?;
            let mut out = z_t.clone();
            trace.write_into(&mut out);
            let (loss, g) = loss_and_grad(&out, next, negatives)?;
            let grads = dygcn::backward(&trace, next, p, &g)?;
            let matrices = std::iter::once(grads.w0).chain(grads.wk).collect();
            Ok((loss, ParamGrads { matrices }))
        }
        VariantParams::Spectral(p) => {
            let trace = spectral::spectral_trace(next, delta, z_t, p)?;
            let (loss, g) = loss_and_grad(&trace.output, next, negatives)?;
            let grads = spectral::spectral_backward(&trace, next, p, &g)?;
            let d = p.dim();
            let mut matrices = vec![grads.base.w0];
            matrices.extend(grads.base.wk);
            // W_2 … W_K are not on the spectral forward path.
            matrices.extend((1..p.base.max_order()).map(|_| Matrix::zeros(d, d)));
            matrices.push(grads.ws);
            Ok((loss, ParamGrads { matrices }))
        }
    }
}

/// Loss of the step output without gradients.
pub fn step_loss(
    z_t: &EmbeddingMatrix,
    next: &GraphSnapshot,
    delta: &GraphDelta,
    params: &VariantParams,
    negatives: &NegativeSamples,
) -> Result<f64> {
    let out = params.step(next, delta, z_t)?;
    unsupervised_loss(&out, next, negatives)
}

/// Stateful first-order optimiser over a fixed list of matrices.
#[derive(Clone, Debug)]
pub struct Optimizer {
    kind: OptimizerKind,
    lr: f64,
    m: Vec<Matrix>,
    v: Vec<Matrix>,
    t: i32,
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

impl Optimizer {
    pub fn new(kind: OptimizerKind, lr: f64, shapes: &[&Matrix]) -> Self {
        let zeros: Vec<Matrix> = shapes.iter().map(|m| Matrix::zeros(m.rows(), m.cols())).collect();
        Self {
            kind,
            lr,
            m: zeros.clone(),
            v: zeros,
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [&mut Matrix], grads: &[Matrix]) {
        debug_assert_eq!(params.len(), grads.len());
        self.t += 1;
        let lr = self.lr;
        match self.kind {
            OptimizerKind::Sgd => {
                for (p, g) in params.iter_mut().zip(grads) {
                    for (pi, gi) in p.as_mut_slice().iter_mut().zip(g.as_slice()) {
                        *pi -= lr * gi;
                    }
                }
            }
            OptimizerKind::Adam => {
                let c1 = 1.0 - ADAM_BETA1.powi(self.t);
                let c2 = 1.0 - ADAM_BETA2.powi(self.t);
                for ((p, g), (m, v)) in params
                    .iter_mut()
                    .zip(grads)
                    .zip(self.m.iter_mut().zip(self.v.iter_mut()))
                {
                    let p = p.as_mut_slice();
                    let (m, v) = (m.as_mut_slice(), v.as_mut_slice());
                    for (i, &gi) in g.as_slice().iter().enumerate() {
                        m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * gi;
                        v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * gi * gi;
                        let mhat = m[i] / c1;
                        let vhat = v[i] / c2;
                        p[i] -= lr * mhat / (vhat.sqrt() + ADAM_EPS);
                    }
                }
            }
        }
    }
}

/// Per-epoch training losses.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LossReport {
    /// Summed step loss over all training pairs, per epoch.
    pub per_epoch_loss: Vec<f64>,
    pub final_grad_norm: f64,
    /// Base GCN loss on snapshot 0, per epoch.
    pub static_per_epoch_loss: Vec<f64>,
    /// Worst relative error of the finite-difference gate, when it ran.
    pub grad_check_max_rel_error: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct TrainOutput {
    pub params: VariantParams,
    pub gcn: GcnModel,
    pub report: LossReport,
}

/// Outcome of comparing analytic gradients with central differences.
#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckReport {
    pub checked: usize,
    /// max over checked entries of `|analytic − fd| / (|fd| + 1e-8)`
    pub max_rel_error: f64,
}

pub const GRAD_CHECK_STEP: f64 = 1e-5;
pub const GRAD_CHECK_TOLERANCE: f64 = 1e-4;

/// Central-difference check of [`loss_gradients_with_delta`]. With
/// `max_per_matrix = Some(m)` only `m` evenly spaced entries per matrix are
/// perturbed.
pub fn finite_difference_check(
    z_t: &EmbeddingMatrix,
    next: &GraphSnapshot,
    delta: &GraphDelta,
    params: &VariantParams,
    negatives: &NegativeSamples,
    max_per_matrix: Option<usize>,
) -> Result<GradCheckReport> {
    let (_, grads) = loss_gradients_with_delta(z_t, next, delta, params, negatives)?;
    let mut work = params.clone();
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for (mi, analytic) in grads.matrices.iter().enumerate() {
        let len = analytic.as_slice().len();
        let stride = match max_per_matrix {
            Some(m) if m > 0 && m < len => len / m,
            _ => 1,
        };
        for idx in (0..len).step_by(stride.max(1)) {
            let orig = work.matrices()[mi].as_slice()[idx];
            work.matrices_mut()[mi].as_mut_slice()[idx] = orig + GRAD_CHECK_STEP;
            let plus = step_loss(z_t, next, delta, &work, negatives)?;
            work.matrices_mut()[mi].as_mut_slice()[idx] = orig - GRAD_CHECK_STEP;
            let minus = step_loss(z_t, next, delta, &work, negatives)?;
            work.matrices_mut()[mi].as_mut_slice()[idx] = orig;
            let fd = (plus - minus) / (2.0 * GRAD_CHECK_STEP);
            let rel = (analytic.as_slice()[idx] - fd).abs() / (fd.abs() + 1e-8);
            worst = worst.max(rel);
            checked += 1;
        }
    }
    Ok(GradCheckReport {
        checked,
        max_rel_error: worst,
    })
}

fn ensure_finite(loss: f64, epoch: usize, stage: &str) -> Result<()> {
    if !loss.is_finite() {
        return Err(Error::Training {
            epoch,
            reason: format!("{stage} loss became {loss}"),
        });
    }
    Ok(())
}

fn numeric_to_training(err: Error, epoch: usize) -> Error {
    match err {
        Error::Numeric(reason) => Error::Training { epoch, reason },
        other => other,
    }
}

/// Trains the base GCN on snapshot 0, then the variant's update matrices
/// over every consecutive pair of `sequence`. Deterministic given the seed.
pub fn train(
    sequence: &[GraphSnapshot],
    features: &FeatureMatrix,
    config: &TrainConfig,
) -> Result<TrainOutput> {
    config.validate()?;
    if sequence.len() < 2 {
        return Err(Error::Parameter("training needs at least two snapshots".into()));
    }
    let gcn = {
        let mut rng = rng::stream(config.seed, "init/gcn");
        GcnModel::default_architecture(features.cols(), config.base_dim, &mut rng)
    };
    let (gcn, static_losses) = train_static(gcn, &sequence[0], features, config)?;

    let starts: Vec<EmbeddingMatrix> = sequence[..sequence.len() - 1]
        .iter()
        .map(|s| gcn.forward(s, features))
        .collect::<Result<_>>()?;
    let deltas: Vec<GraphDelta> = sequence
        .windows(2)
        .map(|w| compute_delta(&w[0], &w[1]))
        .collect::<Result<_>>()?;

    let mut params = {
        let mut rng = rng::stream(config.seed, "init/update");
        VariantParams::init(config, &mut rng)
    };
    let mut neg_rng = rng::stream(config.seed, "negatives/update");
    let q = config.negatives_per_positive;
    let mut negatives: Vec<NegativeSamples> = sequence[1..]
        .iter()
        .map(|s| NegativeSamples::sample(s, q, &mut neg_rng))
        .collect::<Result<_>>()?;

    let mut report = LossReport {
        static_per_epoch_loss: static_losses,
        ..Default::default()
    };

    if config.grad_check {
        let check = finite_difference_check(
            &starts[0],
            &sequence[1],
            &deltas[0],
            &params,
            &negatives[0],
            Some(16),
        )?;
        // Negated so a NaN error also fails.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(check.max_rel_error < GRAD_CHECK_TOLERANCE) {
            return Err(Error::Numeric(format!(
                "gradient check failed: relative error {:.3e} over {} entries",
                check.max_rel_error, check.checked
            )));
        }
        report.grad_check_max_rel_error = Some(check.max_rel_error);
    }

    let mut opt = Optimizer::new(config.optimizer, config.learning_rate, &params.matrices());
    for epoch in 0..config.epochs {
        if config.resample_negatives && epoch > 0 {
            for (negs, snap) in negatives.iter_mut().zip(&sequence[1..]) {
                *negs = NegativeSamples::sample(snap, q, &mut neg_rng)?;
            }
        }
        let mut epoch_loss = 0.0;
        for i in 0..deltas.len() {
            let (loss, grads) = loss_gradients_with_delta(
                &starts[i],
                &sequence[i + 1],
                &deltas[i],
                &params,
                &negatives[i],
            )
            .map_err(|e| numeric_to_training(e, epoch))?;
            ensure_finite(loss, epoch, "update")?;
            epoch_loss += loss;
            report.final_grad_norm = grads.norm();
            opt.step(&mut params.matrices_mut(), &grads.matrices);
        }
        ensure_finite(epoch_loss, epoch, "update")?;
        report.per_epoch_loss.push(epoch_loss);
    }
    Ok(TrainOutput {
        params,
        gcn,
        report,
    })
}

/// Fits the base GCN to snapshot 0 with the structure-preserving loss.
pub fn train_static(
    mut gcn: GcnModel,
    snap: &GraphSnapshot,
    features: &FeatureMatrix,
    config: &TrainConfig,
) -> Result<(GcnModel, Vec<f64>)> {
    let mut rng = rng::stream(config.seed, "negatives/static");
    let q = config.negatives_per_positive;
    let mut negatives = NegativeSamples::sample(snap, q, &mut rng)?;
    let weights: Vec<&Matrix> = gcn.layers.iter().map(|l| &l.weight).collect();
    let mut opt = Optimizer::new(config.optimizer, config.static_learning_rate, &weights);
    let mut losses = Vec::with_capacity(config.static_epochs);
    for epoch in 0..config.static_epochs {
        if config.resample_negatives && epoch > 0 {
            negatives = NegativeSamples::sample(snap, q, &mut rng)?;
        }
        let (loss, grads) = gcn
            .forward_backward(snap, features, |z| loss_and_grad(z, snap, &negatives))
            .map_err(|e| numeric_to_training(e, epoch))?;
        ensure_finite(loss, epoch, "static GCN")?;
        losses.push(loss);
        let mut weights: Vec<&mut Matrix> = gcn.layers.iter_mut().map(|l| &mut l.weight).collect();
        opt.step(&mut weights, &grads);
    }
    Ok((gcn, losses))
}

/// Base-GCN embeddings for each snapshot.
pub fn static_embeddings(
    gcn: &GcnModel,
    sequence: &[GraphSnapshot],
    features: &FeatureMatrix,
) -> Result<Vec<EmbeddingMatrix>> {
    sequence.iter().map(|s| gcn.forward(s, features)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSnapshot;

    fn small_sequence() -> Vec<GraphSnapshot> {
        let a = GraphSnapshot::from_edges(6, 0, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let b = GraphSnapshot::from_edges(6, 1, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 5), (1, 4)])
            .unwrap();
        vec![a, b]
    }

    #[test]
    fn zero_learning_rate_keeps_params() {
        let seq = small_sequence();
        let features = FeatureMatrix::degree(&seq[0]);
        let config = TrainConfig {
            learning_rate: 0.0,
            static_learning_rate: 0.0,
            epochs: 4,
            static_epochs: 2,
            base_dim: 4,
            resample_negatives: false,
            ..Default::default()
        };
        let out = train(&seq, &features, &config).unwrap();
        let init = VariantParams::init(&config, &mut rng::stream(config.seed, "init/update"));
        assert_eq!(out.params, init);
        let first = out.report.per_epoch_loss[0];
        assert!(out.report.per_epoch_loss.iter().all(|&l| l == first));
    }

    #[test]
    fn zero_epochs_returns_initialisation() {
        let seq = small_sequence();
        let features = FeatureMatrix::degree(&seq[0]);
        let config = TrainConfig {
            epochs: 0,
            base_dim: 3,
            variant: Variant::Spectral,
            ..Default::default()
        };
        let out = train(&seq, &features, &config).unwrap();
        let init = VariantParams::init(&config, &mut rng::stream(config.seed, "init/update"));
        assert_eq!(out.params, init);
        assert!(out.report.per_epoch_loss.is_empty());
    }

    #[test]
    fn same_seed_same_trajectory() {
        let seq = small_sequence();
        let features = FeatureMatrix::degree(&seq[0]);
        let config = TrainConfig {
            epochs: 3,
            static_epochs: 3,
            base_dim: 4,
            learning_rate: 0.01,
            seed: 11,
            ..Default::default()
        };
        let a = train(&seq, &features, &config).unwrap();
        let b = train(&seq, &features, &config).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.report, b.report);
    }

    #[test]
    fn rejects_bad_config() {
        let seq = small_sequence();
        let features = FeatureMatrix::degree(&seq[0]);
        let bad = TrainConfig {
            negatives_per_positive: 0,
            ..Default::default()
        };
        assert!(matches!(train(&seq, &features, &bad), Err(Error::Config(_))));
        let bad = TrainConfig {
            learning_rate: -1.0,
            ..Default::default()
        };
        assert!(train(&seq, &features, &bad).is_err());
        assert!(train(&seq[..1], &features, &TrainConfig::default()).is_err());
    }

    #[test]
    fn gradient_gate_passes() {
        let seq = small_sequence();
        let features = FeatureMatrix::degree(&seq[0]);
        for variant in [Variant::DyGcn, Variant::Spectral] {
            let config = TrainConfig {
                epochs: 1,
                static_epochs: 1,
                base_dim: 3,
                grad_check: true,
                variant,
                ..Default::default()
            };
            let out = train(&seq, &features, &config).unwrap();
            assert!(out.report.grad_check_max_rel_error.unwrap() < GRAD_CHECK_TOLERANCE);
        }
    }
}
