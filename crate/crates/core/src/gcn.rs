//! Static graph convolution with `Â = A + I`.
//!
//! Used for the initial embeddings `Z^0`, for the full-recompute baseline
//! and as the starting point of each training step.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, GraphSnapshot, NodeId};
use crate::linalg::{axpy, Activation, EmbeddingMatrix, Matrix, SparseMatrix};
use crate::rng::glorot_uniform;

/// `Â = A + I` as a sparse matrix.
pub fn normalize_adjacency(snap: &GraphSnapshot) -> SparseMatrix {
    let n = snap.n_slots();
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::with_capacity(2 * snap.n_edges() + n);
    indptr.push(0);
    for v in 0..n {
        let nbrs = snap.neighbors(v);
        let split = nbrs.partition_point(|&u| u < v);
        indices.extend_from_slice(&nbrs[..split]);
        indices.push(v);
        indices.extend_from_slice(&nbrs[split..]);
        indptr.push(indices.len());
    }
    let values = vec![1.0; indices.len()];
    SparseMatrix::from_csr(n, indptr, indices, values)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GcnLayerParams {
    pub weight: Matrix,
    pub activation: Activation,
}

impl GcnLayerParams {
    pub fn new(weight: Matrix, activation: Activation) -> Self {
        Self { weight, activation }
    }

    pub fn in_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.cols()
    }
}

/// One graph convolution `σ(Â Z W)`.
pub fn gconv(
    a_hat: &SparseMatrix,
    z: &EmbeddingMatrix,
    layer: &GcnLayerParams,
) -> Result<EmbeddingMatrix> {
    if z.rows() != a_hat.dim() {
        return Err(Error::Shape(format!(
            "Â is {0}x{0} but Z has {1} rows",
            a_hat.dim(),
            z.rows()
        )));
    }
    let projected = z.matmul(&layer.weight)?;
    let mut out = a_hat.mul_dense(&projected)?;
    layer.activation.apply_matrix(&mut out);
    Ok(out)
}

/// `a_v = Σ_{u ∈ N(v) ∪ {v}} z_u`, summed in ascending node order.
pub fn aggregate_node(v: NodeId, snap: &GraphSnapshot, z: &EmbeddingMatrix) -> Result<Vec<f64>> {
    snap.check_node(v)?;
    if z.rows() != snap.n_slots() {
        return Err(Error::Shape("embedding rows differ from slot count".into()));
    }
    let mut acc = vec![0.0; z.cols()];
    let nbrs = snap.neighbors(v);
    let split = nbrs.partition_point(|&u| u < v);
    for &u in &nbrs[..split] {
        axpy(1.0, z.row(u), &mut acc);
    }
    axpy(1.0, z.row(v), &mut acc);
    for &u in &nbrs[split..] {
        axpy(1.0, z.row(u), &mut acc);
    }
    Ok(acc)
}

/// `Z = GCN(A, X)`: the layers applied in sequence.
pub fn gcn_forward(
    snap: &GraphSnapshot,
    features: &FeatureMatrix,
    layers: &[GcnLayerParams],
) -> Result<EmbeddingMatrix> {
    Ok(forward_cached(snap, features, layers)?.output)
}

struct ForwardCache {
    /// Pre-activation `Â H_{l-1} W_l` per layer.
    pre: Vec<Matrix>,
    /// Post-activation output per layer.
    post: Vec<Matrix>,
    output: Matrix,
}

fn check_chain(features: &FeatureMatrix, layers: &[GcnLayerParams], n: usize) -> Result<()> {
    if layers.is_empty() {
        return Err(Error::Parameter("GCN needs at least one layer".into()));
    }
    if features.rows() != n {
        return Err(Error::Shape(format!(
            "feature rows {} differ from slot count {n}",
            features.rows()
        )));
    }
    let mut width = features.cols();
    for (i, layer) in layers.iter().enumerate() {
        if layer.in_dim() != width {
            return Err(Error::Shape(format!(
                "layer {i} expects width {} but receives {width}",
                layer.in_dim()
            )));
        }
        width = layer.out_dim();
    }
    Ok(())
}

fn forward_cached(
    snap: &GraphSnapshot,
    features: &FeatureMatrix,
    layers: &[GcnLayerParams],
) -> Result<ForwardCache> {
    check_chain(features, layers, snap.n_slots())?;
    let a_hat = normalize_adjacency(snap);
    let mut pre = Vec::with_capacity(layers.len());
    let mut post: Vec<Matrix> = Vec::with_capacity(layers.len());
    for (i, layer) in layers.iter().enumerate() {
        let projected = if i == 0 {
            features.project(&layer.weight)?
        } else {
            post[i - 1].matmul(&layer.weight)?
        };
        let p = a_hat.mul_dense(&projected)?;
        let mut h = p.clone();
        layer.activation.apply_matrix(&mut h);
        pre.push(p);
        post.push(h);
    }
    let output = post.last().unwrap().clone();
    Ok(ForwardCache { pre, post, output })
}

/// A stack of graph convolutions producing `d`-dimensional embeddings.
#[derive(Clone, Debug, PartialEq)]
pub struct GcnModel {
    pub layers: Vec<GcnLayerParams>,
}

impl GcnModel {
    /// Two layers of width `dim`, ReLU between them and identity on the
    /// output, Glorot-initialised.
    pub fn default_architecture(in_dim: usize, dim: usize, rng: &mut impl Rng) -> Self {
        Self {
            layers: vec![
                GcnLayerParams::new(glorot_uniform(in_dim, dim, rng), Activation::Relu),
                GcnLayerParams::new(glorot_uniform(dim, dim, rng), Activation::Identity),
            ],
        }
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().map_or(0, GcnLayerParams::out_dim)
    }

    pub fn in_dim(&self) -> usize {
        self.layers.first().map_or(0, GcnLayerParams::in_dim)
    }

    pub fn forward(&self, snap: &GraphSnapshot, features: &FeatureMatrix) -> Result<EmbeddingMatrix> {
        gcn_forward(snap, features, &self.layers)
    }

    /// Output embeddings and the gradient of a scalar loss with respect to
    /// every layer weight, given `loss_grad(Z) -> (L, ∂L/∂Z)`.
    pub fn forward_backward<F>(
        &self,
        snap: &GraphSnapshot,
        features: &FeatureMatrix,
        loss_grad: F,
    ) -> Result<(f64, Vec<Matrix>)>
    where
        F: FnOnce(&Matrix) -> Result<(f64, Matrix)>,
    {
        let cache = forward_cached(snap, features, &self.layers)?;
        let (loss, mut upstream) = loss_grad(&cache.output)?;
        let a_hat = normalize_adjacency(snap);
        let mut grads = vec![Matrix::zeros(0, 0); self.layers.len()];
        for i in (0..self.layers.len()).rev() {
            let layer = &self.layers[i];
            let act = layer.activation;
            for (g, &p) in upstream.as_mut_slice().iter_mut().zip(cache.pre[i].as_slice()) {
                *g *= act.derivative(p);
            }
            // Â is symmetric, so the adjoint of Â· is Â·.
            let d_projected = a_hat.mul_dense(&upstream)?;
            grads[i] = if i == 0 {
                features.transpose_mul(&d_projected)?
            } else {
                cache.post[i - 1].transpose_matmul(&d_projected)?
            };
            if i > 0 {
                upstream = d_projected.matmul_transpose(&layer.weight)?;
            }
        }
        Ok((loss, grads))
    }
}
