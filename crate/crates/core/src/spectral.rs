//! Spectral variant: first-order update of `V_1`, then one global
//! propagation `(I + D^{-1/2} A D^{-1/2}) Z W_s` over the post-change graph.
//!
//! Degrees come from `A` without self-loops. A zero-degree slot has its
//! `D^{-1/2}` entry set to 0, so its Laplacian row is the identity row and
//! its propagated row is `z_v W_s`.

use crate::dygcn::{self, DyGcnGrads, DyGcnParams, StepTrace};
use crate::error::{Error, Result};
use crate::graph::{compute_delta, GraphDelta, GraphSnapshot};
use crate::linalg::{EmbeddingMatrix, Matrix, SparseMatrix};

fn inv_sqrt_degrees(snap: &GraphSnapshot) -> Vec<f64> {
    (0..snap.n_slots())
        .map(|v| match snap.degree(v) {
            0 => 0.0,
            d => 1.0 / (d as f64).sqrt(),
        })
        .collect()
}

/// `I + s · D^{-1/2} A D^{-1/2}` with `s = ±1`.
fn shifted_normalized(snap: &GraphSnapshot, sign: f64) -> SparseMatrix {
    let n = snap.n_slots();
    let inv = inv_sqrt_degrees(snap);
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::with_capacity(2 * snap.n_edges() + n);
    let mut values = Vec::with_capacity(2 * snap.n_edges() + n);
    indptr.push(0);
    for v in 0..n {
        let nbrs = snap.neighbors(v);
        let split = nbrs.partition_point(|&u| u < v);
        for (i, &u) in nbrs.iter().enumerate() {
            if i == split {
                indices.push(v);
                values.push(1.0);
            }
            indices.push(u);
            // Products commute exactly, so (v,u) and (u,v) are bit-equal.
            values.push(sign * (inv[v] * inv[u]));
        }
        if split == nbrs.len() {
            indices.push(v);
            values.push(1.0);
        }
        indptr.push(indices.len());
    }
    SparseMatrix::from_csr(n, indptr, indices, values)
}

/// `L = I − D^{-1/2} A D^{-1/2}`
pub fn normalized_laplacian(snap: &GraphSnapshot) -> SparseMatrix {
    shifted_normalized(snap, -1.0)
}

/// `I + D^{-1/2} A D^{-1/2}`, equal to `2I − L`.
pub fn propagation_matrix(snap: &GraphSnapshot) -> SparseMatrix {
    shifted_normalized(snap, 1.0)
}

/// `(I + D^{-1/2} A D^{-1/2}) Z W_s`
pub fn spectral_propagate(
    snap: &GraphSnapshot,
    z: &EmbeddingMatrix,
    w_s: &Matrix,
) -> Result<EmbeddingMatrix> {
    if z.rows() != snap.n_slots() {
        return Err(Error::Shape(format!(
            "Z has {} rows for {} slots",
            z.rows(),
            snap.n_slots()
        )));
    }
    if w_s.rows() != z.cols() {
        return Err(Error::Shape(format!(
            "W_s is {}x{} but Z has {} columns",
            w_s.rows(),
            w_s.cols(),
            z.cols()
        )));
    }
    propagation_matrix(snap).mul_dense(z)?.matmul(w_s)
}

/// First-order matrices (`W_0`, `W_1`) plus the propagation weight `W_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralParams {
    pub base: DyGcnParams,
    pub ws: Matrix,
}

impl SpectralParams {
    pub fn new(base: DyGcnParams, ws: Matrix) -> Result<Self> {
        let params = Self { base, ws };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        let d = self.base.dim();
        if self.ws.shape() != (d, d) {
            return Err(Error::Shape(format!(
                "W_s is {}x{}, expected {d}x{d}",
                self.ws.rows(),
                self.ws.cols()
            )));
        }
        if !self.ws.is_finite() {
            return Err(Error::Numeric("non-finite W_s".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    fn first_order(&self) -> Result<DyGcnParams> {
        self.base.with_max_order(1)
    }
}

/// Intermediate values of one spectral step.
#[derive(Clone, Debug)]
pub struct SpectralTrace {
    pub first: StepTrace,
    /// `P Z_1` where `Z_1` holds the first-order rows.
    propagated: Matrix,
    pub output: EmbeddingMatrix,
}

pub fn spectral_trace(
    next: &GraphSnapshot,
    delta: &GraphDelta,
    z_t: &EmbeddingMatrix,
    params: &SpectralParams,
) -> Result<SpectralTrace> {
    params.validate()?;
    let first = dygcn::step_trace(next, delta, z_t, &params.first_order()?)?;
    let mut z1 = first.base_embeddings(z_t);
    first.write_into(&mut z1);
    let propagated = propagation_matrix(next).mul_dense(&z1)?;
    let output = propagated.matmul(&params.ws)?;
    Ok(SpectralTrace {
        first,
        propagated,
        output,
    })
}

/// Every row may change: the first-order result is spread over the whole
/// post-change graph.
pub fn spectral_dygcn_step(
    prev: &GraphSnapshot,
    next: &GraphSnapshot,
    z_t: &EmbeddingMatrix,
    params: &SpectralParams,
) -> Result<EmbeddingMatrix> {
    let delta = compute_delta(prev, next)?;
    spectral_step_with_delta(next, &delta, z_t, params)
}

pub fn spectral_step_with_delta(
    next: &GraphSnapshot,
    delta: &GraphDelta,
    z_t: &EmbeddingMatrix,
    params: &SpectralParams,
) -> Result<EmbeddingMatrix> {
    Ok(spectral_trace(next, delta, z_t, params)?.output)
}

/// Gradients of the spectral step.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralGrads {
    /// Only `W_0` and `W_1` are used by the forward path; `wk` has one entry.
    pub base: DyGcnGrads,
    pub ws: Matrix,
}

pub fn spectral_backward(
    trace: &SpectralTrace,
    next: &GraphSnapshot,
    params: &SpectralParams,
    grad_out: &Matrix,
) -> Result<SpectralGrads> {
    if grad_out.shape() != trace.output.shape() {
        return Err(Error::Shape("output gradient shape".into()));
    }
    let ws = trace.propagated.transpose_matmul(grad_out)?;
    // P is symmetric.
    let g_z1 = propagation_matrix(next).mul_dense(&grad_out.matmul_transpose(&params.ws)?)?;
    let base = dygcn::backward(&trace.first, next, &params.first_order()?, &g_z1)?;
    Ok(SpectralGrads { base, ws })
}
