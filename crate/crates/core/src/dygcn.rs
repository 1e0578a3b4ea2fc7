//! Incremental dynamic graph convolution.
//!
//! Given `Z^t` and the edge delta to `t+1`, only the influenced nodes
//! `V_1 ∪ … ∪ V_K` are recomputed:
//!
//! ```text
//! V_1:  z_v' = σ(z_v W_0 + Δa_v W_1),  Δa_v = Σ_gained z_u − Σ_lost z_u
//! V_k:  z_v' = σ(z_v W_0 + Δa_v W_k),  Δa_v = Σ_{u ∈ N⁺(v) ∪ v} (z_u' − z_u)
//! ```
//!
//! Embeddings are row vectors, so transformations multiply on the right.
//! `W_0` is shared across all orders and every `z` on the right-hand side
//! is the frozen pre-step embedding. Nodes that were isolated at `t` and
//! gain edges at `t+1` first have their row replaced by the sum of their
//! new neighbours' embeddings.
//!
//! The production path ([`dygcn_step`], [`dygcn_step_in_place`]) assembles
//! only the influenced rows. [`dygcn_step_matrix`] evaluates the same update
//! with whole-matrix products and masking; it costs `O(N d²)` per order and
//! exists as an independent cross-check.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{
    apply_delta, compute_delta, influence_marker, GraphDelta, GraphSnapshot, InfluenceSets,
    NodeChange, NodeId,
};
use crate::gcn::normalize_adjacency;
use crate::linalg::{
    axpy, outer_acc, vecmat_acc, vecmat_into, vecmat_transpose_into, Activation, EmbeddingMatrix,
    Matrix, SparseMatrix,
};
use crate::rng::glorot_uniform;

/// Levels with at least this many nodes are updated in parallel.
const PAR_LEVEL_THRESHOLD: usize = 512;

/// Transformation matrices `W_0, W_1 … W_K` and the update activation.
#[derive(Clone, Debug, PartialEq)]
pub struct DyGcnParams {
    pub w0: Matrix,
    /// `W_1 … W_K`; `wk[k - 1]` is the order-`k` matrix.
    pub wk: Vec<Matrix>,
    pub activation: Activation,
}

impl DyGcnParams {
    pub fn new(w0: Matrix, wk: Vec<Matrix>, activation: Activation) -> Result<Self> {
        let params = Self { w0, wk, activation };
        params.validate()?;
        Ok(params)
    }

    /// Glorot-uniform initialisation for every matrix.
    pub fn glorot(dim: usize, max_order: usize, activation: Activation, rng: &mut impl Rng) -> Self {
        let w0 = glorot_uniform(dim, dim, rng);
        let wk = (0..max_order).map(|_| glorot_uniform(dim, dim, rng)).collect();
        Self { w0, wk, activation }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.w0.rows();
        if self.w0.cols() != d {
            return Err(Error::Shape(format!(
                "W_0 must be square, got {}x{}",
                d,
                self.w0.cols()
            )));
        }
        if self.wk.is_empty() {
            return Err(Error::Parameter("max order K must be at least 1".into()));
        }
        if self.wk.len() > crate::graph::MAX_ORDER {
            return Err(Error::Parameter("max order K too large".into()));
        }
        for (i, w) in self.wk.iter().enumerate() {
            if w.shape() != (d, d) {
                return Err(Error::Shape(format!(
                    "W_{} is {}x{}, expected {d}x{d}",
                    i + 1,
                    w.rows(),
                    w.cols()
                )));
            }
        }
        if !self.w0.is_finite() || self.wk.iter().any(|w| !w.is_finite()) {
            return Err(Error::Numeric("non-finite transformation matrix".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.w0.rows()
    }

    pub fn max_order(&self) -> usize {
        self.wk.len()
    }

    /// `W_k` for `k ≥ 1`.
    pub fn w(&self, k: usize) -> &Matrix {
        &self.wk[k - 1]
    }

    /// Same matrices with the order truncated to `k`.
    pub fn with_max_order(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.wk.len() {
            return Err(Error::Parameter(format!(
                "cannot take order {k} from parameters with K={}",
                self.wk.len()
            )));
        }
        Ok(Self {
            w0: self.w0.clone(),
            wk: self.wk[..k].to_vec(),
            activation: self.activation,
        })
    }
}

fn check_embedding(z: &EmbeddingMatrix, n_slots: usize, dim: usize) -> Result<()> {
    if z.rows() != n_slots || z.cols() != dim {
        return Err(Error::Shape(format!(
            "embeddings are {}x{}, expected {n_slots}x{dim}",
            z.rows(),
            z.cols()
        )));
    }
    Ok(())
}

fn check_pair(prev: &GraphSnapshot, next: &GraphSnapshot) -> Result<GraphDelta> {
    compute_delta(prev, next)
}

fn check_step_inputs(
    next: &GraphSnapshot,
    delta: &GraphDelta,
    z: &EmbeddingMatrix,
    params: &DyGcnParams,
) -> Result<()> {
    params.validate()?;
    check_embedding(z, next.n_slots(), params.dim())?;
    if delta.to_time() != next.time_index() {
        return Err(Error::Ordering {
            expected: delta.to_time(),
            found: next.time_index(),
        });
    }
    Ok(())
}

/// `Δa_v = Σ_{u ∈ N^{t+1}(v)∪v} z_u − Σ_{u ∈ N^t(v)∪v} z_u`, evaluated as
/// gained-neighbour sum minus lost-neighbour sum.
pub fn first_order_delta_agg(
    v: NodeId,
    z_t: &EmbeddingMatrix,
    prev: &GraphSnapshot,
    next: &GraphSnapshot,
) -> Result<Vec<f64>> {
    prev.check_node(v)?;
    next.check_node(v)?;
    if prev.n_slots() != next.n_slots() || z_t.rows() != next.n_slots() {
        return Err(Error::Shape("snapshots and embeddings disagree on slot count".into()));
    }
    let (old, new) = (prev.neighbors(v), next.neighbors(v));
    let mut gained = Vec::new();
    let mut lost = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < old.len() || j < new.len() {
        if j == new.len() || (i < old.len() && old[i] < new[j]) {
            lost.push(old[i]);
            i += 1;
        } else if i == old.len() || new[j] < old[i] {
            gained.push(new[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    let mut acc = vec![0.0; z_t.cols()];
    gained_minus_lost(&gained, &lost, |u| z_t.row(u), &mut acc);
    Ok(acc)
}

fn gained_minus_lost<'a>(
    gained: &[NodeId],
    lost: &[NodeId],
    row: impl Fn(NodeId) -> &'a [f64],
    acc: &mut [f64],
) {
    for &u in gained {
        axpy(1.0, row(u), acc);
    }
    for &u in lost {
        axpy(-1.0, row(u), acc);
    }
}

/// `σ(z_v W_0 + Δa_v W_1)`
pub fn first_order_update(z_v: &[f64], delta_agg: &[f64], params: &DyGcnParams) -> Result<Vec<f64>> {
    order_update(z_v, delta_agg, params, 1)
}

/// `σ(z_v W_0 + Δa_v W_k)`
pub fn order_update(
    z_v: &[f64],
    delta_agg: &[f64],
    params: &DyGcnParams,
    k: usize,
) -> Result<Vec<f64>> {
    let d = params.dim();
    if z_v.len() != d || delta_agg.len() != d {
        return Err(Error::Shape(format!(
            "update vectors of length {} and {} for dimension {d}",
            z_v.len(),
            delta_agg.len()
        )));
    }
    if k == 0 || k > params.max_order() {
        return Err(Error::Parameter(format!("order {k} outside 1..={}", params.max_order())));
    }
    let mut out = vec![0.0; d];
    vecmat_into(z_v, &params.w0, &mut out);
    vecmat_acc(delta_agg, params.w(k), &mut out);
    params.activation.apply_slice(&mut out);
    Ok(out)
}

/// `Δa_v = Σ_{u ∈ N^{t+1}(v)∪v} (z_u^{partial} − z_u^t)`
pub fn high_order_delta_agg(
    v: NodeId,
    next: &GraphSnapshot,
    z_t: &EmbeddingMatrix,
    z_partial: &EmbeddingMatrix,
) -> Result<Vec<f64>> {
    next.check_node(v)?;
    if z_t.shape() != z_partial.shape() || z_t.rows() != next.n_slots() {
        return Err(Error::Shape("embedding matrices disagree".into()));
    }
    let mut acc = vec![0.0; z_t.cols()];
    for_closed_neighborhood(next, v, |u| {
        for ((a, p), t) in acc.iter_mut().zip(z_partial.row(u)).zip(z_t.row(u)) {
            *a += p - t;
        }
    });
    Ok(acc)
}

/// Visits `N(v) ∪ {v}` in ascending order.
fn for_closed_neighborhood(snap: &GraphSnapshot, v: NodeId, mut f: impl FnMut(NodeId)) {
    let nbrs = snap.neighbors(v);
    let split = nbrs.partition_point(|&u| u < v);
    nbrs[..split].iter().for_each(|&u| f(u));
    f(v);
    nbrs[split..].iter().for_each(|&u| f(u));
}

/// Initial row for a node that gains its first edges: `Σ_{u ∈ N^{t+1}(v)} z_u^t`.
/// A node still isolated at `t+1` gets the zero vector.
pub fn init_new_node(v: NodeId, next: &GraphSnapshot, z_t: &EmbeddingMatrix) -> Result<Vec<f64>> {
    next.check_node(v)?;
    let mut acc = vec![0.0; z_t.cols()];
    for &u in next.neighbors(v) {
        axpy(1.0, z_t.row(u), &mut acc);
    }
    Ok(acc)
}

/// Record of one incremental step: which rows changed, with the inputs
/// and pre-activations needed to backpropagate through it.
#[derive(Clone, Debug)]
pub struct StepTrace {
    pub sets: InfluenceSets,
    /// Nodes that were isolated before the step and received an initial row.
    pub new_nodes: Vec<NodeId>,
    dim: usize,
    /// Updated nodes in level order: `V_1`, then `V_2`, ...
    nodes: Vec<NodeId>,
    level_start: Vec<usize>,
    /// `pos[v] = 1 + index into nodes`, 0 for untouched slots.
    pos: Vec<u32>,
    marker: Vec<u8>,
    /// Pre-step rows (after new-node initialisation) of updated nodes.
    base: Vec<f64>,
    delta_agg: Vec<f64>,
    pre: Vec<f64>,
    out: Vec<f64>,
}

impl StepTrace {
    pub fn updated_nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn updated_count(&self) -> usize {
        self.nodes.len()
    }

    fn index_of(&self, v: NodeId) -> Option<usize> {
        match self.pos[v] {
            0 => None,
            p => Some(p as usize - 1),
        }
    }

    fn span(&self, i: usize) -> std::ops::Range<usize> {
        i * self.dim..(i + 1) * self.dim
    }

    /// Updated row of node `nodes[i]`.
    pub fn output_row(&self, i: usize) -> &[f64] {
        &self.out[self.span(i)]
    }

    /// Frozen pre-step row of node `nodes[i]`.
    pub fn base_row(&self, i: usize) -> &[f64] {
        &self.base[self.span(i)]
    }

    /// Order of a slot, 0 when untouched.
    pub fn order_of(&self, v: NodeId) -> usize {
        self.marker[v] as usize
    }

    /// Writes every updated row into `z`.
    pub fn write_into(&self, z: &mut EmbeddingMatrix) {
        for (i, &v) in self.nodes.iter().enumerate() {
            z.row_mut(v).copy_from_slice(self.output_row(i));
        }
    }

    /// `Z'`: the frozen pre-step embeddings with new-node rows initialised.
    pub fn base_embeddings(&self, z_t: &EmbeddingMatrix) -> EmbeddingMatrix {
        let mut z = z_t.clone();
        for &v in &self.new_nodes {
            let i = self.index_of(v).unwrap();
            z.row_mut(v).copy_from_slice(self.base_row(i));
        }
        z
    }
}

/// Runs the incremental update over `next` and returns its trace without
/// touching `z_t`. Only the influenced rows are ever computed.
pub fn step_trace(
    next: &GraphSnapshot,
    delta: &GraphDelta,
    z_t: &EmbeddingMatrix,
    params: &DyGcnParams,
) -> Result<StepTrace> {
    check_step_inputs(next, delta, z_t, params)?;
    let d = params.dim();
    let max_order = params.max_order();
    let (sets, marker) = influence_marker(next, delta, max_order)?;
    let changes = delta.node_changes();

    let mut nodes = Vec::with_capacity(sets.total());
    let mut level_start = Vec::with_capacity(max_order + 1);
    for set in sets.orders() {
        level_start.push(nodes.len());
        nodes.extend_from_slice(set);
    }
    level_start.push(nodes.len());

    let mut pos = vec![0u32; next.n_slots()];
    for (i, &v) in nodes.iter().enumerate() {
        pos[v] = i as u32 + 1;
    }

    let total = nodes.len();
    let mut base = vec![0.0; total * d];
    for (i, &v) in nodes.iter().enumerate() {
        base[i * d..(i + 1) * d].copy_from_slice(z_t.row(v));
    }

    // V_1 is sorted and `changes` lists exactly its nodes in the same order.
    debug_assert_eq!(changes.len(), sets.order(1).len());
    let mut new_nodes = Vec::new();
    for (i, change) in changes.iter().enumerate() {
        let v = change.node;
        let prev_degree = next.degree(v) + change.lost.len() - change.gained.len();
        if prev_degree == 0 && next.degree(v) > 0 {
            let row = &mut base[i * d..(i + 1) * d];
            row.fill(0.0);
            for &u in next.neighbors(v) {
                axpy(1.0, z_t.row(u), row);
            }
            new_nodes.push(v);
        }
    }

    let mut trace = StepTrace {
        sets,
        new_nodes,
        dim: d,
        nodes,
        level_start,
        pos,
        marker,
        base,
        delta_agg: vec![0.0; total * d],
        pre: vec![0.0; total * d],
        out: vec![0.0; total * d],
    };

    first_level(&mut trace, &changes, z_t, params);
    for k in 2..=max_order {
        higher_level(&mut trace, next, params, k);
    }
    Ok(trace)
}

fn first_level(trace: &mut StepTrace, changes: &[NodeChange], z_t: &Matrix, params: &DyGcnParams) {
    let d = trace.dim;
    let count = trace.level_start[1];
    let mut delta_agg = std::mem::take(&mut trace.delta_agg);
    {
        let t = &*trace;
        let row = |u: NodeId| match t.index_of(u) {
            Some(j) => &t.base[j * d..(j + 1) * d],
            None => z_t.row(u),
        };
        for (change, acc) in changes.iter().take(count).zip(delta_agg.chunks_mut(d)) {
            gained_minus_lost(&change.gained, &change.lost, row, acc);
        }
    }
    trace.delta_agg = delta_agg;
    update_rows(trace, params, 1);
}

fn higher_level(trace: &mut StepTrace, next: &GraphSnapshot, params: &DyGcnParams, k: usize) {
    let d = trace.dim;
    let (start, end) = (trace.level_start[k - 1], trace.level_start[k]);
    let mut delta_agg = std::mem::take(&mut trace.delta_agg);
    {
        let t = &*trace;
        let kernel = |(off, acc): (usize, &mut [f64])| {
            let v = t.nodes[start + off];
            for_closed_neighborhood(next, v, |u| {
                let order = t.marker[u] as usize;
                if order != 0 && order < k {
                    let j = t.index_of(u).unwrap();
                    let (new, old) = (&t.out[j * d..(j + 1) * d], &t.base[j * d..(j + 1) * d]);
                    for ((a, n), o) in acc.iter_mut().zip(new).zip(old) {
                        *a += n - o;
                    }
                }
            });
        };
        let level = &mut delta_agg[start * d..end * d];
        if end - start >= PAR_LEVEL_THRESHOLD {
            level.par_chunks_mut(d).enumerate().for_each(kernel);
        } else {
            level.chunks_mut(d).enumerate().for_each(kernel);
        }
    }
    trace.delta_agg = delta_agg;
    update_rows(trace, params, k);
}

/// `pre = base W_0 + Δa W_k`, `out = σ(pre)` for every node of level `k`.
fn update_rows(trace: &mut StepTrace, params: &DyGcnParams, k: usize) {
    let d = trace.dim;
    let (start, end) = (trace.level_start[k - 1], trace.level_start[k]);
    if start == end {
        return;
    }
    let w0 = &params.w0;
    let wk = params.w(k);
    let act = params.activation;
    let span = start * d..end * d;
    let base = &trace.base[span.clone()];
    let agg = &trace.delta_agg[span.clone()];
    let pre = &mut trace.pre[span.clone()];
    let out = &mut trace.out[span];
    type Rows<'a> = (((&'a [f64], &'a [f64]), &'a mut [f64]), &'a mut [f64]);
    let kernel = |(((b, a), p), o): Rows<'_>| {
        vecmat_into(b, w0, p);
        vecmat_acc(a, wk, p);
        for (oi, &pi) in o.iter_mut().zip(p.iter()) {
            *oi = act.apply(pi);
        }
    };
    if end - start >= PAR_LEVEL_THRESHOLD {
        base.par_chunks(d)
            .zip(agg.par_chunks(d))
            .zip(pre.par_chunks_mut(d))
            .zip(out.par_chunks_mut(d))
            .for_each(kernel);
    } else {
        base.chunks(d)
            .zip(agg.chunks(d))
            .zip(pre.chunks_mut(d))
            .zip(out.chunks_mut(d))
            .for_each(kernel);
    }
}

/// Gradients of a loss with respect to the transformation matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct DyGcnGrads {
    pub w0: Matrix,
    pub wk: Vec<Matrix>,
}

impl DyGcnGrads {
    pub fn zeros(dim: usize, max_order: usize) -> Self {
        Self {
            w0: Matrix::zeros(dim, dim),
            wk: vec![Matrix::zeros(dim, dim); max_order],
        }
    }
}

/// Backpropagates `∂L/∂Z^{t+1}` (one row per slot; rows of untouched
/// nodes are ignored) through a step traced over `next`.
pub fn backward(
    trace: &StepTrace,
    next: &GraphSnapshot,
    params: &DyGcnParams,
    grad_out: &Matrix,
) -> Result<DyGcnGrads> {
    let d = trace.dim;
    check_embedding(grad_out, trace.pos.len(), d)?;
    let total = trace.nodes.len();
    let mut g_out = vec![0.0; total * d];
    for (i, &v) in trace.nodes.iter().enumerate() {
        g_out[i * d..(i + 1) * d].copy_from_slice(grad_out.row(v));
    }
    backward_from_rows(trace, next, params, g_out)
}

/// As [`backward`], with the output gradient already gathered per updated
/// node in trace order.
pub(crate) fn backward_from_rows(
    trace: &StepTrace,
    next: &GraphSnapshot,
    params: &DyGcnParams,
    mut g_out: Vec<f64>,
) -> Result<DyGcnGrads> {
    let d = trace.dim;
    let max_order = params.max_order();
    let mut grads = DyGcnGrads::zeros(d, max_order);
    let mut g_pre = vec![0.0; d];
    let mut g_agg = vec![0.0; d];
    for k in (1..=max_order).rev() {
        let (start, end) = (trace.level_start[k - 1], trace.level_start[k]);
        for i in start..end {
            let span = trace.span(i);
            for ((gp, go), p) in g_pre
                .iter_mut()
                .zip(&g_out[span.clone()])
                .zip(&trace.pre[span.clone()])
            {
                *gp = go * params.activation.derivative(*p);
            }
            outer_acc(&trace.base[span.clone()], &g_pre, &mut grads.w0);
            outer_acc(&trace.delta_agg[span], &g_pre, &mut grads.wk[k - 1]);
            if k == 1 {
                // First-order Δa depends only on frozen inputs.
                continue;
            }
            vecmat_transpose_into(&g_pre, params.w(k), &mut g_agg);
            for_closed_neighborhood(next, trace.nodes[i], |u| {
                let order = trace.marker[u] as usize;
                if order != 0 && order < k {
                    let j = trace.index_of(u).unwrap();
                    axpy(1.0, &g_agg, &mut g_out[j * d..(j + 1) * d]);
                }
            });
        }
    }
    Ok(grads)
}

/// Incremental step over consecutive snapshots, returning a new matrix.
/// Rows outside the influence sets are copied bit for bit from `z_t`.
pub fn dygcn_step(
    prev: &GraphSnapshot,
    next: &GraphSnapshot,
    z_t: &EmbeddingMatrix,
    params: &DyGcnParams,
) -> Result<EmbeddingMatrix> {
    let delta = check_pair(prev, next)?;
    dygcn_step_with_delta(next, &delta, z_t, params)
}

/// As [`dygcn_step`] when the delta is already known.
pub fn dygcn_step_with_delta(
    next: &GraphSnapshot,
    delta: &GraphDelta,
    z_t: &EmbeddingMatrix,
    params: &DyGcnParams,
) -> Result<EmbeddingMatrix> {
    let trace = step_trace(next, delta, z_t, params)?;
    let mut out = z_t.clone();
    trace.write_into(&mut out);
    Ok(out)
}

/// Updates `z` in place; cost is independent of the number of untouched rows.
pub fn dygcn_step_in_place(
    z: &mut EmbeddingMatrix,
    next: &GraphSnapshot,
    delta: &GraphDelta,
    params: &DyGcnParams,
) -> Result<InfluenceSets> {
    let trace = step_trace(next, delta, z, params)?;
    trace.write_into(z);
    Ok(trace.sets)
}

/// `ΔA` as a signed sparse matrix: +1 for added edges, −1 for removed.
pub fn delta_adjacency(n_slots: usize, delta: &GraphDelta) -> SparseMatrix {
    let changes = delta.node_changes();
    let mut indptr = Vec::with_capacity(n_slots + 1);
    let mut indices = Vec::new();
    let mut values = Vec::new();
    indptr.push(0);
    let mut it = changes.iter().peekable();
    for v in 0..n_slots {
        if let Some(change) = it.next_if(|c| c.node == v) {
            let mut row: Vec<(NodeId, f64)> = change
                .gained
                .iter()
                .map(|&u| (u, 1.0))
                .chain(change.lost.iter().map(|&u| (u, -1.0)))
                .collect();
            row.sort_unstable_by_key(|&(u, _)| u);
            for (u, s) in row {
                indices.push(u);
                values.push(s);
            }
        }
        indptr.push(indices.len());
    }
    SparseMatrix::from_csr(n_slots, indptr, indices, values)
}

/// Whole-matrix evaluation of the same update:
/// `Z_1 = σ(ΔA Z W_1 + Z W_0)` masked to `V_1`, then
/// `Z_k = σ(Â^{t+1} (Z_{k-1} − Z_{k-2}) W_k + Z W_0)` masked to `V_k`.
pub fn dygcn_step_matrix(
    prev: &GraphSnapshot,
    next: &GraphSnapshot,
    z_t: &EmbeddingMatrix,
    params: &DyGcnParams,
) -> Result<EmbeddingMatrix> {
    let delta = check_pair(prev, next)?;
    check_step_inputs(next, &delta, z_t, params)?;
    let sets = crate::graph::influenced_sets(next, &delta, params.max_order())?;

    let mut z0 = z_t.clone();
    for &v in sets.order(1) {
        if prev.degree(v) == 0 && next.degree(v) > 0 {
            let init = init_new_node(v, next, z_t)?;
            z0.row_mut(v).copy_from_slice(&init);
        }
    }
    let self_term = z0.matmul(&params.w0)?;

    let d_adj = delta_adjacency(next.n_slots(), &delta);
    let mut cand = d_adj.mul_dense(&z0)?.matmul(params.w(1))?;
    cand.add_scaled(1.0, &self_term)?;
    params.activation.apply_matrix(&mut cand);
    let mut before = z0.clone();
    let mut current = masked(&z0, &cand, sets.order(1));

    let a_hat = normalize_adjacency(next);
    for k in 2..=params.max_order() {
        let dz = current.sub(&before)?;
        let mut cand = a_hat.mul_dense(&dz)?.matmul(params.w(k))?;
        cand.add_scaled(1.0, &self_term)?;
        params.activation.apply_matrix(&mut cand);
        let updated = masked(&current, &cand, sets.order(k));
        before = current;
        current = updated;
    }
    Ok(current)
}

/// `keep` with the rows listed in `rows` taken from `replace`.
fn masked(keep: &Matrix, replace: &Matrix, rows: &[NodeId]) -> Matrix {
    let mut out = keep.clone();
    for &v in rows {
        out.row_mut(v).copy_from_slice(replace.row(v));
    }
    out
}

/// Applies consecutive deltas from a starting snapshot, rolling the
/// embeddings forward with [`dygcn_step_with_delta`].
pub fn roll_forward(
    start: &GraphSnapshot,
    deltas: &[GraphDelta],
    z0: &EmbeddingMatrix,
    params: &DyGcnParams,
) -> Result<EmbeddingMatrix> {
    let mut snap = start.clone();
    let mut z = z0.clone();
    for delta in deltas {
        snap = apply_delta(&snap, delta)?;
        dygcn_step_in_place(&mut z, &snap, delta, params)?;
    }
    Ok(z)
}
