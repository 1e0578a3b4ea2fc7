//! Negative-sampling structure-preserving loss:
//!
//! `L = −Σ_v Σ_{u∈N(v)} [log σ(z_v·z_u) + Σ_q log(1 − σ(z_v·z_{u⁻_q}))]`
//!
//! Dot products are clamped to `[−30, 30]` before the sigmoid; the clamp
//! has zero derivative outside that range.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{GraphSnapshot, NodeId};
use crate::linalg::{axpy, dot, EmbeddingMatrix, Matrix};

pub const DOT_CLAMP: f64 = 30.0;

/// One list of `Q` negatives per ordered positive pair `(v, u)`, pairs in
/// [`GraphSnapshot::ordered_pairs`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegativeSamples {
    per_pair: usize,
    nodes: Vec<NodeId>,
}

impl NegativeSamples {
    /// Uniform over all slots except the anchor `v`.
    pub fn sample(snap: &GraphSnapshot, per_pair: usize, rng: &mut impl Rng) -> Result<Self> {
        if per_pair == 0 {
            return Err(Error::Parameter("negatives per positive must be at least 1".into()));
        }
        let n = snap.n_slots();
        if n < 2 && snap.n_edges() > 0 {
            return Err(Error::Parameter("negative sampling needs two slots".into()));
        }
        let mut nodes = Vec::with_capacity(2 * snap.n_edges() * per_pair);
        for (v, _) in snap.ordered_pairs() {
            for _ in 0..per_pair {
                let mut u = rng.gen_range(0..n - 1);
                if u >= v {
                    u += 1;
                }
                nodes.push(u);
            }
        }
        Ok(Self { per_pair, nodes })
    }

    pub fn from_vec(per_pair: usize, nodes: Vec<NodeId>) -> Result<Self> {
        if per_pair == 0 || !nodes.len().is_multiple_of(per_pair) {
            return Err(Error::Parameter("negative list length must be a multiple of Q".into()));
        }
        Ok(Self { per_pair, nodes })
    }

    pub fn per_pair(&self) -> usize {
        self.per_pair
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Each pair's negatives repeated `times` times, giving `Q · times`.
    pub fn repeated(&self, times: usize) -> Self {
        let mut nodes = Vec::with_capacity(self.nodes.len() * times);
        for chunk in self.nodes.chunks(self.per_pair) {
            for _ in 0..times {
                nodes.extend_from_slice(chunk);
            }
        }
        Self {
            per_pair: self.per_pair * times,
            nodes,
        }
    }

    fn check(&self, snap: &GraphSnapshot) -> Result<()> {
        let expected = 2 * snap.n_edges() * self.per_pair;
        if self.nodes.len() != expected {
            return Err(Error::Parameter(format!(
                "{} negatives supplied, {expected} required",
                self.nodes.len()
            )));
        }
        if let Some(&u) = self.nodes.iter().find(|&&u| u >= snap.n_slots()) {
            return Err(Error::Index {
                id: u,
                n_slots: snap.n_slots(),
            });
        }
        Ok(())
    }
}

/// `ln(1 + eˣ)` without overflow.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn clamped(s: f64) -> (f64, f64) {
    if s > DOT_CLAMP {
        (DOT_CLAMP, 0.0)
    } else if s < -DOT_CLAMP {
        (-DOT_CLAMP, 0.0)
    } else {
        (s, 1.0)
    }
}

fn check_inputs(z: &EmbeddingMatrix, snap: &GraphSnapshot, negatives: &NegativeSamples) -> Result<()> {
    if z.rows() != snap.n_slots() {
        return Err(Error::Shape(format!(
            "{} embedding rows for {} slots",
            z.rows(),
            snap.n_slots()
        )));
    }
    if !z.is_finite() {
        return Err(Error::Numeric("non-finite embeddings".into()));
    }
    negatives.check(snap)
}

pub fn unsupervised_loss(
    z: &EmbeddingMatrix,
    snap: &GraphSnapshot,
    negatives: &NegativeSamples,
) -> Result<f64> {
    check_inputs(z, snap, negatives)?;
    let q = negatives.per_pair;
    let mut total = 0.0;
    for (i, (v, u)) in snap.ordered_pairs().enumerate() {
        let zv = z.row(v);
        let (s, _) = clamped(dot(zv, z.row(u)));
        let mut term = softplus(-s);
        for &n in &negatives.nodes[i * q..(i + 1) * q] {
            let (s, _) = clamped(dot(zv, z.row(n)));
            term += softplus(s);
        }
        total += term;
    }
    Ok(total)
}

/// Loss and `∂L/∂Z`.
pub fn loss_and_grad(
    z: &EmbeddingMatrix,
    snap: &GraphSnapshot,
    negatives: &NegativeSamples,
) -> Result<(f64, Matrix)> {
    check_inputs(z, snap, negatives)?;
    let q = negatives.per_pair;
    let d = z.cols();
    let mut grad = Matrix::zeros(z.rows(), d);
    let mut total = 0.0;
    let mut gv = vec![0.0; d];
    for (i, (v, u)) in snap.ordered_pairs().enumerate() {
        gv.fill(0.0);
        let zv = z.row(v);
        let (s, ds) = clamped(dot(zv, z.row(u)));
        let mut term = softplus(-s);
        // d/ds softplus(−s) = −σ(−s)
        let g = -sigmoid(-s) * ds;
        if g != 0.0 {
            axpy(g, z.row(u), &mut gv);
            axpy(g, zv, grad.row_mut(u));
        }
        for &n in &negatives.nodes[i * q..(i + 1) * q] {
            let (s, ds) = clamped(dot(zv, z.row(n)));
            term += softplus(s);
            let g = sigmoid(s) * ds;
            if g != 0.0 {
                axpy(g, z.row(n), &mut gv);
                axpy(g, zv, grad.row_mut(n));
            }
        }
        axpy(1.0, &gv, grad.row_mut(v));
        total += term;
    }
    Ok((total, grad))
}
