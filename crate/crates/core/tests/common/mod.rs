//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use dygcn::dygcn::DyGcnParams;
use dygcn::graph::{GraphSnapshot, NodeId};
use dygcn::linalg::{Activation, Matrix};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn edge_set(snap: &GraphSnapshot) -> BTreeSet<(NodeId, NodeId)> {
    snap.edges().map(|e| e.endpoints()).collect()
}

/// Erdős–Rényi graph over `n` slots.
pub fn random_graph(n: usize, p: f64, t: u64, rng: &mut impl Rng) -> GraphSnapshot {
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                pairs.push((a, b));
            }
        }
    }
    GraphSnapshot::from_edges(n, t, pairs).unwrap()
}

/// Removes up to `remove` existing edges and adds up to `add` absent ones.
pub fn perturb(prev: &GraphSnapshot, add: usize, remove: usize, rng: &mut impl Rng) -> GraphSnapshot {
    let n = prev.n_slots();
    let mut edges: Vec<_> = edge_set(prev).into_iter().collect();
    edges.shuffle(rng);
    let kept: Vec<_> = edges.iter().skip(remove.min(edges.len())).copied().collect();
    let mut set: BTreeSet<_> = kept.into_iter().collect();
    let mut added = 0;
    let mut attempts = 0;
    while added < add && attempts < 100 * (add + 1) && n >= 2 {
        attempts += 1;
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b {
            continue;
        }
        let e = (a.min(b), a.max(b));
        if !prev.has_edge(e.0, e.1) && set.insert(e) {
            added += 1;
        }
    }
    GraphSnapshot::from_edges(n, prev.time_index() + 1, set).unwrap()
}

/// Endpoints of edges present in exactly one of the two snapshots.
pub fn changed_endpoints(prev: &GraphSnapshot, next: &GraphSnapshot) -> Vec<NodeId> {
    let (a, b) = (edge_set(prev), edge_set(next));
    let mut out: BTreeSet<NodeId> = BTreeSet::new();
    for &(u, v) in a.symmetric_difference(&b) {
        out.insert(u);
        out.insert(v);
    }
    out.into_iter().collect()
}

/// Order of every slot by plain BFS over `next`: distance `d` gives order
/// `d + 1` when that is at most `k`, 0 otherwise.
pub fn bfs_orders(prev: &GraphSnapshot, next: &GraphSnapshot, k: usize) -> Vec<usize> {
    let n = next.n_slots();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for v in changed_endpoints(prev, next) {
        dist[v] = 0;
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        for &u in next.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist.iter()
        .map(|&d| if d != usize::MAX && d < k { d + 1 } else { 0 })
        .collect()
}

pub fn random_matrix(rows: usize, cols: usize, scale: f64, rng: &mut impl Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-scale..scale))
}

pub fn random_params(d: usize, k: usize, act: Activation, rng: &mut impl Rng) -> DyGcnParams {
    let w0 = random_matrix(d, d, 0.5, rng);
    let wk = (0..k).map(|_| random_matrix(d, d, 0.5, rng)).collect();
    DyGcnParams::new(w0, wk, act).unwrap()
}

fn row_times(x: &[f64], w: &Matrix) -> Vec<f64> {
    (0..w.cols())
        .map(|j| x.iter().enumerate().map(|(i, xi)| xi * w.get(i, j)).sum())
        .collect()
}

fn closed(snap: &GraphSnapshot, v: NodeId) -> Vec<NodeId> {
    let mut out = snap.neighbors(v).to_vec();
    out.push(v);
    out
}

/// Straight-line node-wise update written from the definitions: full
/// neighbourhood sums instead of gained/lost lists, dense vectors, no reuse
/// of library kernels.
pub fn reference_step(
    prev: &GraphSnapshot,
    next: &GraphSnapshot,
    z: &Matrix,
    params: &DyGcnParams,
) -> Matrix {
    let k_max = params.wk.len();
    let order = bfs_orders(prev, next, k_max);
    let n = next.n_slots();
    let d = z.cols();
    let act = params.activation;

    let mut base: Vec<Vec<f64>> = (0..n).map(|v| z.row(v).to_vec()).collect();
    for v in 0..n {
        if order[v] == 1 && prev.degree(v) == 0 && next.degree(v) > 0 {
            let mut row = vec![0.0; d];
            for &u in next.neighbors(v) {
                for (r, x) in row.iter_mut().zip(z.row(u)) {
                    *r += x;
                }
            }
            base[v] = row;
        }
    }

    let mut out = base.clone();
    for k in 1..=k_max {
        let mut level = Vec::new();
        for v in (0..n).filter(|&v| order[v] == k) {
            let mut agg = vec![0.0; d];
            if k == 1 {
                for u in closed(next, v) {
                    for (a, x) in agg.iter_mut().zip(&base[u]) {
                        *a += x;
                    }
                }
                for u in closed(prev, v) {
                    for (a, x) in agg.iter_mut().zip(&base[u]) {
                        *a -= x;
                    }
                }
            } else {
                for u in closed(next, v) {
                    if order[u] != 0 && order[u] < k {
                        for ((a, new), old) in agg.iter_mut().zip(&out[u]).zip(&base[u]) {
                            *a += new - old;
                        }
                    }
                }
            }
            let s = row_times(&base[v], &params.w0);
            let m = row_times(&agg, &params.wk[k - 1]);
            let row: Vec<f64> = s.iter().zip(&m).map(|(a, b)| act.apply(a + b)).collect();
            level.push((v, row));
        }
        for (v, row) in level {
            out[v] = row;
        }
    }
    Matrix::from_rows(&out)
}

/// `D^{-1/2} A D^{-1/2}` as a dense nalgebra matrix; isolated slots give
/// zero rows.
pub fn dense_sym_normalized(snap: &GraphSnapshot) -> nalgebra::DMatrix<f64> {
    let n = snap.n_slots();
    let mut m = nalgebra::DMatrix::zeros(n, n);
    for (a, b) in snap.edges().map(|e| e.endpoints()) {
        let w = 1.0 / ((snap.degree(a) * snap.degree(b)) as f64).sqrt();
        m[(a, b)] = w;
        m[(b, a)] = w;
    }
    m
}

/// AUC by comparing every positive with every negative; ties count half.
pub fn pairwise_auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut wins = 0.0;
    for &p in pos {
        for &q in neg {
            if p > q {
                wins += 1.0;
            } else if p == q {
                wins += 0.5;
            }
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
