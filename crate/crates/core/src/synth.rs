//! Seeded stochastic-block-model sequences with fixed per-step churn.
//!
//! Communities are contiguous slot ranges of near-equal size. The initial
//! snapshot samples every pair independently (intra-block with `p_in`,
//! inter-block with `p_out`) by geometric skipping. Each later step removes
//! `churn_remove` uniformly chosen edges and adds `churn_add` fresh pairs
//! drawn from the same block distribution, so expected density is kept when
//! the two counts match.

use std::collections::HashSet;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{apply_delta, Edge, GraphDelta, GraphSnapshot, NodeId};
use crate::rng::{self, StreamRng};

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub n_nodes: usize,
    pub communities: usize,
    pub p_in: f64,
    pub p_out: f64,
    /// Number of snapshots, including the initial one.
    pub steps: usize,
    pub churn_add: usize,
    pub churn_remove: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_nodes: 500,
            communities: 2,
            p_in: 0.05,
            p_out: 0.005,
            steps: 20,
            churn_add: 9,
            churn_remove: 9,
            seed: 0,
        }
    }
}

impl SynthConfig {
    /// `p_in` that gives `edges` expected edges with `p_out = p_in · ratio`.
    pub fn p_in_for_edges(n_nodes: usize, communities: usize, edges: f64, ratio: f64) -> f64 {
        let (intra, inter) = pair_counts(&block_sizes(n_nodes, communities));
        edges / (intra as f64 + ratio * inter as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < 2 {
            return Err(Error::Config("n_nodes must be at least 2".into()));
        }
        if self.communities < 1 || self.communities > self.n_nodes {
            return Err(Error::Config("communities must be in 1..=n_nodes".into()));
        }
        for (name, p) in [("p_in", self.p_in), ("p_out", self.p_out)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must lie in [0, 1]")));
            }
        }
        if self.steps < 1 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        let (intra, inter) = pair_counts(&block_sizes(self.n_nodes, self.communities));
        if self.churn_add > 0 {
            let reachable = (if self.p_in > 0.0 { intra } else { 0 })
                + (if self.p_out > 0.0 { inter } else { 0 });
            if reachable == 0 {
                return Err(Error::Config("churn_add > 0 but every pair has probability 0".into()));
            }
        }
        Ok(())
    }
}

/// Generated sequence and the community of each slot.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticGraph {
    pub sequence: Vec<GraphSnapshot>,
    pub labels: Vec<usize>,
}

fn block_sizes(n: usize, c: usize) -> Vec<usize> {
    (0..c).map(|b| (b + 1) * n / c - b * n / c).collect()
}

fn pair_counts(sizes: &[usize]) -> (u64, u64) {
    let n: u64 = sizes.iter().map(|&s| s as u64).sum();
    let intra: u64 = sizes.iter().map(|&s| s as u64 * (s as u64).saturating_sub(1) / 2).sum();
    (intra, n * n.saturating_sub(1) / 2 - intra)
}

/// Gap to the next success of a Bernoulli(p) sequence.
fn geometric_skip(rng: &mut StreamRng, log_q: f64) -> u64 {
    let r: f64 = rng.gen();
    ((1.0 - r).ln() / log_q).floor() as u64
}

/// Calls `emit(i)` for each index in `0..count` kept with probability `p`.
fn bernoulli_indices(count: u64, p: f64, rng: &mut StreamRng, mut emit: impl FnMut(u64)) {
    if p <= 0.0 || count == 0 {
        return;
    }
    if p >= 1.0 {
        (0..count).for_each(emit);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut i = geometric_skip(rng, log_q);
    while i < count {
        emit(i);
        i = i.saturating_add(1 + geometric_skip(rng, log_q));
    }
}

/// Row-major index over the strict lower triangle of an `s × s` block.
fn triangle_pair(k: u64) -> (u64, u64) {
    // Largest row `i` with i(i−1)/2 ≤ k.
    let mut i = ((1.0 + (1.0 + 8.0 * k as f64).sqrt()) / 2.0).floor() as u64;
    while i * (i - 1) / 2 > k {
        i -= 1;
    }
    while (i + 1) * i / 2 <= k {
        i += 1;
    }
    (i, k - i * (i - 1) / 2)
}

struct Blocks {
    starts: Vec<usize>,
    sizes: Vec<usize>,
    intra: Vec<u64>,
    /// Inter-block pairs of each block with all later blocks.
    inter: Vec<u64>,
}

impl Blocks {
    fn new(n: usize, c: usize) -> Self {
        let sizes = block_sizes(n, c);
        let mut starts = Vec::with_capacity(c);
        let mut acc = 0;
        for &s in &sizes {
            starts.push(acc);
            acc += s;
        }
        let intra = sizes.iter().map(|&s| s as u64 * (s as u64).saturating_sub(1) / 2).collect();
        let inter = (0..c)
            .map(|b| sizes[b] as u64 * (n - starts[b] - sizes[b]) as u64)
            .collect();
        Self {
            starts,
            sizes,
            intra,
            inter,
        }
    }

    fn intra_pair(&self, b: usize, k: u64) -> (NodeId, NodeId) {
        let (i, j) = triangle_pair(k);
        (self.starts[b] + i as usize, self.starts[b] + j as usize)
    }

    /// `k`-th pair between block `b` and the slots after it.
    fn inter_pair(&self, b: usize, k: u64, n: usize) -> (NodeId, NodeId) {
        let tail = (n - self.starts[b] - self.sizes[b]) as u64;
        let base = self.starts[b] + self.sizes[b];
        (self.starts[b] + (k / tail) as usize, base + (k % tail) as usize)
    }

    fn labels(&self, n: usize) -> Vec<usize> {
        let mut out = vec![0; n];
        for (b, (&s, &len)) in self.starts.iter().zip(&self.sizes).enumerate() {
            out[s..s + len].fill(b);
        }
        out
    }
}

/// Picks an index with probability proportional to `weights`.
fn weighted_choice(weights: &[f64], rng: &mut StreamRng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut r = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if r < w {
            return i;
        }
        r -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

pub fn generate(config: &SynthConfig) -> Result<SyntheticGraph> {
    config.validate()?;
    let n = config.n_nodes;
    let blocks = Blocks::new(n, config.communities);

    let mut rng = rng::stream(config.seed, "synth/initial");
    let mut pairs = Vec::new();
    for b in 0..config.communities {
        bernoulli_indices(blocks.intra[b], config.p_in, &mut rng, |k| {
            pairs.push(blocks.intra_pair(b, k))
        });
        bernoulli_indices(blocks.inter[b], config.p_out, &mut rng, |k| {
            pairs.push(blocks.inter_pair(b, k, n))
        });
    }
    let first = GraphSnapshot::from_edges(n, 0, pairs)?;

    // Sampling weight of each (kind, block) pool for added edges.
    let mut pool_weights = Vec::with_capacity(2 * config.communities);
    for b in 0..config.communities {
        pool_weights.push(config.p_in * blocks.intra[b] as f64);
        pool_weights.push(config.p_out * blocks.inter[b] as f64);
    }
    let (intra_total, inter_total) = pair_counts(&blocks.sizes);
    let reachable_pairs = (if config.p_in > 0.0 { intra_total } else { 0 })
        + (if config.p_out > 0.0 { inter_total } else { 0 });

    let mut churn_rng = rng::stream(config.seed, "synth/churn");
    let mut sequence = Vec::with_capacity(config.steps);
    sequence.push(first);
    for t in 1..config.steps {
        let prev = sequence.last().unwrap();
        let m = prev.n_edges();
        if config.churn_remove > m {
            return Err(Error::Config(format!(
                "step {t}: churn_remove {} exceeds the {m} available edges",
                config.churn_remove
            )));
        }
        // Reachable pairs that are not already edges. Existing edges may
        // sit outside the reachable pools only when a probability is 0.
        let reachable_edges = prev
            .edges()
            .filter(|e| {
                let same = blocks_of(&blocks, e.lo()) == blocks_of(&blocks, e.hi());
                if same {
                    config.p_in > 0.0
                } else {
                    config.p_out > 0.0
                }
            })
            .count() as u64;
        let free = reachable_pairs - reachable_edges;
        if config.churn_add as u64 > free {
            return Err(Error::Config(format!(
                "step {t}: churn_add {} exceeds the {free} available non-edges",
                config.churn_add
            )));
        }
        let all: Vec<Edge> = prev.edges().collect();
        let removed: Vec<Edge> = index::sample(&mut churn_rng, m, config.churn_remove)
            .into_iter()
            .map(|i| all[i])
            .collect();
        let existing: HashSet<Edge> = all.into_iter().collect();
        let mut added = HashSet::with_capacity(config.churn_add);
        let mut added_order = Vec::with_capacity(config.churn_add);
        while added_order.len() < config.churn_add {
            let pool = weighted_choice(&pool_weights, &mut churn_rng);
            let b = pool / 2;
            let (u, v) = if pool.is_multiple_of(2) {
                let k = churn_rng.gen_range(0..blocks.intra[b]);
                blocks.intra_pair(b, k)
            } else {
                let k = churn_rng.gen_range(0..blocks.inter[b]);
                blocks.inter_pair(b, k, n)
            };
            let e = Edge::new(u, v)?;
            if !existing.contains(&e) && added.insert(e) {
                added_order.push(e);
            }
        }
        let delta = GraphDelta::new(prev.time_index(), added_order, removed)?;
        let next = apply_delta(prev, &delta)?;
        sequence.push(next);
    }
    Ok(SyntheticGraph {
        sequence,
        labels: blocks.labels(n),
    })
}

fn blocks_of(blocks: &Blocks, v: NodeId) -> usize {
    blocks.starts.partition_point(|&s| s <= v) - 1
}
