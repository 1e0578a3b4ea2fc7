//! Dynamic graph storage: snapshots over a fixed universe of node slots,
//! deltas between consecutive snapshots and influence-set computation.
//!
//! Adjacency is compressed sparse row with sorted neighbour lists. Every
//! undirected edge is stored in both endpoint rows. Slots with no incident
//! edges are dangling nodes (not yet born or already removed).

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub type NodeId = usize;

/// Largest update order representable in the per-node order marker.
pub const MAX_ORDER: usize = u8::MAX as usize;

/// Unordered node pair stored canonically with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    lo: NodeId,
    hi: NodeId,
}

impl Edge {
    pub fn new(a: NodeId, b: NodeId) -> Result<Self> {
        if a == b {
            return Err(Error::Structural(format!("self-loop ({a},{a}) is not allowed")));
        }
        Ok(if a < b { Self { lo: a, hi: b } } else { Self { lo: b, hi: a } })
    }

    #[inline]
    pub fn lo(self) -> NodeId {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> NodeId {
        self.hi
    }

    #[inline]
    pub fn endpoints(self) -> (NodeId, NodeId) {
        (self.lo, self.hi)
    }
}

/// Undirected graph at one time index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSnapshot {
    n_slots: usize,
    time_index: u64,
    indptr: Vec<usize>,
    indices: Vec<NodeId>,
}

impl GraphSnapshot {
    pub fn empty(n_slots: usize, time_index: u64) -> Self {
        Self {
            n_slots,
            time_index,
            indptr: vec![0; n_slots + 1],
            indices: Vec::new(),
        }
    }

    /// Builds a snapshot from node pairs in any orientation. Duplicate pairs
    /// collapse; self-loops and out-of-range ids are rejected.
    pub fn from_edges<I>(n_slots: usize, time_index: u64, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut edges = Vec::new();
        for (a, b) in pairs {
            for id in [a, b] {
                if id >= n_slots {
                    return Err(Error::Index { id, n_slots });
                }
            }
            edges.push(Edge::new(a, b)?);
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self::from_sorted_edges(n_slots, time_index, &edges))
    }

    /// `edges` must be sorted, deduplicated and in range.
    fn from_sorted_edges(n_slots: usize, time_index: u64, edges: &[Edge]) -> Self {
        let mut degree = vec![0usize; n_slots];
        for e in edges {
            degree[e.lo] += 1;
            degree[e.hi] += 1;
        }
        let mut indptr = Vec::with_capacity(n_slots + 1);
        indptr.push(0);
        for d in &degree {
            indptr.push(indptr.last().unwrap() + d);
        }
        let mut fill = indptr[..n_slots].to_vec();
        let mut indices = vec![0; indptr[n_slots]];
        // Sorted canonical edges make every row come out sorted: row `v`
        // first receives its lower neighbours (as `hi`) in `lo` order, then
        // its higher neighbours (as `lo`) in `hi` order.
        for e in edges {
            indices[fill[e.hi]] = e.lo;
            fill[e.hi] += 1;
        }
        for e in edges {
            indices[fill[e.lo]] = e.hi;
            fill[e.lo] += 1;
        }
        let snap = Self {
            n_slots,
            time_index,
            indptr,
            indices,
        };
        debug_assert!((0..n_slots).all(|v| snap.neighbors(v).windows(2).all(|w| w[0] < w[1])));
        snap
    }

    #[inline]
    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    #[inline]
    pub fn time_index(&self) -> u64 {
        self.time_index
    }

    pub fn with_time_index(mut self, t: u64) -> Self {
        self.time_index = t;
        self
    }

    /// Sorted neighbour list of `v`.
    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.indices[self.indptr[v]..self.indptr[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.indptr[v + 1] - self.indptr[v]
    }

    /// Number of undirected edges.
    #[inline]
    pub fn n_edges(&self) -> usize {
        self.indices.len() / 2
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        a < self.n_slots && b < self.n_slots && self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Canonical edges in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.n_slots).flat_map(move |v| {
            self.neighbors(v)
                .iter()
                .filter(move |&&u| u > v)
                .map(move |&u| Edge { lo: v, hi: u })
        })
    }

    /// Ordered `(v, u)` pairs with `u ∈ N(v)`: each edge appears twice.
    pub fn ordered_pairs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.n_slots).flat_map(move |v| self.neighbors(v).iter().map(move |&u| (v, u)))
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        if v >= self.n_slots {
            return Err(Error::Index {
                id: v,
                n_slots: self.n_slots,
            });
        }
        Ok(())
    }

    /// Relabels slot `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[NodeId]) -> Result<Self> {
        if perm.len() != self.n_slots {
            return Err(Error::Structural("permutation length differs from slot count".into()));
        }
        Self::from_edges(
            self.n_slots,
            self.time_index,
            self.edges().map(|e| (perm[e.lo], perm[e.hi])),
        )
    }
}

/// Edge changes between snapshot `from_time` and `from_time + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphDelta {
    added: Vec<Edge>,
    removed: Vec<Edge>,
    from_time: u64,
}

/// How one node's neighbour list changes across a delta.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeChange {
    pub node: NodeId,
    pub gained: Vec<NodeId>,
    pub lost: Vec<NodeId>,
}

impl GraphDelta {
    /// Sorts and deduplicates both sets; fails if they intersect.
    pub fn new(from_time: u64, mut added: Vec<Edge>, mut removed: Vec<Edge>) -> Result<Self> {
        added.sort_unstable();
        added.dedup();
        removed.sort_unstable();
        removed.dedup();
        let (mut i, mut j) = (0, 0);
        while i < added.len() && j < removed.len() {
            match added[i].cmp(&removed[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    return Err(Error::DeltaConsistency(format!(
                        "edge {:?} is both added and removed",
                        added[i].endpoints()
                    )))
                }
            }
        }
        Ok(Self {
            added,
            removed,
            from_time,
        })
    }

    pub fn empty(from_time: u64) -> Self {
        Self {
            added: Vec::new(),
            removed: Vec::new(),
            from_time,
        }
    }

    pub fn added(&self) -> &[Edge] {
        &self.added
    }

    pub fn removed(&self) -> &[Edge] {
        &self.removed
    }

    pub fn from_time(&self) -> u64 {
        self.from_time
    }

    pub fn to_time(&self) -> u64 {
        self.from_time + 1
    }

    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty()
    }

    /// `|ΔE|`: additions plus removals.
    pub fn churn(&self) -> usize {
        self.added.len() + self.removed.len()
    }

    /// Sorted distinct endpoints of all changed edges.
    pub fn endpoints(&self) -> Vec<NodeId> {
        let mut nodes: Vec<NodeId> = self
            .added
            .iter()
            .chain(&self.removed)
            .flat_map(|e| [e.lo, e.hi])
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        nodes
    }

    /// Per-node gained/lost neighbours, sorted by node.
    pub fn node_changes(&self) -> Vec<NodeChange> {
        let mut entries: Vec<(NodeId, NodeId, bool)> = Vec::with_capacity(2 * self.churn());
        for e in &self.added {
            entries.push((e.lo, e.hi, true));
            entries.push((e.hi, e.lo, true));
        }
        for e in &self.removed {
            entries.push((e.lo, e.hi, false));
            entries.push((e.hi, e.lo, false));
        }
        entries.sort_unstable();
        let mut out: Vec<NodeChange> = Vec::new();
        for (node, nbr, gained) in entries {
            if out.last().is_none_or(|c| c.node != node) {
                out.push(NodeChange {
                    node,
                    gained: Vec::new(),
                    lost: Vec::new(),
                });
            }
            let change = out.last_mut().unwrap();
            if gained {
                change.gained.push(nbr);
            } else {
                change.lost.push(nbr);
            }
        }
        out
    }

    /// Checks every removed edge exists in `prev` and no added edge does.
    pub fn validate_against(&self, prev: &GraphSnapshot) -> Result<()> {
        if self.from_time != prev.time_index() {
            return Err(Error::Ordering {
                expected: prev.time_index(),
                found: self.from_time,
            });
        }
        for e in self.added.iter().chain(&self.removed) {
            prev.check_node(e.hi)?;
        }
        if let Some(e) = self.removed.iter().find(|e| !prev.has_edge(e.lo, e.hi)) {
            return Err(Error::DeltaConsistency(format!(
                "removed edge {:?} does not exist at t={}",
                e.endpoints(),
                prev.time_index()
            )));
        }
        if let Some(e) = self.added.iter().find(|e| prev.has_edge(e.lo, e.hi)) {
            return Err(Error::DeltaConsistency(format!(
                "added edge {:?} already exists at t={}",
                e.endpoints(),
                prev.time_index()
            )));
        }
        Ok(())
    }
}

/// `ΔA`: added = next \ prev, removed = prev \ next.
pub fn compute_delta(prev: &GraphSnapshot, next: &GraphSnapshot) -> Result<GraphDelta> {
    if prev.n_slots() != next.n_slots() {
        return Err(Error::Structural(format!(
            "slot counts differ: {} vs {}",
            prev.n_slots(),
            next.n_slots()
        )));
    }
    if next.time_index() != prev.time_index() + 1 {
        return Err(Error::Ordering {
            expected: prev.time_index() + 1,
            found: next.time_index(),
        });
    }
    let mut added = Vec::new();
    let mut removed = Vec::new();
    for v in 0..prev.n_slots() {
        let a = upper(prev.neighbors(v), v);
        let b = upper(next.neighbors(v), v);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i] < b[j]) {
                removed.push(Edge { lo: v, hi: a[i] });
                i += 1;
            } else if i == a.len() || b[j] < a[i] {
                added.push(Edge { lo: v, hi: b[j] });
                j += 1;
            } else {
                i += 1;
                j += 1;
            }
        }
    }
    // Rows are visited in order and each row's suffix is sorted, so both
    // lists are already canonical.
    Ok(GraphDelta {
        added,
        removed,
        from_time: prev.time_index(),
    })
}

/// Neighbours strictly above `v` in a sorted list.
fn upper(nbrs: &[NodeId], v: NodeId) -> &[NodeId] {
    let start = nbrs.partition_point(|&u| u <= v);
    &nbrs[start..]
}

/// `(prev \ removed) ∪ added`, stamped with `prev.time_index + 1`.
pub fn apply_delta(prev: &GraphSnapshot, delta: &GraphDelta) -> Result<GraphSnapshot> {
    delta.validate_against(prev)?;
    let changes = delta.node_changes();
    let n = prev.n_slots();
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::with_capacity(prev.indices.len() + 2 * delta.added.len());
    indptr.push(0);
    let mut next_change = changes.iter().peekable();
    let mut scratch = Vec::new();
    for v in 0..n {
        let old = prev.neighbors(v);
        match next_change.next_if(|c| c.node == v) {
            None => indices.extend_from_slice(old),
            Some(change) => {
                scratch.clear();
                merge_row(old, &change.lost, &change.gained, &mut scratch);
                indices.extend_from_slice(&scratch);
            }
        }
        indptr.push(indices.len());
    }
    Ok(GraphSnapshot {
        n_slots: n,
        time_index: prev.time_index() + 1,
        indptr,
        indices,
    })
}

/// Sorted merge: `(old \ lost) ∪ gained`. All inputs sorted.
fn merge_row(old: &[NodeId], lost: &[NodeId], gained: &[NodeId], out: &mut Vec<NodeId>) {
    let mut lost = lost.iter().peekable();
    let mut gained = gained.iter().peekable();
    for &u in old {
        while let Some(&&g) = gained.peek() {
            if g < u {
                out.push(g);
                gained.next();
            } else {
                break;
            }
        }
        if lost.next_if(|&&l| l == u).is_none() {
            out.push(u);
        }
    }
    out.extend(gained);
}

/// Disjoint node sets `V_1 … V_K`; node `v` sits in the lowest order it
/// qualifies for. Each set is sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfluenceSets {
    orders: Vec<Vec<NodeId>>,
}

impl InfluenceSets {
    pub fn max_order(&self) -> usize {
        self.orders.len()
    }

    /// `V_k` for `k` in `1..=K`.
    pub fn order(&self, k: usize) -> &[NodeId] {
        &self.orders[k - 1]
    }

    pub fn orders(&self) -> &[Vec<NodeId>] {
        &self.orders
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.orders.iter().map(Vec::len).collect()
    }

    /// `Σ_k |V_k|`
    pub fn total(&self) -> usize {
        self.orders.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.order_of(v).is_some()
    }

    pub fn order_of(&self, v: NodeId) -> Option<usize> {
        self.orders
            .iter()
            .position(|set| set.binary_search(&v).is_ok())
            .map(|i| i + 1)
    }
}

/// Layered frontier expansion from the delta endpoints over `next`.
pub fn influenced_sets(
    next: &GraphSnapshot,
    delta: &GraphDelta,
    max_order: usize,
) -> Result<InfluenceSets> {
    influence_marker(next, delta, max_order).map(|(sets, _)| sets)
}

/// Influence sets plus a per-slot marker holding each node's order (0 for
/// untouched slots).
pub(crate) fn influence_marker(
    next: &GraphSnapshot,
    delta: &GraphDelta,
    max_order: usize,
) -> Result<(InfluenceSets, Vec<u8>)> {
    if max_order < 1 {
        return Err(Error::Parameter("max order K must be at least 1".into()));
    }
    if max_order > MAX_ORDER {
        return Err(Error::Parameter(format!("max order K must be at most {MAX_ORDER}")));
    }
    let first = delta.endpoints();
    if let Some(&v) = first.last() {
        next.check_node(v)?;
    }
    // Zeroed allocation is lazily backed, so an empty delta stays cheap.
    let mut marker = vec![0u8; next.n_slots()];
    for &v in &first {
        marker[v] = 1;
    }
    let mut orders = Vec::with_capacity(max_order);
    orders.push(first);
    for k in 2..=max_order {
        let mut frontier = Vec::new();
        for &v in &orders[k - 2] {
            for &u in next.neighbors(v) {
                if marker[u] == 0 {
                    marker[u] = k as u8;
                    frontier.push(u);
                }
            }
        }
        frontier.sort_unstable();
        orders.push(frontier);
    }
    Ok((InfluenceSets { orders }, marker))
}

/// Hop distance from the nearest source over `snap`, `None` when unreachable.
pub fn bfs_distances(snap: &GraphSnapshot, sources: &[NodeId]) -> Vec<Option<usize>> {
    let mut dist = vec![None; snap.n_slots()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].unwrap();
        for &u in snap.neighbors(v) {
            if dist[u].is_none() {
                dist[u] = Some(dv + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Node attributes `X`. One-hot features are kept implicit so that `XW`
/// costs a copy of `W` rather than an `N×N` product.
#[derive(Clone, Debug, PartialEq)]
pub enum FeatureMatrix {
    Dense(Matrix),
    OneHot(usize),
}

/// Which node attributes to derive from a snapshot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureKind {
    Degree,
    OneHot,
}

impl std::str::FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "degree" => Ok(FeatureKind::Degree),
            "onehot" | "identity" => Ok(FeatureKind::OneHot),
            other => Err(Error::Parameter(format!("unknown feature kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FeatureKind::Degree => "degree",
            FeatureKind::OneHot => "onehot",
        })
    }
}

impl FeatureMatrix {
    /// One column holding each slot's degree.
    pub fn degree(snap: &GraphSnapshot) -> Self {
        FeatureMatrix::Dense(Matrix::from_fn(snap.n_slots(), 1, |v, _| snap.degree(v) as f64))
    }

    pub fn build(kind: FeatureKind, snap: &GraphSnapshot) -> Self {
        match kind {
            FeatureKind::Degree => Self::degree(snap),
            FeatureKind::OneHot => FeatureMatrix::OneHot(snap.n_slots()),
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            FeatureMatrix::Dense(m) => m.rows(),
            FeatureMatrix::OneHot(n) => *n,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            FeatureMatrix::Dense(m) => m.cols(),
            FeatureMatrix::OneHot(n) => *n,
        }
    }

    /// `X W`
    pub fn project(&self, w: &Matrix) -> Result<Matrix> {
        match self {
            FeatureMatrix::Dense(m) => m.matmul(w),
            FeatureMatrix::OneHot(n) => {
                if w.rows() != *n {
                    return Err(Error::Shape(format!(
                        "one-hot features of width {n} times {}x{}",
                        w.rows(),
                        w.cols()
                    )));
                }
                Ok(w.clone())
            }
        }
    }

    /// `Xᵀ G`
    pub fn transpose_mul(&self, g: &Matrix) -> Result<Matrix> {
        match self {
            FeatureMatrix::Dense(m) => m.transpose_matmul(g),
            FeatureMatrix::OneHot(n) => {
                if g.rows() != *n {
                    return Err(Error::Shape("one-hot transpose product".into()));
                }
                Ok(g.clone())
            }
        }
    }

    pub fn to_dense(&self) -> Matrix {
        match self {
            FeatureMatrix::Dense(m) => m.clone(),
            FeatureMatrix::OneHot(n) => Matrix::identity(*n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn snap(n: usize, t: u64, edges: &[(usize, usize)]) -> GraphSnapshot {
        GraphSnapshot::from_edges(n, t, edges.iter().copied()).unwrap()
    }

    #[test]
    fn snapshot_rejects_bad_edges() {
        assert!(matches!(
            GraphSnapshot::from_edges(3, 0, [(1, 1)]),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            GraphSnapshot::from_edges(3, 0, [(0, 3)]),
            Err(Error::Index { id: 3, .. })
        ));
    }

    #[test]
    fn snapshot_neighbors_sorted_and_symmetric() {
        let s = snap(5, 0, &[(3, 1), (0, 3), (4, 3), (1, 0), (1, 3)]);
        assert_eq!(s.neighbors(3), &[0, 1, 4]);
        assert_eq!(s.neighbors(1), &[0, 3]);
        assert_eq!(s.n_edges(), 4);
        assert_eq!(s.degree(2), 0);
        let pairs: Vec<_> = s.edges().map(Edge::endpoints).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 3), (1, 3), (3, 4)]);
    }

    #[test]
    fn delta_identity_is_empty() {
        let a = snap(4, 0, &[(0, 1), (2, 3)]);
        let b = a.clone().with_time_index(1);
        assert!(compute_delta(&a, &b).unwrap().is_empty());
    }

    #[test]
    fn delta_single_insertion() {
        let a = snap(3, 0, &[(0, 1)]);
        let b = snap(3, 1, &[(0, 1), (1, 2)]);
        let d = compute_delta(&a, &b).unwrap();
        assert_eq!(d.added(), &[Edge::new(1, 2).unwrap()]);
        assert!(d.removed().is_empty());
        assert_eq!(d.to_time(), 1);
    }

    #[test]
    fn delta_errors() {
        let a = snap(3, 0, &[]);
        assert!(matches!(
            compute_delta(&a, &snap(4, 1, &[])),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            compute_delta(&a, &snap(3, 2, &[])),
            Err(Error::Ordering { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn apply_empty_delta_bumps_time() {
        let a = snap(3, 4, &[(0, 2)]);
        let b = apply_delta(&a, &GraphDelta::empty(4)).unwrap();
        assert_eq!(b.time_index(), 5);
        assert_eq!(b.edges().collect::<Vec<_>>(), a.edges().collect::<Vec<_>>());
    }

    #[test]
    fn apply_single_insertion() {
        let a = snap(3, 0, &[(0, 1)]);
        let d = GraphDelta::new(0, vec![Edge::new(1, 2).unwrap()], vec![]).unwrap();
        let b = apply_delta(&a, &d).unwrap();
        assert_eq!(b, snap(3, 1, &[(0, 1), (1, 2)]));
    }

    #[test]
    fn apply_inconsistent_delta_fails() {
        let a = snap(3, 0, &[(0, 1)]);
        let bad_remove = GraphDelta::new(0, vec![], vec![Edge::new(1, 2).unwrap()]).unwrap();
        assert!(matches!(apply_delta(&a, &bad_remove), Err(Error::DeltaConsistency(_))));
        let bad_add = GraphDelta::new(0, vec![Edge::new(0, 1).unwrap()], vec![]).unwrap();
        assert!(matches!(apply_delta(&a, &bad_add), Err(Error::DeltaConsistency(_))));
        let e = Edge::new(0, 2).unwrap();
        assert!(GraphDelta::new(0, vec![e], vec![e]).is_err());
        let wrong_time = GraphDelta::empty(3);
        assert!(matches!(apply_delta(&a, &wrong_time), Err(Error::Ordering { .. })));
    }

    #[test]
    fn influence_path_graph() {
        let prev = snap(5, 0, &[(1, 2), (2, 3), (3, 4)]);
        let next = snap(5, 1, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let d = compute_delta(&prev, &next).unwrap();
        let sets = influenced_sets(&next, &d, 3).unwrap();
        assert_eq!(sets.order(1), &[0, 1]);
        assert_eq!(sets.order(2), &[2]);
        assert_eq!(sets.order(3), &[3]);
        assert_eq!(sets.total(), 4);
        assert!(!sets.contains(4));
    }

    #[test]
    fn influence_empty_and_bad_order() {
        let s = snap(3, 0, &[(0, 1)]);
        let sets = influenced_sets(&s, &GraphDelta::empty(0), 2).unwrap();
        assert!(sets.is_empty());
        assert_eq!(sets.max_order(), 2);
        assert!(matches!(
            influenced_sets(&s, &GraphDelta::empty(0), 0),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn node_changes_group_by_node() {
        let d = GraphDelta::new(
            0,
            vec![Edge::new(0, 1).unwrap(), Edge::new(1, 3).unwrap()],
            vec![Edge::new(1, 2).unwrap()],
        )
        .unwrap();
        let changes = d.node_changes();
        let nodes: Vec<_> = changes.iter().map(|c| c.node).collect();
        assert_eq!(nodes, d.endpoints());
        assert_eq!(changes[1].gained, vec![0, 3]);
        assert_eq!(changes[1].lost, vec![2]);
    }

    #[test]
    fn merge_row_cases() {
        let mut out = Vec::new();
        merge_row(&[1, 4, 6], &[4], &[0, 5, 9], &mut out);
        assert_eq!(out, vec![0, 1, 5, 6, 9]);
    }

    #[test]
    fn degree_features() {
        let s = snap(3, 0, &[(0, 1), (0, 2)]);
        let x = FeatureMatrix::degree(&s);
        assert_eq!(x.to_dense(), Matrix::from_rows(&[[2.0], [1.0], [1.0]]));
        let edges: BTreeSet<_> = s.edges().collect();
        assert_eq!(edges.len(), 2);
    }
}
