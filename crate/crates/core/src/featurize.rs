//! Node labels and structural edge features.
//!
//! A directionality sequence `s = (s_1, ..., s_n)` over `{in, out}` defines
//! the set `N_s(u)` of nodes reachable from `u` by an `n`-step walk whose
//! `i`-th step follows `s_i`. For an edge `(u, v)` and all sequences up to
//! length `N` (there are `M = 2^{N+1} - 2` of them) the directed feature
//! vector is
//!
//! ```text
//! z_dir = U ‖ I ‖ L ‖ R
//! U[s1,s2] = |N_s1(u) ∪ N_s2(v)|     I[s1,s2] = |N_s1(u) ∩ N_s2(v)|
//! L[s]     = |N_s(u)|                R[s]     = |N_s(v)|
//! ```
//!
//! and the undirected part repeats the union/intersection/size counts over
//! exact `k`-hop shells of the symmetrized graph, `k = 1..N`.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::digraph::{DirectedGraph, Direction, Edge, NodeId};
use crate::error::{Error, Result};
use crate::setops::{intersection_size, normalize};

pub const DEFAULT_RADIUS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectionalitySequence(Vec<Direction>);

impl DirectionalitySequence {
    pub fn new(steps: Vec<Direction>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::Contract("directionality sequence must be non-empty".into()));
        }
        Ok(DirectionalitySequence(steps))
    }

    pub fn steps(&self) -> &[Direction] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for DirectionalitySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|d| d.as_str()).collect();
        f.write_str(&names.join("."))
    }
}

/// Number of sequences of length `1..=n`: `2^{n+1} - 2`.
pub fn sequence_count(max_len: usize) -> usize {
    (1usize << (max_len + 1)) - 2
}

/// All sequences of length `1..=max_len`, length-major, then lexicographic
/// with `in < out`.
pub fn canonical_sequences(max_len: usize) -> Vec<DirectionalitySequence> {
    let mut out = Vec::with_capacity(sequence_count(max_len));
    let mut layer: Vec<Vec<Direction>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|p| {
                [Direction::In, Direction::Out].map(|d| {
                    let mut s = p.clone();
                    s.push(d);
                    s
                })
            })
            .collect();
        out.extend(layer.iter().cloned().map(DirectionalitySequence));
    }
    out
}

pub fn directed_dim(radius: usize) -> usize {
    let m = sequence_count(radius);
    2 * m * m + 2 * m
}

pub fn undirected_dim(radius: usize) -> usize {
    4 * radius
}

/// One step of expansion, optionally ignoring the directed edge `mask`.
fn expand(
    g: &DirectedGraph,
    frontier: &[NodeId],
    dir: Direction,
    mask: Option<Edge>,
) -> Vec<NodeId> {
    let mut next = Vec::new();
    for &w in frontier {
        for &x in g.adj(w, dir) {
            let masked = match (mask, dir) {
                (Some((a, b)), Direction::Out) => w == a && x == b,
                (Some((a, b)), Direction::In) => w == b && x == a,
                (None, _) => false,
            };
            if !masked {
                next.push(x);
            }
        }
    }
    normalize(&mut next);
    next
}

/// `N_s(u)` as a sorted set; `u` itself can be a member.
pub fn sequence_neighborhood(
    g: &DirectedGraph,
    u: NodeId,
    s: &DirectionalitySequence,
) -> Result<Vec<NodeId>> {
    g.neighbors(u, Direction::Out)?;
    Ok(s.steps()
        .iter()
        .fold(vec![u], |frontier, &d| expand(g, &frontier, d, None)))
}

/// All `M` sequence neighborhoods of `u` in canonical order, sharing prefixes.
fn all_sequence_neighborhoods(
    g: &DirectedGraph,
    u: NodeId,
    radius: usize,
    mask: Option<Edge>,
) -> Vec<Vec<NodeId>> {
    let mut out = Vec::with_capacity(sequence_count(radius));
    let mut layer = vec![vec![u]];
    for _ in 0..radius {
        layer = layer
            .iter()
            .flat_map(|f| [Direction::In, Direction::Out].map(|d| expand(g, f, d, mask)))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Exact shells `1..=radius` of the symmetrized graph, treating `mask` as
/// absent (the undirected link survives when the reverse edge exists).
fn undirected_shells(
    g: &DirectedGraph,
    u: NodeId,
    radius: usize,
    mask: Option<Edge>,
) -> Vec<Vec<NodeId>> {
    let mask = mask.filter(|&(a, b)| !g.has_edge(b, a));
    let blocked = |w: NodeId, x: NodeId| {
        mask.is_some_and(|(a, b)| (w == a && x == b) || (w == b && x == a))
    };
    let mut seen = vec![false; g.num_nodes()];
    seen[u] = true;
    let mut frontier = vec![u];
    let mut shells = Vec::with_capacity(radius);
    for _ in 0..radius {
        let mut next = Vec::new();
        for &w in &frontier {
            for &x in g.out_neighbors(w).iter().chain(g.in_neighbors(w)) {
                if !seen[x] && !blocked(w, x) {
                    seen[x] = true;
                    next.push(x);
                }
            }
        }
        next.sort_unstable();
        shells.push(next.clone());
        frontier = next;
    }
    shells
}

fn directed_block(left: &[Vec<NodeId>], right: &[Vec<NodeId>]) -> Vec<f64> {
    let m = left.len();
    let mut union = Vec::with_capacity(m * m);
    let mut inter = Vec::with_capacity(m * m);
    for a in left {
        for b in right {
            let i = intersection_size(a, b);
            inter.push(i as f64);
            union.push((a.len() + b.len() - i) as f64);
        }
    }
    let mut z = union;
    z.extend(inter);
    z.extend(left.iter().map(|s| s.len() as f64));
    z.extend(right.iter().map(|s| s.len() as f64));
    z
}

fn undirected_block(left: &[Vec<NodeId>], right: &[Vec<NodeId>]) -> Vec<f64> {
    let pairs: Vec<(usize, usize)> = left
        .iter()
        .zip(right)
        .map(|(a, b)| (a.len() + b.len(), intersection_size(a, b)))
        .collect();
    let mut z: Vec<f64> = pairs.iter().map(|&(s, i)| (s - i) as f64).collect();
    z.extend(pairs.iter().map(|&(_, i)| i as f64));
    z.extend(left.iter().map(|s| s.len() as f64));
    z.extend(right.iter().map(|s| s.len() as f64));
    z
}

fn check_pair(g: &DirectedGraph, u: NodeId, v: NodeId, radius: usize) -> Result<()> {
    g.neighbors(u, Direction::Out)?;
    g.neighbors(v, Direction::Out)?;
    if u == v {
        return Err(Error::Domain(format!("edge features undefined for u = v = {u}")));
    }
    if radius == 0 {
        return Err(Error::Contract("feature radius must be >= 1".into()));
    }
    Ok(())
}

/// `U ‖ I ‖ L ‖ R` over all directionality sequences up to length `radius`.
pub fn directed_edge_features(
    g: &DirectedGraph,
    u: NodeId,
    v: NodeId,
    radius: usize,
) -> Result<Vec<f64>> {
    check_pair(g, u, v, radius)?;
    Ok(directed_block(
        &all_sequence_neighborhoods(g, u, radius, None),
        &all_sequence_neighborhoods(g, v, radius, None),
    ))
}

/// Union, intersection and size counts of exact `k`-hop shells on the
/// symmetrized graph, `k = 1..=radius`.
pub fn undirected_edge_features(
    g: &DirectedGraph,
    u: NodeId,
    v: NodeId,
    radius: usize,
) -> Result<Vec<f64>> {
    check_pair(g, u, v, radius)?;
    Ok(undirected_block(
        &undirected_shells(g, u, radius, None),
        &undirected_shells(g, v, radius, None),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeStructuralFeatures {
    pub z_dir: Vec<f64>,
    pub z_undir: Vec<f64>,
}

impl EdgeStructuralFeatures {
    /// `z_dir ‖ z_undir`.
    pub fn z(&self) -> Vec<f64> {
        let mut z = self.z_dir.clone();
        z.extend_from_slice(&self.z_undir);
        z
    }

    pub fn dim(&self) -> usize {
        self.z_dir.len() + self.z_undir.len()
    }
}

pub fn edge_features(
    g: &DirectedGraph,
    u: NodeId,
    v: NodeId,
    radius: usize,
) -> Result<EdgeStructuralFeatures> {
    Ok(EdgeStructuralFeatures {
        z_dir: directed_edge_features(g, u, v, radius)?,
        z_undir: undirected_edge_features(g, u, v, radius)?,
    })
}

/// Column names of `z`, matching the block layout.
pub fn feature_column_names(radius: usize) -> Vec<String> {
    let seqs = canonical_sequences(radius);
    let mut names = Vec::with_capacity(directed_dim(radius) + undirected_dim(radius));
    for block in ["U", "I"] {
        for a in &seqs {
            for b in &seqs {
                names.push(format!("{block}[{a}|{b}]"));
            }
        }
    }
    names.extend(seqs.iter().map(|s| format!("L[{s}]")));
    names.extend(seqs.iter().map(|s| format!("R[{s}]")));
    for block in ["Uu", "Iu", "Lu", "Ru"] {
        names.extend((1..=radius).map(|k| format!("{block}[{k}]")));
    }
    names
}

/// Writes one row per edge: `u,v,` followed by `z` under canonical headers.
pub fn write_features_csv<W: Write>(
    w: W,
    radius: usize,
    rows: &[(Edge, EdgeStructuralFeatures)],
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["u".to_string(), "v".to_string()];
    header.extend(feature_column_names(radius));
    wtr.write_record(&header)?;
    for ((u, v), f) in rows {
        let mut rec = vec![u.to_string(), v.to_string()];
        rec.extend(f.z().iter().map(|x| x.to_string()));
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

struct NodeNeighborhoods {
    sequences: Vec<Vec<NodeId>>,
    shells: Vec<Vec<NodeId>>,
}

/// Per-graph feature extractor with node-level and edge-level caches.
///
/// Node neighborhoods are computed once per node. Edge vectors are cached
/// only through [`cached`](Self::cached) and [`masked`](Self::masked); the
/// caches tolerate concurrent insert-if-absent.
pub struct StructuralFeaturizer {
    graph: Arc<DirectedGraph>,
    radius: usize,
    nodes: Vec<OnceLock<NodeNeighborhoods>>,
    edges: RwLock<HashMap<(Edge, bool), Arc<EdgeStructuralFeatures>>>,
}

impl StructuralFeaturizer {
    pub fn new(graph: Arc<DirectedGraph>, radius: usize) -> Result<Self> {
        if radius == 0 {
            return Err(Error::Contract("feature radius must be >= 1".into()));
        }
        let n = graph.num_nodes();
        Ok(StructuralFeaturizer {
            graph,
            radius,
            nodes: (0..n).map(|_| OnceLock::new()).collect(),
            edges: RwLock::new(HashMap::new()),
        })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    fn node(&self, u: NodeId) -> &NodeNeighborhoods {
        self.nodes[u].get_or_init(|| NodeNeighborhoods {
            sequences: all_sequence_neighborhoods(&self.graph, u, self.radius, None),
            shells: undirected_shells(&self.graph, u, self.radius, None),
        })
    }

    /// Features of `(u, v)` from the node caches; nothing stored per edge.
    pub fn features(&self, u: NodeId, v: NodeId) -> Result<EdgeStructuralFeatures> {
        check_pair(&self.graph, u, v, self.radius)?;
        let (a, b) = (self.node(u), self.node(v));
        Ok(EdgeStructuralFeatures {
            z_dir: directed_block(&a.sequences, &b.sequences),
            z_undir: undirected_block(&a.shells, &b.shells),
        })
    }

    fn lookup_or_insert(
        &self,
        key: (Edge, bool),
        compute: impl FnOnce() -> Result<EdgeStructuralFeatures>,
    ) -> Result<Arc<EdgeStructuralFeatures>> {
        if let Some(f) = self.edges.read().expect("feature cache poisoned").get(&key) {
            return Ok(Arc::clone(f));
        }
        let f = Arc::new(compute()?);
        let mut map = self.edges.write().expect("feature cache poisoned");
        Ok(Arc::clone(map.entry(key).or_insert(f)))
    }

    /// Cached features of `(u, v)`.
    pub fn cached(&self, u: NodeId, v: NodeId) -> Result<Arc<EdgeStructuralFeatures>> {
        self.lookup_or_insert(((u, v), false), || self.features(u, v))
    }

    /// Features of `(u, v)` computed as if the edge `u → v` were absent.
    /// Used for training positives so they look like held-out positives.
    pub fn masked(&self, u: NodeId, v: NodeId) -> Result<Arc<EdgeStructuralFeatures>> {
        if !self.graph.has_edge(u, v) {
            return self.cached(u, v);
        }
        self.lookup_or_insert(((u, v), true), || {
            check_pair(&self.graph, u, v, self.radius)?;
            let g = &self.graph;
            let mask = Some((u, v));
            Ok(EdgeStructuralFeatures {
                z_dir: directed_block(
                    &all_sequence_neighborhoods(g, u, self.radius, mask),
                    &all_sequence_neighborhoods(g, v, self.radius, mask),
                ),
                z_undir: undirected_block(
                    &undirected_shells(g, u, self.radius, mask),
                    &undirected_shells(g, v, self.radius, mask),
                ),
            })
        })
    }

    pub fn cache_len(&self) -> usize {
        self.edges.read().expect("feature cache poisoned").len()
    }
}

/// Distance-encoding mode: truncated hop counts or log-transformed distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum LabelMode {
    DeK(usize),
    DeLog,
}

impl FromStr for LabelMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "delog" {
            return Ok(LabelMode::DeLog);
        }
        s.strip_prefix("de")
            .and_then(|k| k.parse().ok())
            .map(LabelMode::DeK)
            .ok_or_else(|| Error::Config(format!("unknown label mode {s:?} (want deK or delog)")))
    }
}

impl TryFrom<String> for LabelMode {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<LabelMode> for String {
    fn from(m: LabelMode) -> String {
        m.to_string()
    }
}

impl fmt::Display for LabelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelMode::DeK(k) => write!(f, "de{k}"),
            LabelMode::DeLog => f.write_str("delog"),
        }
    }
}

/// Per-node distance labels, `num_nodes × dim`, landmark-major columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeLabelMatrix {
    pub num_nodes: usize,
    pub dim: usize,
    pub data: Vec<f64>,
    pub mode: LabelMode,
    pub directed: bool,
    pub landmarks: Vec<NodeId>,
}

impl NodeLabelMatrix {
    pub fn row(&self, u: NodeId) -> &[f64] {
        &self.data[u * self.dim..(u + 1) * self.dim]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.num_nodes).map(|u| self.data[u * self.dim + c]).collect()
    }
}

/// Distance labels relative to `landmarks`.
///
/// Directed labels hold `[d(t, v), d(v, t)]` per landmark `t`; undirected
/// labels hold one symmetrized distance. `de-k` truncates at `k` (unreachable
/// maps to `k`); `de-log` emits `ln(1 + d)` with unreachable mapped to
/// `ln(1 + num_nodes)`.
pub fn distance_encoding_labels(
    g: &DirectedGraph,
    landmarks: &[NodeId],
    mode: LabelMode,
    directed: bool,
) -> Result<NodeLabelMatrix> {
    if landmarks.is_empty() {
        return Err(Error::Contract("at least one landmark required".into()));
    }
    let n = g.num_nodes();
    for &t in landmarks {
        g.neighbors(t, Direction::Out)?;
    }
    let depth = match mode {
        LabelMode::DeK(k) => k,
        LabelMode::DeLog => usize::MAX,
    };
    let encode = |d: Option<usize>| -> f64 {
        match (mode, d) {
            (LabelMode::DeK(k), Some(d)) => d.min(k) as f64,
            (LabelMode::DeK(k), None) => k as f64,
            (LabelMode::DeLog, Some(d)) => (1.0 + d as f64).ln(),
            (LabelMode::DeLog, None) => (1.0 + n as f64).ln(),
        }
    };
    let sym = (!directed).then(|| g.symmetrize());
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for &t in landmarks {
        match &sym {
            None => {
                for dir in [Direction::Out, Direction::In] {
                    let d = g.bfs_distances(t, dir, depth);
                    columns.push(d.into_iter().map(encode).collect());
                }
            }
            Some(s) => {
                let d = s.bfs_distances(t, Direction::Out, depth);
                columns.push(d.into_iter().map(encode).collect());
            }
        }
    }
    let dim = columns.len();
    let mut data = vec![0.0; n * dim];
    for (c, col) in columns.iter().enumerate() {
        for (u, &x) in col.iter().enumerate() {
            data[u * dim + c] = x;
        }
    }
    Ok(NodeLabelMatrix {
        num_nodes: n,
        dim,
        data,
        mode,
        directed,
        landmarks: landmarks.to_vec(),
    })
}

/// Deterministic landmark choice: alternately the highest remaining
/// out-degree node and the highest remaining in-degree node, ties broken by
/// smallest id.
pub fn select_landmarks(g: &DirectedGraph, k: usize) -> Result<Vec<NodeId>> {
    let n = g.num_nodes();
    if k == 0 || k > n {
        return Err(Error::Contract(format!(
            "cannot select {k} landmarks from {n} nodes"
        )));
    }
    let ranked = |deg: &dyn Fn(NodeId) -> usize| {
        let mut ids: Vec<NodeId> = (0..n).collect();
        ids.sort_by_key(|&u| (std::cmp::Reverse(deg(u)), u));
        ids
    };
    let by_out = ranked(&|u| g.out_degree(u));
    let by_in = ranked(&|u| g.in_degree(u));
    let mut chosen = Vec::with_capacity(k);
    let mut taken = vec![false; n];
    let (mut i, mut j) = (0, 0);
    while chosen.len() < k {
        let (list, cursor) = if chosen.len() % 2 == 0 {
            (&by_out, &mut i)
        } else {
            (&by_in, &mut j)
        };
        while taken[list[*cursor]] {
            *cursor += 1;
        }
        let u = list[*cursor];
        taken[u] = true;
        chosen.push(u);
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Direction::{In, Out};

    fn g1() -> DirectedGraph {
        DirectedGraph::from_edges(4, [(0, 1), (1, 2), (2, 0), (0, 3)])
            .unwrap()
            .0
    }

    fn ring(n: usize) -> DirectedGraph {
        DirectedGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
            .unwrap()
            .0
    }

    fn seq(steps: &[Direction]) -> DirectionalitySequence {
        DirectionalitySequence::new(steps.to_vec()).unwrap()
    }

    #[test]
    fn canonical_order() {
        let names: Vec<String> = canonical_sequences(2).iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["in", "out", "in.in", "in.out", "out.in", "out.out"]);
        assert_eq!(sequence_count(3), 14);
        assert!(DirectionalitySequence::new(vec![]).is_err());
    }

    #[test]
    fn sequence_neighborhood_g1() {
        let g = g1();
        assert_eq!(sequence_neighborhood(&g, 0, &seq(&[Out])).unwrap(), vec![1, 3]);
        assert_eq!(sequence_neighborhood(&g, 0, &seq(&[Out, Out])).unwrap(), vec![2]);
        assert_eq!(sequence_neighborhood(&g, 0, &seq(&[In, Out])).unwrap(), vec![0]);
    }

    #[test]
    fn dimensions() {
        let g = g1();
        assert_eq!(directed_edge_features(&g, 0, 1, 1).unwrap().len(), 12);
        assert_eq!(directed_edge_features(&g, 0, 1, 2).unwrap().len(), 84);
        assert_eq!(edge_features(&g, 0, 1, 1).unwrap().dim(), 16);
        assert_eq!(edge_features(&g, 0, 1, 2).unwrap().dim(), 92);
        assert_eq!(feature_column_names(2).len(), 92);
        assert!(matches!(edge_features(&g, 1, 1, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn undirected_features_g1() {
        // N(1) = {0, 2}, N(3) = {0} on the symmetrized G1.
        let g = g1();
        assert_eq!(undirected_edge_features(&g, 1, 3, 1).unwrap(), vec![2.0, 1.0, 2.0, 1.0]);
        assert_eq!(undirected_edge_features(&g, 3, 1, 1).unwrap(), vec![2.0, 1.0, 1.0, 2.0]);
    }

    #[test]
    fn single_edge_graph() {
        let g = DirectedGraph::from_edges(2, [(0, 1)]).unwrap().0;
        let z = edge_features(&g, 0, 1, 1).unwrap().z();
        assert!(z.iter().all(|x| x.is_finite() && [0.0, 1.0, 2.0].contains(x)));
    }

    #[test]
    fn featurizer_matches_free_functions() {
        let g = Arc::new(g1());
        let f = StructuralFeaturizer::new(Arc::clone(&g), 2).unwrap();
        for (u, v) in [(0, 1), (1, 3), (3, 2)] {
            assert_eq!(f.features(u, v).unwrap(), edge_features(&g, u, v, 2).unwrap());
            assert_eq!(*f.cached(u, v).unwrap(), edge_features(&g, u, v, 2).unwrap());
        }
        assert_eq!(f.cache_len(), 3);
    }

    #[test]
    fn masked_features_equal_features_without_the_edge() {
        let g = g1();
        let f = StructuralFeaturizer::new(Arc::new(g.clone()), 2).unwrap();
        for &(u, v) in g.edges() {
            let rest = g.edges().iter().copied().filter(|&e| e != (u, v));
            let without = DirectedGraph::from_edges(4, rest).unwrap().0;
            assert_eq!(*f.masked(u, v).unwrap(), edge_features(&without, u, v, 2).unwrap());
        }
    }

    #[test]
    fn labels_on_ring() {
        let g = ring(4);
        let l = distance_encoding_labels(&g, &[0], LabelMode::DeK(3), true).unwrap();
        assert_eq!(l.dim, 2);
        assert_eq!(l.column(0), vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(l.column(1), vec![0.0, 3.0, 2.0, 1.0]);
        let l = distance_encoding_labels(&g, &[0], LabelMode::DeK(2), true).unwrap();
        assert_eq!(l.column(0), vec![0.0, 1.0, 2.0, 2.0]);
        assert_eq!(l.column(1), vec![0.0, 2.0, 2.0, 1.0]);
        let l = distance_encoding_labels(&g, &[0, 2], LabelMode::DeLog, false).unwrap();
        assert_eq!(l.dim, 2);
        assert_eq!(l.row(0)[0], 0.0);
        assert_eq!(l.row(2)[1], 0.0);
        assert!((l.row(1)[0] - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn delog_unreachable_sentinel() {
        let g = DirectedGraph::from_edges(3, [(0, 1)]).unwrap().0;
        let l = distance_encoding_labels(&g, &[0], LabelMode::DeLog, true).unwrap();
        assert_eq!(l.row(2), &[4f64.ln(), 4f64.ln()]);
        assert!(distance_encoding_labels(&g, &[7], LabelMode::DeLog, true).is_err());
        assert!(distance_encoding_labels(&g, &[], LabelMode::DeLog, true).is_err());
    }

    #[test]
    fn label_mode_strings() {
        assert_eq!("de15".parse::<LabelMode>().unwrap(), LabelMode::DeK(15));
        assert_eq!("delog".parse::<LabelMode>().unwrap(), LabelMode::DeLog);
        assert!("dex".parse::<LabelMode>().is_err());
        assert_eq!(serde_json::to_string(&LabelMode::DeK(3)).unwrap(), "\"de3\"");
    }

    #[test]
    fn landmarks_g1() {
        let g = g1();
        assert_eq!(select_landmarks(&g, 2).unwrap(), vec![0, 1]);
        assert_eq!(select_landmarks(&g, 1).unwrap(), vec![0]);
        assert_eq!(select_landmarks(&g, 4).unwrap().len(), 4);
        assert!(select_landmarks(&g, 5).is_err());
        let shuffled = DirectedGraph::from_edges(4, [(0, 3), (2, 0), (1, 2), (0, 1)])
            .unwrap()
            .0;
        assert_eq!(select_landmarks(&shuffled, 3).unwrap(), select_landmarks(&g, 3).unwrap());
    }
}
