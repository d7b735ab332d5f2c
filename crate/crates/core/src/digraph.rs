//! Immutable directed graph stored as a pair of CSR arrays.
//!
//! Both the out-adjacency and the in-adjacency are materialized so that
//! `N_out(u)` and `N_in(u)` are contiguous sorted slices. Node ids are dense
//! `0..num_nodes`. Self-loops are dropped and parallel edges collapsed at
//! construction, so the adjacency is a binary matrix.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type Edge = (NodeId, NodeId);

/// Edge orientation relative to a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::In => "in",
            Direction::Out => "out",
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Direction::In => Direction::Out,
            Direction::Out => Direction::In,
        }
    }
}

/// Which way a distance query walks: `Forward` measures `d(s, t)`,
/// `Backward` measures `d(t, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Walk {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Csr {
    /// Builds rows from `(row, col)` pairs that are already sorted and unique.
    fn from_sorted(num_rows: usize, pairs: impl Iterator<Item = Edge>) -> Self {
        let mut offsets = vec![0usize; num_rows + 1];
        let mut targets = Vec::new();
        for (r, c) in pairs {
            offsets[r + 1] += 1;
            targets.push(c);
        }
        for i in 0..num_rows {
            offsets[i + 1] += offsets[i];
        }
        Csr { offsets, targets }
    }

    #[inline]
    fn row(&self, u: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }
}

/// Counters reported by edge-list ingestion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    num_nodes: usize,
    edges: Vec<Edge>,
    out_csr: Csr,
    in_csr: Csr,
    symmetric: bool,
}

impl DirectedGraph {
    /// Builds a graph from an edge iterator, dropping self-loops and
    /// collapsing duplicates.
    pub fn from_edges(
        num_nodes: usize,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<(Self, LoadReport)> {
        let mut report = LoadReport::default();
        let mut list = Vec::new();
        for (u, v) in edges {
            for id in [u, v] {
                if id >= num_nodes {
                    return Err(Error::NodeRange { id, num_nodes });
                }
            }
            if u == v {
                report.self_loops_dropped += 1;
                continue;
            }
            list.push((u, v));
        }
        list.sort_unstable();
        let before = list.len();
        list.dedup();
        report.duplicates_collapsed = before - list.len();
        if report.self_loops_dropped > 0 {
            log::warn!("dropped {} self-loop(s)", report.self_loops_dropped);
        }
        Ok((Self::from_sorted_unique(num_nodes, list), report))
    }

    fn from_sorted_unique(num_nodes: usize, edges: Vec<Edge>) -> Self {
        let out_csr = Csr::from_sorted(num_nodes, edges.iter().copied());
        let mut rev: Vec<Edge> = edges.iter().map(|&(u, v)| (v, u)).collect();
        rev.sort_unstable();
        let in_csr = Csr::from_sorted(num_nodes, rev.into_iter());
        let symmetric = out_csr == in_csr;
        DirectedGraph {
            num_nodes,
            edges,
            out_csr,
            in_csr,
            symmetric,
        }
    }

    /// Parses a whitespace-separated `src dst` edge list. Lines starting with
    /// `#` and blank lines are skipped.
    pub fn load_edge_list<R: BufRead>(
        reader: R,
        num_nodes: Option<usize>,
    ) -> Result<(Self, LoadReport)> {
        let mut edges = Vec::new();
        let mut max_id: Option<usize> = None;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected \"src dst\", got {trimmed:?}"),
                });
            };
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|e| Error::Parse {
                    line: lineno,
                    message: format!("bad node id {s:?}: {e}"),
                })
            };
            let (u, v) = (parse(a)?, parse(b)?);
            max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
            edges.push((u, v));
        }
        let n = match (num_nodes, max_id) {
            (Some(n), Some(m)) if m >= n => {
                return Err(Error::NodeRange {
                    id: m,
                    num_nodes: n,
                })
            }
            (Some(n), _) => n,
            (None, Some(m)) => m + 1,
            (None, None) => 0,
        };
        Self::from_edges(n, edges)
    }

    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        for &(u, v) in &self.edges {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges in ascending `(src, dst)` order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    fn check(&self, u: NodeId) -> Result<()> {
        if u < self.num_nodes {
            Ok(())
        } else {
            Err(Error::NodeRange {
                id: u,
                num_nodes: self.num_nodes,
            })
        }
    }

    /// Sorted neighbor list of `u` in the given direction.
    pub fn neighbors(&self, u: NodeId, dir: Direction) -> Result<&[NodeId]> {
        self.check(u)?;
        Ok(self.adj(u, dir))
    }

    /// Unchecked variant of [`neighbors`](Self::neighbors); panics when `u` is out of range.
    #[inline]
    pub fn adj(&self, u: NodeId, dir: Direction) -> &[NodeId] {
        match dir {
            Direction::Out => self.out_csr.row(u),
            Direction::In => self.in_csr.row(u),
        }
    }

    #[inline]
    pub fn out_neighbors(&self, u: NodeId) -> &[NodeId] {
        self.out_csr.row(u)
    }

    #[inline]
    pub fn in_neighbors(&self, u: NodeId) -> &[NodeId] {
        self.in_csr.row(u)
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.out_csr.row(u).len()
    }

    pub fn in_degree(&self, u: NodeId) -> usize {
        self.in_csr.row(u).len()
    }

    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.num_nodes && self.out_csr.row(u).binary_search(&v).is_ok()
    }

    /// Union of the graph with its reverse.
    pub fn symmetrize(&self) -> DirectedGraph {
        if self.symmetric {
            return self.clone();
        }
        let mut all: Vec<Edge> = self
            .edges
            .iter()
            .flat_map(|&(u, v)| [(u, v), (v, u)])
            .collect();
        all.sort_unstable();
        all.dedup();
        Self::from_sorted_unique(self.num_nodes, all)
    }

    /// Number of unordered pairs connected in both directions.
    pub fn bidirectional_pairs(&self) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| u < v && self.has_edge(v, u))
            .count()
    }

    /// Single-source BFS distances along `dir`, stopping after `max_depth` hops.
    /// Unreached nodes are `None`.
    pub fn bfs_distances(
        &self,
        source: NodeId,
        dir: Direction,
        max_depth: usize,
    ) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_nodes];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(w) = queue.pop_front() {
            let d = dist[w].unwrap_or(0);
            if d >= max_depth {
                continue;
            }
            for &x in self.adj(w, dir) {
                if dist[x].is_none() {
                    dist[x] = Some(d + 1);
                    queue.push_back(x);
                }
            }
        }
        dist
    }

    /// `min(delta, d(s, t))` for `Forward`, `min(delta, d(t, s))` for
    /// `Backward`. Unreachable pairs report `delta`.
    pub fn truncated_distance(
        &self,
        s: NodeId,
        t: NodeId,
        delta: usize,
        walk: Walk,
    ) -> Result<usize> {
        self.check(s)?;
        self.check(t)?;
        if s == t || delta == 0 {
            return Ok(0);
        }
        // BFS from s along out-edges, or from s along in-edges to get d(t, s).
        let dir = match walk {
            Walk::Forward => Direction::Out,
            Walk::Backward => Direction::In,
        };
        let mut seen = vec![false; self.num_nodes];
        seen[s] = true;
        let mut frontier = vec![s];
        let mut depth = 0;
        while !frontier.is_empty() && depth < delta {
            depth += 1;
            let mut next = Vec::new();
            for &w in &frontier {
                for &x in self.adj(w, dir) {
                    if x == t {
                        return Ok(depth);
                    }
                    if !seen[x] {
                        seen[x] = true;
                        next.push(x);
                    }
                }
            }
            frontier = next;
        }
        Ok(delta)
    }

    /// Nodes at exactly `k` hops from `u`; the graph must be symmetric.
    pub fn bfs_shell(&self, u: NodeId, k: usize) -> Result<Vec<NodeId>> {
        self.check(u)?;
        if !self.symmetric {
            return Err(Error::Contract(
                "bfs_shell requires a symmetric graph".into(),
            ));
        }
        if k == 0 {
            return Err(Error::Contract("bfs_shell requires k >= 1".into()));
        }
        Ok(self.shells(u, k).pop().unwrap_or_default())
    }

    /// Shells `1..=max_k` around `u` from one BFS. Each shell is sorted.
    pub(crate) fn shells(&self, u: NodeId, max_k: usize) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.num_nodes];
        seen[u] = true;
        let mut out = Vec::with_capacity(max_k);
        let mut frontier = vec![u];
        for _ in 0..max_k {
            let mut next = Vec::new();
            for &w in &frontier {
                for &x in self.out_neighbors(w) {
                    if !seen[x] {
                        seen[x] = true;
                        next.push(x);
                    }
                }
            }
            next.sort_unstable();
            out.push(next.clone());
            frontier = next;
        }
        out
    }
}

/// Dense per-node raw features, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeFeatures {
    num_nodes: usize,
    dim: usize,
    data: Vec<f64>,
}

impl NodeFeatures {
    pub fn new(num_nodes: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != num_nodes * dim {
            return Err(Error::Shape(format!(
                "feature buffer has {} values, expected {num_nodes} x {dim}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite feature at node {}, column {}",
                i / dim.max(1),
                i % dim.max(1)
            )));
        }
        Ok(NodeFeatures {
            num_nodes,
            dim,
            data,
        })
    }

    /// Featureless matrix (`dim = 0`).
    pub fn empty(num_nodes: usize) -> Self {
        NodeFeatures {
            num_nodes,
            dim: 0,
            data: Vec::new(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, u: NodeId) -> &[f64] {
        &self.data[u * self.dim..(u + 1) * self.dim]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Reads rows of `v1,v2,...` (no id column); row `i` belongs to node `i`.
    pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(reader);
        let mut data = Vec::new();
        let mut dim = None;
        let mut rows = 0;
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if dim.is_some_and(|d| d != rec.len()) {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected {} columns, got {}", dim.unwrap_or(0), rec.len()),
                });
            }
            dim = Some(rec.len());
            for field in rec.iter() {
                data.push(field.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: i + 1,
                    message: format!("bad feature value {field:?}: {e}"),
                })?);
            }
            rows += 1;
        }
        Self::new(rows, dim.unwrap_or(0), data)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for u in 0..self.num_nodes {
            wtr.write_record(self.row(u).iter().map(|x| x.to_string()))?;
        }
        wtr.flush()?;
        Ok(())
    }
}
