//! Built-in generated datasets.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{DirectedGraph, Edge, NodeFeatures};
use crate::error::{Error, Result};
use crate::rng;

/// Circulant lattice `i → i + 1, ..., i + k (mod n)`; `k = 1` is a plain ring.
pub fn ring_lattice(n: usize, k: usize) -> Result<DirectedGraph> {
    if k == 0 || k >= n {
        return Err(Error::Contract(format!("ring lattice needs 1 <= k < n, got k={k}, n={n}")));
    }
    Ok(DirectedGraph::from_edges(n, (0..n).flat_map(|i| (1..=k).map(move |d| (i, (i + d) % n))))?.0)
}

pub fn directed_ring(n: usize) -> Result<DirectedGraph> {
    ring_lattice(n, 1)
}

/// Parameters of [`synthetic_digraph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticConfig {
    pub nodes: usize,
    /// Forward edges reach at most this many positions ahead on the ring.
    pub window: usize,
    pub forward_prob: f64,
    /// Probability that a forward edge is also present reversed.
    pub reciprocity: f64,
    /// Uniform random edges, as a fraction of the forward edge count.
    pub noise: f64,
    /// Nodes carry a one-hot of their ring segment.
    pub segments: usize,
    /// Probability that a node's segment label is replaced by a random one.
    pub feature_noise: f64,
}

impl Default for SyntheticConfig {
    /// About a quarter of edges sit in reciprocated pairs.
    fn default() -> Self {
        SyntheticConfig {
            nodes: 500,
            window: 16,
            forward_prob: 0.3,
            reciprocity: 0.35,
            noise: 0.05,
            segments: 16,
            feature_noise: 0.2,
        }
    }
}

/// Dense digraph with a latent circular order: most edges point a short way
/// "forward", some are reciprocated, a few are random. Node features are a
/// noisy one-hot of the node's arc of the circle, so they carry locality but
/// not orientation.
pub fn synthetic_digraph(cfg: &SyntheticConfig, seed: u64) -> Result<(DirectedGraph, NodeFeatures)> {
    let n = cfg.nodes;
    if n < 3 || cfg.window == 0 || cfg.window >= n || cfg.segments == 0 {
        return Err(Error::Config(format!("invalid synthetic graph parameters {cfg:?}")));
    }
    for p in [cfg.forward_prob, cfg.reciprocity, cfg.feature_noise] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("probability {p} outside [0, 1]")));
        }
    }
    let mut r = rng::rng(seed);
    let mut edges: BTreeSet<Edge> = BTreeSet::new();
    let mut forward = 0usize;
    for u in 0..n {
        for d in 1..=cfg.window {
            if r.gen::<f64>() < cfg.forward_prob {
                let v = (u + d) % n;
                edges.insert((u, v));
                forward += 1;
                if r.gen::<f64>() < cfg.reciprocity {
                    edges.insert((v, u));
                }
            }
        }
    }
    let noise = (cfg.noise * forward as f64).round() as usize;
    for _ in 0..noise {
        let (u, v) = (r.gen_range(0..n), r.gen_range(0..n));
        if u != v {
            edges.insert((u, v));
        }
    }
    let g = DirectedGraph::from_edges(n, edges)?.0;
    let s = cfg.segments;
    let mut data = vec![0.0; n * s];
    for u in 0..n {
        let seg = if r.gen::<f64>() < cfg.feature_noise {
            r.gen_range(0..s)
        } else {
            u * s / n
        };
        data[u * s + seg] = 1.0;
    }
    Ok((g, NodeFeatures::new(n, s, data)?))
}

/// Share of edges whose reverse is also an edge, counted per unordered pair.
pub fn bidirectional_ratio(g: &DirectedGraph) -> f64 {
    if g.num_edges() == 0 {
        0.0
    } else {
        g.bidirectional_pairs() as f64 / g.num_edges() as f64
    }
}
