//! Train/valid/test splits, negative sampling and ranking candidates.
//!
//! All randomness flows through [`crate::rng`]: fold `i` of a split with base
//! seed `s` uses `derive_seed(s, [i])`, and the candidate list of a positive
//! `(u, v)` uses `derive_seed(seed, [u, v])`.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{DirectedGraph, Edge, NodeId};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NegativeMode {
    /// Ordered non-edges: `(v, u)` is a valid negative when only `(u, v)` exists.
    Directed,
    /// Unordered pairs with no edge in either direction.
    Undirected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitRatios {
    pub train: f64,
    pub valid: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.7,
            valid: 0.1,
            test: 0.2,
        }
    }
}

impl SplitRatios {
    pub fn new(train: f64, valid: f64, test: f64) -> Result<Self> {
        let r = SplitRatios { train, valid, test };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.valid, self.test];
        if parts.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Contract(format!("split ratios out of [0,1]: {parts:?}")));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Contract(format!("split ratios must sum to 1: {parts:?}")));
        }
        Ok(())
    }
}

/// One fold: positives partitioned into train/valid/test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSplit {
    pub train_pos: Vec<Edge>,
    pub valid_pos: Vec<Edge>,
    pub test_pos: Vec<Edge>,
    pub seed: u64,
    pub ratios: SplitRatios,
}

impl EdgeSplit {
    /// Message-passing graph built from the training positives only.
    pub fn train_graph(&self, num_nodes: usize) -> Result<DirectedGraph> {
        Ok(DirectedGraph::from_edges(num_nodes, self.train_pos.iter().copied())?.0)
    }
}

/// Shuffles the edges of `g` once per fold and partitions them by `ratios`.
///
/// Valid and test sizes are `round(|E| * ratio)`; train takes the rest.
pub fn make_splits(
    g: &DirectedGraph,
    ratios: SplitRatios,
    seed: u64,
    folds: usize,
) -> Result<Vec<EdgeSplit>> {
    ratios.validate()?;
    if folds == 0 {
        return Err(Error::Contract("folds must be >= 1".into()));
    }
    let m = g.num_edges();
    let n_valid = (m as f64 * ratios.valid).round() as usize;
    let n_test = ((m as f64 * ratios.test).round() as usize).min(m - n_valid.min(m));
    if n_test == 0 {
        return Err(Error::Contract(format!(
            "split of {m} edges with test ratio {} has no test edges",
            ratios.test
        )));
    }
    (0..folds)
        .map(|fold| {
            let fold_seed = rng::derive_seed(seed, &[fold as u64]);
            let mut edges = g.edges().to_vec();
            edges.shuffle(&mut rng::rng(fold_seed));
            let test_pos = edges.split_off(m - n_test);
            let valid_pos = edges.split_off(m - n_test - n_valid);
            Ok(EdgeSplit {
                train_pos: edges,
                valid_pos,
                test_pos,
                seed: fold_seed,
                ratios,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegativeSet {
    pub edges: Vec<Edge>,
    pub mode: NegativeMode,
    pub seed: u64,
}

#[inline]
fn unordered(e: Edge) -> Edge {
    (e.0.min(e.1), e.0.max(e.1))
}

/// Rejection-samples `count` node pairs that are not edges of `g` under
/// `mode` and not in `exclude`. Gives up after `1000 * count` draws.
pub fn sample_negatives(
    g: &DirectedGraph,
    count: usize,
    mode: NegativeMode,
    seed: u64,
    exclude: &HashSet<Edge>,
) -> Result<NegativeSet> {
    if count == 0 {
        return Err(Error::Contract("negative count must be >= 1".into()));
    }
    let n = g.num_nodes();
    let max_attempts = 1000 * count;
    let mut r = rng::rng(seed);
    let mut seen: HashSet<Edge> = HashSet::with_capacity(count);
    let mut edges = Vec::with_capacity(count);
    let mut attempts = 0;
    while edges.len() < count {
        if attempts >= max_attempts || n < 2 {
            return Err(Error::Exhausted {
                attempts,
                accepted: edges.len(),
                requested: count,
            });
        }
        attempts += 1;
        let u = r.gen_range(0..n);
        let v = r.gen_range(0..n);
        if u == v || g.has_edge(u, v) || exclude.contains(&(u, v)) {
            continue;
        }
        let key = match mode {
            NegativeMode::Directed => (u, v),
            NegativeMode::Undirected => {
                if g.has_edge(v, u) || exclude.contains(&(v, u)) {
                    continue;
                }
                unordered((u, v))
            }
        };
        if seen.insert(key) {
            edges.push((u, v));
        }
    }
    Ok(NegativeSet { edges, mode, seed })
}

/// Corrupted-target candidates for one positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub candidates: Vec<Edge>,
    /// Fewer than the requested number of valid corruptions existed.
    pub shortfall: bool,
}

/// Samples `count` distinct `(u, v')` with `v' ∉ N_out(u)`, `v' ≠ v`,
/// `v' ≠ u`, without replacement.
pub fn eval_candidates(
    g: &DirectedGraph,
    positive: Edge,
    count: usize,
    seed: u64,
) -> Result<CandidateSet> {
    let (u, v) = positive;
    if count == 0 {
        return Err(Error::Contract("candidate count must be >= 1".into()));
    }
    let n = g.num_nodes();
    for id in [u, v] {
        if id >= n {
            return Err(Error::NodeRange { id, num_nodes: n });
        }
    }
    let out = g.out_neighbors(u);
    let mut pool: Vec<NodeId> = (0..n)
        .filter(|&w| w != u && w != v && out.binary_search(&w).is_err())
        .collect();
    let shortfall = pool.len() < count;
    if shortfall {
        log::debug!(
            "positive ({u}, {v}): only {} valid corruptions for {count} requested",
            pool.len()
        );
    } else {
        let mut r = rng::derived_rng(seed, &[u as u64, v as u64]);
        let (chosen, _) = pool.partial_shuffle(&mut r, count);
        let mut chosen = chosen.to_vec();
        chosen.sort_unstable();
        pool = chosen;
    }
    Ok(CandidateSet {
        candidates: pool.into_iter().map(|w| (u, w)).collect(),
        shortfall,
    })
}
