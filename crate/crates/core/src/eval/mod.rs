//! Ranking metrics and the evaluation protocol.
//!
//! Each test positive `(u, v)` is ranked against corrupted targets `(u, v')`
//! drawn by [`sampling::eval_candidates`]. Ranks may be fractional under the
//! `Mid` tie policy.

mod expressivity;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::digraph::{DirectedGraph, Edge};
use crate::error::{Error, Result};
use crate::sampling;

pub use expressivity::{expressivity_check_k4, k4_fixture, ExpressivityReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    Optimistic,
    #[default]
    Mid,
    Pessimistic,
}

/// Rank of a positive among negatives: `1 + #{s > pos}` plus `0`, `t/2` or
/// `t` for `t` tied negatives depending on the policy.
pub fn rank_of_positive(pos_score: f64, neg_scores: &[f64], tie: TiePolicy) -> Result<f64> {
    if pos_score.is_nan() || neg_scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Numeric("NaN score in ranking".into()));
    }
    let above = neg_scores.iter().filter(|&&s| s > pos_score).count();
    let ties = neg_scores.iter().filter(|&&s| s == pos_score).count();
    let base = 1.0 + above as f64;
    Ok(match tie {
        TiePolicy::Optimistic => base,
        TiePolicy::Mid => base + ties as f64 / 2.0,
        TiePolicy::Pessimistic => base + ties as f64,
    })
}

/// Mean reciprocal rank.
pub fn mrr(ranks: &[f64]) -> Result<f64> {
    if ranks.is_empty() {
        return Err(Error::Contract("mrr of an empty rank list".into()));
    }
    if let Some(r) = ranks.iter().find(|&&r| !(r >= 1.0)) {
        return Err(Error::Contract(format!("rank {r} < 1")));
    }
    Ok(neumaier_sum(ranks.iter().map(|r| 1.0 / r)) / ranks.len() as f64)
}

/// Compensated sum; exact whenever the true sum is representable.
fn neumaier_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

/// Fraction of ranks `<= k` (inclusive).
pub fn hits_at_k(ranks: &[f64], k: usize) -> Result<f64> {
    if ranks.is_empty() {
        return Err(Error::Contract("hits@k of an empty rank list".into()));
    }
    if k == 0 {
        return Err(Error::Contract("hits@k requires k >= 1".into()));
    }
    let hits = ranks.iter().filter(|&&r| r <= k as f64).count();
    Ok(hits as f64 / ranks.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalProtocol {
    /// Corrupted targets per positive.
    pub candidates: usize,
    pub seed: u64,
    pub tie_policy: TiePolicy,
    pub hits_k: usize,
}

impl Default for EvalProtocol {
    fn default() -> Self {
        EvalProtocol {
            candidates: 100,
            seed: 0,
            tie_policy: TiePolicy::Mid,
            hits_k: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRank {
    pub u: usize,
    pub v: usize,
    pub rank: f64,
    pub candidates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mrr: f64,
    pub hits: f64,
    pub hits_k: usize,
    pub tie_policy: TiePolicy,
    pub per_edge: Vec<EdgeRank>,
}

impl EvalReport {
    pub fn ranks(&self) -> Vec<f64> {
        self.per_edge.iter().map(|e| e.rank).collect()
    }

    /// CSV with columns `u,v,rank,reciprocal`.
    pub fn write_rank_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["u", "v", "rank", "reciprocal"])?;
        for e in &self.per_edge {
            wtr.write_record([
                e.u.to_string(),
                e.v.to_string(),
                e.rank.to_string(),
                (1.0 / e.rank).to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Candidate lists for every positive, in positive order.
pub fn candidate_lists(
    positives: &[Edge],
    full_graph: &DirectedGraph,
    protocol: &EvalProtocol,
) -> Result<Vec<sampling::CandidateSet>> {
    positives
        .par_iter()
        .map(|&p| sampling::eval_candidates(full_graph, p, protocol.candidates, protocol.seed))
        .collect()
}

/// Ranks each positive against its candidates and aggregates MRR / Hits@k.
///
/// `score_pairs` receives `[positive, candidates...]` for one positive at a
/// time and must return one score per pair.
pub fn evaluate<F>(
    score_pairs: F,
    positives: &[Edge],
    full_graph: &DirectedGraph,
    protocol: &EvalProtocol,
) -> Result<EvalReport>
where
    F: Fn(&[Edge]) -> Result<Vec<f64>> + Sync,
{
    let lists = candidate_lists(positives, full_graph, protocol)?;
    evaluate_with_candidates(score_pairs, positives, &lists, protocol)
}

pub fn evaluate_with_candidates<F>(
    score_pairs: F,
    positives: &[Edge],
    lists: &[sampling::CandidateSet],
    protocol: &EvalProtocol,
) -> Result<EvalReport>
where
    F: Fn(&[Edge]) -> Result<Vec<f64>> + Sync,
{
    if positives.is_empty() {
        return Err(Error::Contract("no positives to evaluate".into()));
    }
    let per_edge: Vec<EdgeRank> = positives
        .par_iter()
        .zip(lists.par_iter())
        .map(|(&(u, v), cands)| {
            let mut pairs = Vec::with_capacity(cands.candidates.len() + 1);
            pairs.push((u, v));
            pairs.extend_from_slice(&cands.candidates);
            let scores = score_pairs(&pairs)?;
            if scores.len() != pairs.len() {
                return Err(Error::Shape(format!(
                    "scorer returned {} scores for {} pairs",
                    scores.len(),
                    pairs.len()
                )));
            }
            let rank = rank_of_positive(scores[0], &scores[1..], protocol.tie_policy)
                .map_err(|e| Error::Scorer {
                    u,
                    v,
                    source: Box::new(e),
                })?;
            Ok(EdgeRank {
                u,
                v,
                rank,
                candidates: cands.candidates.len(),
            })
        })
        .collect::<Result<_>>()?;
    let ranks: Vec<f64> = per_edge.iter().map(|e| e.rank).collect();
    Ok(EvalReport {
        mrr: mrr(&ranks)?,
        hits: hits_at_k(&ranks, protocol.hits_k)?,
        hits_k: protocol.hits_k,
        tie_policy: protocol.tie_policy,
        per_edge,
    })
}
