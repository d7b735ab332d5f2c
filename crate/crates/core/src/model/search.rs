use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ModelConfig, TrainConfig};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSpace {
    pub hidden_layers: Vec<usize>,
    pub hidden_dim: Vec<usize>,
    pub final_dim: Vec<usize>,
    pub dropout: (f64, f64),
    pub lr: (f64, f64),
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            hidden_layers: vec![1, 2, 4],
            hidden_dim: vec![32, 64, 128],
            final_dim: vec![24, 48, 72],
            dropout: (0.0, 0.9),
            lr: (0.0001, 0.06),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub hidden_layers: usize,
    pub hidden_dim: usize,
    pub final_dim: usize,
    pub dropout: f64,
    pub lr: f64,
}

impl Hyperparams {
    pub fn apply(&self, model: &mut ModelConfig, train: &mut TrainConfig) {
        model.encoder.hidden_layers = self.hidden_layers;
        model.encoder.hidden_dim = self.hidden_dim;
        model.encoder.out_dim = self.final_dim;
        model.encoder.dropout = self.dropout;
        model.decoder.dropout = self.dropout;
        model.decoder.hidden_dims = vec![self.hidden_dim];
        train.lr = self.lr;
    }
}

fn uniform<R: Rng>(r: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        r.gen_range(lo..hi)
    }
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_layers.is_empty() || self.hidden_dim.is_empty() || self.final_dim.is_empty() {
            return Err(Error::Config("search space choice lists must be non-empty".into()));
        }
        for (name, (lo, hi)) in [("dropout", self.dropout), ("lr", self.lr)] {
            if !(lo <= hi && lo.is_finite() && hi.is_finite()) {
                return Err(Error::Config(format!("invalid {name} range [{lo}, {hi}]")));
            }
        }
        if self.dropout.1 >= 1.0 || self.dropout.0 < 0.0 || self.lr.0 < 0.0 {
            return Err(Error::Config("dropout must lie in [0, 1) and lr be non-negative".into()));
        }
        Ok(())
    }

    /// `trials` seeded uniform draws.
    pub fn sample(&self, trials: usize, seed: u64) -> Vec<Hyperparams> {
        let mut r = rng::rng(seed);
        (0..trials)
            .map(|_| Hyperparams {
                hidden_layers: *self.hidden_layers.choose(&mut r).expect("non-empty"),
                hidden_dim: *self.hidden_dim.choose(&mut r).expect("non-empty"),
                final_dim: *self.final_dim.choose(&mut r).expect("non-empty"),
                dropout: uniform(&mut r, self.dropout),
                lr: uniform(&mut r, self.lr),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub seed: u64,
    pub params: Hyperparams,
    pub val_mrr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best: Trial,
    pub trials: Vec<Trial>,
}

/// Scores `trials` sampled configurations with `objective` (validation MRR,
/// higher is better) concurrently; the earliest trial wins ties.
pub fn random_search<F>(space: &SearchSpace, trials: usize, seed: u64, objective: F) -> Result<SearchResult>
where
    F: Fn(&Hyperparams, u64) -> Result<f64> + Sync,
{
    if trials == 0 {
        return Err(Error::Contract("random search needs at least one trial".into()));
    }
    space.validate()?;
    let configs = space.sample(trials, seed);
    let results: Vec<Trial> = configs
        .into_par_iter()
        .enumerate()
        .map(|(index, params)| {
            let trial_seed = rng::derive_seed(seed, &[index as u64]);
            let val_mrr = objective(&params, trial_seed)?;
            log::info!("trial {index}: {params:?} -> val MRR {val_mrr:.4}");
            Ok(Trial {
                index,
                seed: trial_seed,
                params,
                val_mrr,
            })
        })
        .collect::<Result<_>>()?;
    let best = results
        .iter()
        .fold(None::<&Trial>, |b, t| match b {
            Some(b) if b.val_mrr >= t.val_mrr => Some(b),
            _ => Some(t),
        })
        .expect("at least one trial")
        .clone();
    Ok(SearchResult { best, trials: results })
}
