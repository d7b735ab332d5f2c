use std::collections::HashSet;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ModelConfig, StructuralMode, TrainConfig};
use super::decoder::Decoder;
use super::encoder::Encoder;
use crate::autodiff::{Adam, Checkpoint, ParamStore, Tape, Tensor};
use crate::digraph::{DirectedGraph, Edge, NodeFeatures};
use crate::error::{Error, Result};
use crate::eval::{self, EvalProtocol, EvalReport};
use crate::featurize::{self, StructuralFeaturizer};
use crate::rng::{self, Rng};
use crate::sampling::{self, EdgeSplit};

const STREAM_NEGATIVES: u64 = 1;
const STREAM_DROPOUT: u64 = 2;
const STREAM_VALID: u64 = 3;

/// Everything derived from the training graph once per run: input node
/// features (raw features and distance labels) and the edge featurizer.
pub struct GraphContext {
    graph: Arc<DirectedGraph>,
    inputs: Tensor,
    featurizer: Option<StructuralFeaturizer>,
    structural: StructuralMode,
    z_dim: usize,
}

impl GraphContext {
    /// Falls back to a constant column when no input features remain.
    pub fn new(graph: DirectedGraph, features: Option<&NodeFeatures>, cfg: &ModelConfig) -> Result<Self> {
        cfg.validate()?;
        let n = graph.num_nodes();
        let mut blocks: Vec<(usize, &[f64])> = Vec::new();
        if let Some(f) = features.filter(|f| cfg.use_node_features && f.dim() > 0) {
            if f.num_nodes() != n {
                return Err(Error::Shape(format!(
                    "feature rows {} != nodes {n}",
                    f.num_nodes()
                )));
            }
            blocks.push((f.dim(), f.data()));
        }
        let labels = match &cfg.labels {
            Some(l) => {
                let landmarks = featurize::select_landmarks(&graph, l.landmarks.min(n))?;
                Some(featurize::distance_encoding_labels(&graph, &landmarks, l.mode, l.directed)?)
            }
            None => None,
        };
        if let Some(l) = &labels {
            blocks.push((l.dim, &l.data));
        }
        let width: usize = blocks.iter().map(|b| b.0).sum();
        let inputs = if width == 0 {
            Tensor::filled(n, 1, 1.0)
        } else {
            let mut data = Vec::with_capacity(n * width);
            for u in 0..n {
                for &(d, block) in &blocks {
                    data.extend_from_slice(&block[u * d..(u + 1) * d]);
                }
            }
            Tensor::new(n, width, data)?
        };
        let graph = Arc::new(graph);
        let (featurizer, z_dim) = match cfg.structural {
            StructuralMode::None => (None, 0),
            mode => {
                let f = StructuralFeaturizer::new(Arc::clone(&graph), cfg.radius)?;
                let undir = featurize::undirected_dim(cfg.radius);
                let dim = match mode {
                    StructuralMode::Directed => featurize::directed_dim(cfg.radius) + undir,
                    _ => undir,
                };
                (Some(f), dim)
            }
        };
        Ok(GraphContext {
            graph,
            inputs,
            featurizer,
            structural: cfg.structural,
            z_dim,
        })
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn inputs(&self) -> &Tensor {
        &self.inputs
    }

    pub fn z_dim(&self) -> usize {
        self.z_dim
    }

    /// `ln(1 + z)` per pair. With `mask`, pairs present in the training graph
    /// get features computed with their own edge removed, so training
    /// positives look like held-out ones. `cache` stores the vectors.
    pub fn edge_z(&self, pairs: &[Edge], cache: bool, mask: bool) -> Result<Option<Tensor>> {
        let Some(f) = &self.featurizer else { return Ok(None) };
        let rows: Vec<Vec<f64>> = pairs
            .par_iter()
            .map(|&(u, v)| {
                let feats = if mask && self.graph.has_edge(u, v) {
                    f.masked(u, v)?
                } else if cache {
                    f.cached(u, v)?
                } else {
                    Arc::new(f.features(u, v)?)
                };
                let z = match self.structural {
                    StructuralMode::Directed => feats.z(),
                    _ => feats.z_undir.clone(),
                };
                Ok(z.into_iter().map(f64::ln_1p).collect())
            })
            .collect::<Result<_>>()?;
        Ok(Some(Tensor::new(pairs.len(), self.z_dim, rows.concat())?))
    }
}

/// Encoder, decoder and their parameters, bound to one [`GraphContext`].
pub struct LinkPredictor {
    config: ModelConfig,
    store: ParamStore,
    encoder: Encoder,
    decoder: Decoder,
    ctx: Arc<GraphContext>,
}

fn gather_rows(t: &Tensor, idx: impl Iterator<Item = usize>) -> Result<Tensor> {
    let mut data = Vec::new();
    let mut rows = 0;
    for i in idx {
        data.extend_from_slice(t.row(i));
        rows += 1;
    }
    Tensor::new(rows, t.cols(), data)
}

impl LinkPredictor {
    pub fn new(config: ModelConfig, ctx: Arc<GraphContext>, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut store = ParamStore::new(seed);
        let encoder = Encoder::new(&config.encoder, ctx.graph(), ctx.inputs().cols(), &mut store)?;
        let decoder = Decoder::new(&config.decoder, config.encoder.out_dim, ctx.z_dim(), &mut store)?;
        Ok(LinkPredictor {
            config,
            store,
            encoder,
            decoder,
            ctx,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn context(&self) -> &GraphContext {
        &self.ctx
    }

    pub fn params(&self) -> &ParamStore {
        &self.store
    }

    pub fn params_mut(&mut self) -> &mut ParamStore {
        &mut self.store
    }

    /// Node embeddings without dropout.
    pub fn embed(&self) -> Result<Tensor> {
        let mut tape = Tape::new();
        let x = tape.constant(self.ctx.inputs().clone());
        let e = self.encoder.forward(&mut tape, &self.store, x, None);
        tape.check_finite()?;
        Ok(tape.value(e).clone())
    }

    /// Logits of `pairs` given precomputed embeddings.
    pub fn score_with(&self, emb: &Tensor, pairs: &[Edge], cache: bool) -> Result<Vec<f64>> {
        let n = emb.rows();
        for &(u, v) in pairs {
            for id in [u, v] {
                if id >= n {
                    return Err(Error::NodeRange { id, num_nodes: n });
                }
            }
        }
        let mut tape = Tape::new();
        let eu = tape.constant(gather_rows(emb, pairs.iter().map(|p| p.0))?);
        let ev = tape.constant(gather_rows(emb, pairs.iter().map(|p| p.1))?);
        let z = self.ctx.edge_z(pairs, cache, false)?.map(|z| tape.constant(z));
        let out = self.decoder.forward(&mut tape, &self.store, eu, ev, z, None)?;
        tape.check_finite()?;
        Ok(tape.value(out).data().to_vec())
    }

    pub fn score_pairs(&self, pairs: &[Edge]) -> Result<Vec<f64>> {
        self.score_with(&self.embed()?, pairs, false)
    }

    /// Mean BCE over positives (target 1) and negatives (target 0), and the
    /// parameter gradients. Dropout is active only when `rng` is given.
    pub fn loss_and_grads(
        &self,
        pos: &[Edge],
        neg: &[Edge],
        rng: Option<&mut Rng>,
    ) -> Result<(f64, Vec<Option<Tensor>>)> {
        self.loss_with_params(&self.store, pos, neg, rng)
    }

    /// [`Self::loss_and_grads`] evaluated at `store` instead of the model's
    /// own parameters; `store` must have the model's layout.
    pub fn loss_with_params(
        &self,
        store: &ParamStore,
        pos: &[Edge],
        neg: &[Edge],
        mut rng: Option<&mut Rng>,
    ) -> Result<(f64, Vec<Option<Tensor>>)> {
        if store.len() != self.store.len() {
            return Err(Error::Shape("parameter store does not match the model".into()));
        }
        if pos.is_empty() && neg.is_empty() {
            return Err(Error::Contract("empty training batch".into()));
        }
        let mut tape = Tape::new();
        let x = tape.constant(self.ctx.inputs().clone());
        let e = self.encoder.forward(&mut tape, store, x, rng.as_deref_mut());
        let pairs: Vec<Edge> = pos.iter().chain(neg).copied().collect();
        let iu = Arc::new(pairs.iter().map(|p| p.0).collect::<Vec<_>>());
        let iv = Arc::new(pairs.iter().map(|p| p.1).collect::<Vec<_>>());
        let eu = tape.gather(e, &iu);
        let ev = tape.gather(e, &iv);
        let z = match (self.ctx.edge_z(pos, true, true)?, self.ctx.edge_z(neg, false, false)?) {
            (Some(a), Some(b)) => {
                let mut data = a.into_data();
                data.extend(b.into_data());
                Some(tape.constant(Tensor::new(pairs.len(), self.ctx.z_dim(), data)?))
            }
            _ => None,
        };
        let logits = self.decoder.forward(&mut tape, store, eu, ev, z, rng)?;
        let targets: Vec<f64> = pos.iter().map(|_| 1.0).chain(neg.iter().map(|_| 0.0)).collect();
        let loss = tape.bce_with_logits(logits, &Arc::new(targets));
        let value = tape.scalar(loss)?;
        tape.backward(loss)?;
        Ok((value, tape.param_grads(store)?))
    }

    /// One optimizer step on a caller-chosen batch.
    pub fn train_step(&mut self, opt: &mut Adam, pos: &[Edge], neg: &[Edge], rng: Option<&mut Rng>) -> Result<f64> {
        let (loss, grads) = self.loss_and_grads(pos, neg, rng)?;
        opt.step(&mut self.store, &grads);
        Ok(loss)
    }

    pub fn evaluate(&self, positives: &[Edge], full_graph: &DirectedGraph, protocol: &EvalProtocol) -> Result<EvalReport> {
        let emb = self.embed()?;
        eval::evaluate(|pairs| self.score_with(&emb, pairs, false), positives, full_graph, protocol)
    }

    pub fn checkpoint(&self) -> Checkpoint {
        self.store.checkpoint()
    }

    pub fn restore(&mut self, ckpt: &Checkpoint) -> Result<()> {
        self.store.restore(ckpt)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub val_mrr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_mrr: Option<f64>,
}

impl TrainReport {
    /// `epoch,loss,val_mrr` with an empty cell on epochs without validation.
    pub fn write_history_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["epoch", "loss", "val_mrr"])?;
        for r in &self.history {
            let val = r.val_mrr.map(|m| m.to_string()).unwrap_or_default();
            wtr.write_record([r.epoch.to_string(), r.loss.to_string(), val])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Full-batch training with fresh 1:1 negatives every epoch and early
/// stopping on validation MRR. Leaves `model` at the best validation
/// checkpoint (the last epoch when there is no validation set).
pub fn train(
    model: &mut LinkPredictor,
    split: &EdgeSplit,
    full_graph: &DirectedGraph,
    tc: &TrainConfig,
    protocol: &EvalProtocol,
    seed: u64,
) -> Result<TrainReport> {
    tc.validate()?;
    if split.train_pos.is_empty() {
        return Err(Error::Contract("no training positives".into()));
    }
    let g_train = Arc::clone(&model.ctx.graph);
    if g_train.num_edges() != split.train_pos.len() {
        return Err(Error::Contract(
            "model context was not built from this split's training edges".into(),
        ));
    }
    let val_protocol = EvalProtocol {
        candidates: tc.val_candidates,
        seed: rng::derive_seed(seed, &[STREAM_VALID]),
        ..*protocol
    };
    let val_lists = if split.valid_pos.is_empty() {
        Vec::new()
    } else {
        eval::candidate_lists(&split.valid_pos, full_graph, &val_protocol)?
    };
    let mut opt = Adam::new(tc.lr, &model.store)?;
    let mut history = Vec::new();
    let mut best: Option<(f64, usize, Checkpoint)> = None;
    let exclude = HashSet::new();
    for epoch in 1..=tc.max_epochs {
        let neg_seed = rng::derive_seed(seed, &[STREAM_NEGATIVES, epoch as u64]);
        let neg = sampling::sample_negatives(&g_train, split.train_pos.len(), tc.negative_mode, neg_seed, &exclude)?;
        let mut drop_rng = rng::derived_rng(seed, &[STREAM_DROPOUT, epoch as u64]);
        let loss = model
            .train_step(&mut opt, &split.train_pos, &neg.edges, Some(&mut drop_rng))
            .map_err(|e| match e {
                Error::Numeric(m) => Error::Numeric(format!("epoch {epoch}: {m}")),
                other => other,
            })?;
        let validate = !val_lists.is_empty() && (epoch % tc.eval_every == 0 || epoch == tc.max_epochs);
        let val_mrr = if validate {
            let emb = model.embed()?;
            let report = eval::evaluate_with_candidates(
                |pairs| model.score_with(&emb, pairs, true),
                &split.valid_pos,
                &val_lists,
                &val_protocol,
            )?;
            Some(report.mrr)
        } else {
            None
        };
        log::debug!("epoch {epoch}: loss {loss:.5} val_mrr {val_mrr:?}");
        history.push(EpochRecord { epoch, loss, val_mrr });
        if let Some(m) = val_mrr {
            if best.as_ref().is_none_or(|b| m > b.0) {
                best = Some((m, epoch, model.checkpoint()));
            }
        }
        if let Some((_, best_epoch, _)) = &best {
            if epoch - best_epoch >= tc.patience {
                break;
            }
        }
    }
    let (best_val_mrr, best_epoch) = match best {
        Some((m, epoch, ckpt)) => {
            model.restore(&ckpt)?;
            (Some(m), epoch)
        }
        None => (None, history.len()),
    };
    Ok(TrainReport {
        history,
        best_epoch,
        best_val_mrr,
    })
}
