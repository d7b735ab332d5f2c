//! Node encoders. Every layer maps `n × d_{k-1}` to `n × d_k` without bias;
//! hidden layers are followed by relu and dropout, the output layer by nothing.

use std::sync::Arc;

use super::config::{EncoderConfig, EncoderKind};
use crate::autodiff::{Init, ParamId, ParamStore, SparseRows, Tape, Var};
use crate::digraph::{DirectedGraph, Direction};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Row-mean over the `dir`-neighbors of each node.
pub fn mean_operator(g: &DirectedGraph, dir: Direction) -> Result<SparseRows> {
    let n = g.num_nodes();
    let groups: Vec<&[usize]> = (0..n).map(|u| g.adj(u, dir)).collect();
    SparseRows::mean(n, &groups)
}

fn require_symmetric(g: &DirectedGraph) -> Result<()> {
    if g.is_symmetric() {
        Ok(())
    } else {
        Err(Error::Contract("operator requires a symmetric graph".into()))
    }
}

/// Neighbor mean on a symmetric graph.
pub fn sage_operator(g: &DirectedGraph) -> Result<SparseRows> {
    require_symmetric(g)?;
    mean_operator(g, Direction::Out)
}

/// `D^{-1/2} (A + I) D^{-1/2}` on a symmetric graph.
pub fn gcn_operator(g: &DirectedGraph) -> Result<SparseRows> {
    require_symmetric(g)?;
    let n = g.num_nodes();
    let deg: Vec<f64> = (0..n).map(|u| (g.out_degree(u) + 1) as f64).collect();
    let rows: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|u| {
            let mut row: Vec<(usize, f64)> = g
                .out_neighbors(u)
                .iter()
                .map(|&v| (v, 1.0 / (deg[u] * deg[v]).sqrt()))
                .collect();
            row.push((u, 1.0 / deg[u]));
            row
        })
        .collect();
    SparseRows::new(n, &rows)
}

#[derive(Debug, Clone)]
enum Operators {
    DirGnn {
        incoming: Arc<SparseRows>,
        outgoing: Arc<SparseRows>,
    },
    Sage(Arc<SparseRows>),
    Gcn(Arc<SparseRows>),
    Mlp,
}

#[derive(Debug, Clone)]
pub struct Encoder {
    cfg: EncoderConfig,
    ops: Operators,
    layers: Vec<Vec<ParamId>>,
}

impl Encoder {
    /// GCN and GraphSage propagate over the symmetrized `g`; DirGNN keeps
    /// incoming and outgoing neighborhoods apart.
    pub fn new(
        cfg: &EncoderConfig,
        g: &DirectedGraph,
        in_dim: usize,
        store: &mut ParamStore,
    ) -> Result<Self> {
        let ops = match cfg.kind {
            EncoderKind::DirGnn => Operators::DirGnn {
                incoming: Arc::new(mean_operator(g, Direction::In)?),
                outgoing: Arc::new(mean_operator(g, Direction::Out)?),
            },
            EncoderKind::GraphSage => Operators::Sage(Arc::new(sage_operator(&g.symmetrize())?)),
            EncoderKind::Gcn => Operators::Gcn(Arc::new(gcn_operator(&g.symmetrize())?)),
            EncoderKind::Mlp => Operators::Mlp,
        };
        let names: &[&str] = match cfg.kind {
            EncoderKind::DirGnn => &["w_in_self", "w_in", "w_out_self", "w_out"],
            EncoderKind::GraphSage => &["w_self", "w_neigh"],
            EncoderKind::Gcn | EncoderKind::Mlp => &["w"],
        };
        let k = cfg.num_layers();
        let mut layers = Vec::with_capacity(k);
        let mut d_prev = in_dim;
        for layer in 0..k {
            let d = if layer + 1 == k { cfg.out_dim } else { cfg.hidden_dim };
            let ids = names
                .iter()
                .map(|name| store.add_init(&format!("enc.{layer}.{name}"), d_prev, d, Init::Glorot))
                .collect::<Result<Vec<_>>>()?;
            layers.push(ids);
            d_prev = d;
        }
        Ok(Encoder {
            cfg: cfg.clone(),
            ops,
            layers,
        })
    }

    pub fn layer_params(&self, layer: usize) -> &[ParamId] {
        &self.layers[layer]
    }

    pub fn out_dim(&self) -> usize {
        self.cfg.out_dim
    }

    /// Embeddings `E = h^{(K)}`. Dropout is active only when `rng` is given.
    pub fn forward(
        &self,
        tape: &mut Tape,
        store: &ParamStore,
        x: Var,
        mut rng: Option<&mut Rng>,
    ) -> Var {
        let mut h = x;
        let k = self.layers.len();
        for (layer, ids) in self.layers.iter().enumerate() {
            let w: Vec<Var> = ids.iter().map(|&id| tape.param(store, id)).collect();
            h = match &self.ops {
                Operators::DirGnn { incoming, outgoing } => {
                    let a = self.cfg.alpha;
                    let side = |tape: &mut Tape, op: &Arc<SparseRows>, w_self: Var, w_nb: Var| {
                        let s = tape.matmul(h, w_self);
                        let m = tape.spmm(op, h);
                        let m = tape.matmul(m, w_nb);
                        tape.add(s, m)
                    };
                    let m_in = side(tape, incoming, w[0], w[1]);
                    let m_out = side(tape, outgoing, w[2], w[3]);
                    let m_in = tape.scale(m_in, a);
                    let m_out = tape.scale(m_out, 1.0 - a);
                    tape.add(m_in, m_out)
                }
                Operators::Sage(op) => {
                    let s = tape.matmul(h, w[0]);
                    let m = tape.spmm(op, h);
                    let m = tape.matmul(m, w[1]);
                    tape.add(s, m)
                }
                Operators::Gcn(op) => {
                    let m = tape.spmm(op, h);
                    tape.matmul(m, w[0])
                }
                Operators::Mlp => tape.matmul(h, w[0]),
            };
            if layer + 1 < k {
                h = tape.relu(h);
                if let Some(r) = rng.as_deref_mut() {
                    h = tape.dropout(h, self.cfg.dropout, r);
                }
            }
        }
        h
    }
}
