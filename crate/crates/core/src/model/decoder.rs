//! Edge decoders mapping `(e_u, e_v)` and optional edge features `z` to a
//! raw logit per pair.

use super::config::{DecoderConfig, DecoderKind};
use crate::autodiff::{Init, ParamId, ParamStore, Tape, Tensor, Var};
use crate::error::{Error, Result};
use crate::rng::Rng;

#[derive(Debug, Clone)]
pub struct Decoder {
    cfg: DecoderConfig,
    emb_dim: usize,
    z_dim: usize,
    matrix: Option<ParamId>,
    layers: Vec<(ParamId, ParamId)>,
}

impl Decoder {
    /// `z_dim > 0` prepends edge features to the MLP input.
    pub fn new(cfg: &DecoderConfig, emb_dim: usize, z_dim: usize, store: &mut ParamStore) -> Result<Self> {
        let kind = cfg.kind;
        if z_dim > 0 && !kind.has_mlp() {
            return Err(Error::Config(format!(
                "decoder {} cannot consume edge features",
                kind.name()
            )));
        }
        let matrix = if kind.has_matrix() {
            Some(store.add_init("dec.w", emb_dim, emb_dim, Init::Glorot)?)
        } else {
            None
        };
        let mut layers = Vec::new();
        if kind.has_mlp() {
            let pair = match kind {
                DecoderKind::Hmlp | DecoderKind::Mhmlp => emb_dim,
                _ => 2 * emb_dim,
            };
            let mut d_prev = z_dim + pair;
            let dims = cfg.hidden_dims.iter().copied().chain([1]);
            for (i, d) in dims.enumerate() {
                let w = store.add_init(&format!("dec.mlp.{i}.w"), d_prev, d, Init::Glorot)?;
                let b = store.add_init(&format!("dec.mlp.{i}.b"), 1, d, Init::Zeros)?;
                layers.push((w, b));
                d_prev = d;
            }
        }
        Ok(Decoder {
            cfg: cfg.clone(),
            emb_dim,
            z_dim,
            matrix,
            layers,
        })
    }

    pub fn kind(&self) -> DecoderKind {
        self.cfg.kind
    }

    pub fn z_dim(&self) -> usize {
        self.z_dim
    }

    pub fn matrix(&self) -> Option<ParamId> {
        self.matrix
    }

    pub fn mlp_layer(&self, i: usize) -> (ParamId, ParamId) {
        self.layers[i]
    }

    fn row_sum(&self, tape: &mut Tape, x: Var) -> Var {
        let ones = tape.constant(Tensor::filled(self.emb_dim, 1, 1.0));
        tape.matmul(x, ones)
    }

    /// Input of the first MLP layer: `z ‖ e_u ⊙ e_v` or `z ‖ e_u ‖ e_v`,
    /// with `e_u` replaced by `e_u W` for the matrix variants.
    pub fn mlp_input(&self, tape: &mut Tape, store: &ParamStore, eu: Var, ev: Var, z: Option<Var>) -> Result<Var> {
        let left = match self.matrix {
            Some(w) => {
                let w = tape.param(store, w);
                tape.matmul(eu, w)
            }
            None => eu,
        };
        let pair = match self.cfg.kind {
            DecoderKind::Hmlp | DecoderKind::Mhmlp => vec![tape.mul(left, ev)],
            _ => vec![left, ev],
        };
        let parts: Vec<Var> = z.into_iter().chain(pair).collect();
        Ok(if parts.len() == 1 { parts[0] } else { tape.concat(&parts) })
    }

    /// Logits, one row per pair. Dropout is active only when `rng` is given.
    pub fn forward(
        &self,
        tape: &mut Tape,
        store: &ParamStore,
        eu: Var,
        ev: Var,
        z: Option<Var>,
        mut rng: Option<&mut Rng>,
    ) -> Result<Var> {
        match (self.z_dim > 0, z) {
            (true, None) => return Err(Error::Contract("decoder expects edge features".into())),
            (false, Some(_)) => return Err(Error::Contract("decoder built without edge features".into())),
            _ => {}
        }
        for v in [eu, ev] {
            if tape.value(v).cols() != self.emb_dim {
                return Err(Error::Shape(format!(
                    "embedding width {} != decoder width {}",
                    tape.value(v).cols(),
                    self.emb_dim
                )));
            }
        }
        match self.cfg.kind {
            DecoderKind::Dp => {
                let p = tape.mul(eu, ev);
                Ok(self.row_sum(tape, p))
            }
            DecoderKind::Mdp => {
                let w = tape.param(store, self.matrix.expect("mdp has a matrix"));
                let left = tape.matmul(eu, w);
                let p = tape.mul(left, ev);
                Ok(self.row_sum(tape, p))
            }
            _ => {
                let mut h = self.mlp_input(tape, store, eu, ev, z)?;
                let last = self.layers.len() - 1;
                for (i, &(w, b)) in self.layers.iter().enumerate() {
                    let (w, b) = (tape.param(store, w), tape.param(store, b));
                    h = tape.matmul(h, w);
                    h = tape.add_bias(h, b);
                    if i < last {
                        h = tape.relu(h);
                        if let Some(r) = rng.as_deref_mut() {
                            h = tape.dropout(h, self.cfg.dropout, r);
                        }
                    }
                }
                Ok(h)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::DirectedGraph;
    use crate::featurize::{directed_dim, edge_features};

    fn cfg(kind: DecoderKind) -> DecoderConfig {
        DecoderConfig {
            kind,
            hidden_dims: vec![8],
            dropout: 0.0,
        }
    }

    fn embeddings(rows: usize, d: usize, seed: f64) -> Tensor {
        Tensor::new(rows, d, (0..rows * d).map(|i| (i as f64 * seed).sin()).collect()).unwrap()
    }

    fn logits(dec: &Decoder, store: &ParamStore, eu: &Tensor, ev: &Tensor) -> Vec<f64> {
        let mut tape = Tape::new();
        let (a, b) = (tape.constant(eu.clone()), tape.constant(ev.clone()));
        let out = dec.forward(&mut tape, store, a, b, None, None).unwrap();
        tape.value(out).data().to_vec()
    }

    #[test]
    fn dp_example() {
        let mut store = ParamStore::new(0);
        let dec = Decoder::new(&cfg(DecoderKind::Dp), 2, 0, &mut store).unwrap();
        let e = Tensor::new(1, 2, vec![1.0, 0.0]).unwrap();
        let l = logits(&dec, &store, &e, &e)[0];
        assert_eq!(l, 1.0);
        assert!((1.0 / (1.0 + (-l).exp()) - 0.7311).abs() < 1e-4);
    }

    #[test]
    fn symmetric_and_asymmetric_decoders() {
        let (eu, ev) = (embeddings(16, 4, 0.37), embeddings(16, 4, 1.91));
        for kind in DecoderKind::ALL {
            let mut store = ParamStore::new(7);
            let dec = Decoder::new(&cfg(kind), 4, 0, &mut store).unwrap();
            let (fwd, rev) = (logits(&dec, &store, &eu, &ev), logits(&dec, &store, &ev, &eu));
            if kind.is_symmetric() {
                assert_eq!(fwd, rev, "{kind:?}");
            } else {
                assert!(fwd.iter().zip(&rev).any(|(a, b)| a != b), "{kind:?}");
            }
        }
    }

    #[test]
    fn mdp_with_identity_is_dp() {
        let mut store = ParamStore::new(3);
        let mdp = Decoder::new(&cfg(DecoderKind::Mdp), 3, 0, &mut store).unwrap();
        *store.get_mut(mdp.matrix().unwrap()) =
            Tensor::new(3, 3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let mut dp_store = ParamStore::new(3);
        let dp = Decoder::new(&cfg(DecoderKind::Dp), 3, 0, &mut dp_store).unwrap();
        let (eu, ev) = (embeddings(5, 3, 0.5), embeddings(5, 3, 2.5));
        assert_eq!(logits(&mdp, &store, &eu, &ev), logits(&dp, &dp_store, &eu, &ev));
    }

    #[test]
    fn edge_feature_contract() {
        let mut store = ParamStore::new(0);
        assert!(Decoder::new(&cfg(DecoderKind::Dp), 2, 5, &mut store).is_err());
        let dec = Decoder::new(&cfg(DecoderKind::Cmlp), 2, 5, &mut store).unwrap();
        let mut tape = Tape::new();
        let e = tape.constant(Tensor::zeros(1, 2));
        assert!(matches!(
            dec.forward(&mut tape, &store, e, e, None, None),
            Err(Error::Contract(_))
        ));
    }

    /// A first layer `[B; I; I]` turns `z ‖ e_u ‖ e_v` into
    /// `[Uu, Iu, Lu + Ru] ‖ (e_u + e_v)`, the input of a symmetric model
    /// with undirected edge features.
    #[test]
    fn first_layer_reduces_to_symmetric_inputs() {
        let g = DirectedGraph::from_edges(5, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 1)])
            .unwrap()
            .0;
        let radius = 2;
        let (d, zd, k) = (3, directed_dim(radius) + 4 * radius, 3 * radius);
        let dd = directed_dim(radius);
        let mut store = ParamStore::new(1);
        let dec_cfg = DecoderConfig {
            kind: DecoderKind::Cmlp,
            hidden_dims: vec![k + d],
            dropout: 0.0,
        };
        let dec = Decoder::new(&dec_cfg, d, zd, &mut store).unwrap();
        let cols = k + d;
        let mut w0 = Tensor::zeros(zd + 2 * d, cols);
        let mut set = |r: usize, c: usize| w0.data_mut()[r * cols + c] = 1.0;
        for j in 0..radius {
            set(dd + j, j);
            set(dd + radius + j, radius + j);
            set(dd + 2 * radius + j, 2 * radius + j);
            set(dd + 3 * radius + j, 2 * radius + j);
        }
        for j in 0..d {
            set(zd + j, k + j);
            set(zd + d + j, k + j);
        }
        *store.get_mut(dec.mlp_layer(0).0) = w0;
        let emb = embeddings(5, d, 0.77);
        let pre = |u: usize, v: usize| {
            let z = edge_features(&g, u, v, radius).unwrap();
            let mut tape = Tape::new();
            let eu = tape.constant(Tensor::new(1, d, emb.row(u).to_vec()).unwrap());
            let ev = tape.constant(Tensor::new(1, d, emb.row(v).to_vec()).unwrap());
            let zv = tape.constant(Tensor::new(1, zd, z.z()).unwrap());
            let x = dec.mlp_input(&mut tape, &store, eu, ev, Some(zv)).unwrap();
            let w = tape.param(&store, dec.mlp_layer(0).0);
            let y = tape.matmul(x, w);
            (tape.value(y).data().to_vec(), z.z_undir)
        };
        for (u, v) in [(0, 1), (2, 4), (3, 0)] {
            let (fwd, undir) = pre(u, v);
            let (rev, _) = pre(v, u);
            for (a, b) in fwd.iter().zip(&rev) {
                assert!((a - b).abs() < 1e-12);
            }
            let mut expect: Vec<f64> = undir[..2 * radius].to_vec();
            expect.extend((0..radius).map(|j| undir[2 * radius + j] + undir[3 * radius + j]));
            expect.extend((0..d).map(|j| emb.get(u, j) + emb.get(v, j)));
            for (a, b) in fwd.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
