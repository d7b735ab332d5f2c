use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featurize::{LabelMode, DEFAULT_RADIUS};
use crate::sampling::NegativeMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncoderKind {
    Gcn,
    #[serde(rename = "graphsage")]
    GraphSage,
    #[serde(rename = "dirgnn")]
    DirGnn,
    /// No message passing: a per-node MLP over the input features.
    Mlp,
}

impl EncoderKind {
    pub const ALL: [EncoderKind; 4] = [
        EncoderKind::Gcn,
        EncoderKind::GraphSage,
        EncoderKind::DirGnn,
        EncoderKind::Mlp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EncoderKind::Gcn => "gcn",
            EncoderKind::GraphSage => "graphsage",
            EncoderKind::DirGnn => "dirgnn",
            EncoderKind::Mlp => "mlp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Dp,
    Hmlp,
    Cmlp,
    Mdp,
    Mhmlp,
    Mcmlp,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 6] = [
        DecoderKind::Dp,
        DecoderKind::Hmlp,
        DecoderKind::Cmlp,
        DecoderKind::Mdp,
        DecoderKind::Mhmlp,
        DecoderKind::Mcmlp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Dp => "dp",
            DecoderKind::Hmlp => "hmlp",
            DecoderKind::Cmlp => "cmlp",
            DecoderKind::Mdp => "mdp",
            DecoderKind::Mhmlp => "mhmlp",
            DecoderKind::Mcmlp => "mcmlp",
        }
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, DecoderKind::Dp | DecoderKind::Hmlp)
    }

    pub fn has_mlp(self) -> bool {
        !matches!(self, DecoderKind::Dp | DecoderKind::Mdp)
    }

    pub fn has_matrix(self) -> bool {
        matches!(self, DecoderKind::Mdp | DecoderKind::Mhmlp | DecoderKind::Mcmlp)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EncoderConfig {
    pub kind: EncoderKind,
    /// Layers before the output layer; the encoder has `hidden_layers + 1` layers.
    pub hidden_layers: usize,
    pub hidden_dim: usize,
    pub out_dim: usize,
    /// Weight of incoming messages in DirGNN.
    pub alpha: f64,
    pub dropout: f64,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            kind: EncoderKind::DirGnn,
            hidden_layers: 1,
            hidden_dim: 64,
            out_dim: 48,
            alpha: 0.5,
            dropout: 0.2,
        }
    }
}

impl EncoderConfig {
    pub fn num_layers(&self) -> usize {
        self.hidden_layers + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoderConfig {
    pub kind: DecoderKind,
    pub hidden_dims: Vec<usize>,
    pub dropout: f64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            kind: DecoderKind::Cmlp,
            hidden_dims: vec![64],
            dropout: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelConfig {
    pub mode: LabelMode,
    pub directed: bool,
    pub landmarks: usize,
}

impl LabelConfig {
    pub fn name(&self) -> String {
        format!("{}-{}", self.mode, if self.directed { "d" } else { "u" })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructuralMode {
    None,
    /// Only the symmetrized-shell counts.
    Undirected,
    /// Directed sequence counts followed by the undirected counts.
    Directed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub encoder: EncoderConfig,
    pub decoder: DecoderConfig,
    pub labels: Option<LabelConfig>,
    pub structural: StructuralMode,
    pub radius: usize,
    pub use_node_features: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::dirlp()
    }
}

impl ModelConfig {
    /// DirGNN encoder on features plus directed `de15` labels from two
    /// landmarks, with an MLP over `z ‖ e_u ‖ e_v`.
    pub fn dirlp() -> Self {
        ModelConfig {
            encoder: EncoderConfig::default(),
            decoder: DecoderConfig::default(),
            labels: Some(LabelConfig {
                mode: LabelMode::DeK(15),
                directed: true,
                landmarks: 2,
            }),
            structural: StructuralMode::Directed,
            radius: DEFAULT_RADIUS,
            use_node_features: true,
        }
    }

    /// Plain GNN with the given encoder and decoder: no labels, no edge features.
    pub fn baseline(encoder: EncoderKind, decoder: DecoderKind) -> Self {
        let mut cfg = ModelConfig::dirlp();
        cfg.encoder.kind = encoder;
        cfg.decoder.kind = decoder;
        cfg.labels = None;
        cfg.structural = StructuralMode::None;
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.encoder;
        if e.hidden_dim == 0 || e.out_dim == 0 {
            return Err(Error::Config("encoder dimensions must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&e.alpha) {
            return Err(Error::Config(format!("alpha {} outside [0, 1]", e.alpha)));
        }
        for p in [e.dropout, self.decoder.dropout] {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::Config(format!("dropout {p} outside [0, 1)")));
            }
        }
        if self.decoder.hidden_dims.contains(&0) {
            return Err(Error::Config("decoder hidden dims must be >= 1".into()));
        }
        if self.structural != StructuralMode::None {
            if !self.decoder.kind.has_mlp() {
                return Err(Error::Config(format!(
                    "decoder {} cannot consume structural features",
                    self.decoder.kind.name()
                )));
            }
            if self.radius == 0 {
                return Err(Error::Config("structural radius must be >= 1".into()));
            }
        }
        if let Some(l) = &self.labels {
            if l.landmarks == 0 {
                return Err(Error::Config("label landmarks must be >= 1".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub lr: f64,
    pub max_epochs: usize,
    /// Stop after this many epochs without a validation improvement.
    pub patience: usize,
    pub eval_every: usize,
    /// Corrupted targets per validation positive.
    pub val_candidates: usize,
    pub negative_mode: NegativeMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr: 0.01,
            max_epochs: 1000,
            patience: 50,
            eval_every: 1,
            val_candidates: 100,
            negative_mode: NegativeMode::Directed,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr >= 0.0 && self.lr.is_finite()) {
            return Err(Error::Config(format!("invalid learning rate {}", self.lr)));
        }
        if self.eval_every == 0 || self.val_candidates == 0 {
            return Err(Error::Config("eval_every and val_candidates must be >= 1".into()));
        }
        Ok(())
    }
}
