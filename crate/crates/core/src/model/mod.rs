//! Encoders, decoders and the training loop.

mod config;
mod decoder;
mod encoder;
mod search;
mod train;

pub use config::{
    DecoderConfig, DecoderKind, EncoderConfig, EncoderKind, LabelConfig, ModelConfig, StructuralMode,
    TrainConfig,
};
pub use decoder::Decoder;
pub use encoder::{gcn_operator, mean_operator, sage_operator, Encoder};
pub use search::{random_search, Hyperparams, SearchResult, SearchSpace, Trial};
pub use train::{train, EpochRecord, GraphContext, LinkPredictor, TrainReport};
