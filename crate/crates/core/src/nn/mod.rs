//! Small neural-network engine: 1-D convolution, max pooling, dropout,
//! dense and LSTM layers with hand-written backward passes, softmax
//! cross-entropy, Adam, and a deterministic data-parallel training loop.

mod layers;
mod model;
mod optim;
mod tensor;
mod train;

pub use layers::{
    conv1d_backward, conv1d_forward, dense_backward, dense_forward, dropout, dropout_mask, lstm_backward,
    lstm_forward, maxpool1d_backward, maxpool1d_forward, relu, Activation, LstmCache, LstmGrads, LstmParams, Mode,
    Padding,
};
pub use model::{build_model, cnn_preset, lstm_preset, LayerSpec, Model, ModelSpec, Trace, CHECKPOINT_MAGIC, N_CLASSES};
pub use optim::{adam_update, softmax, softmax_cross_entropy, AdamConfig, AdamState};
pub use tensor::Tensor;
pub use train::{evaluate, mean_loss, train, Confusion, EpochStats, Samples, TrainConfig, TrainReport};

#[derive(Debug, thiserror::Error)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("input of length {len} is shorter than pool {pool}")]
    InputTooShort { len: usize, pool: usize },
    #[error("layer {layer} receives length {len} but needs at least {needed}")]
    InvalidArchitectureForInputLength { layer: usize, len: usize, needed: usize },
    #[error("invalid model: {0}")]
    InvalidSpec(String),
    #[error("training diverged in epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
