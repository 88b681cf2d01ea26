//! Minimal neural engine for the Conv1D-LSTM classifier.

mod adam;
mod checkpoint;
mod error;
mod hyper;
pub mod layers;
mod loss;
mod model;
mod train;

pub use adam::{adam_step, AdamState, BETA1, BETA2, EPSILON};
pub use checkpoint::{decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint, CHECKPOINT_VERSION, MAGIC};
pub use error::NnError;
pub use hyper::{HyperParams, CONV_FILTERS_RANGE, LEARNING_RATE_RANGE, LSTM_UNITS_RANGE};
pub use layers::{
    argmax, conv1d_forward, dense_softmax, lstm_forward, maxpool1d, reshape_input, FeatureMap, LstmWeights,
};
pub use loss::{weighted_ce_class, weighted_ce_loss, PROB_FLOOR};
pub use model::{Architecture, ConvLstmModel, ForwardCache, Layout, POOL_WIDTH};
pub use train::{
    clip_grad_norm, evaluate_loss_acc, train, EpochRecord, LabeledSet, StopReason, TrainReport, TrainState, EARLY_STOP_PATIENCE,
    GRAD_CLIP_NORM, LR_FLOOR_DIVISOR, LR_PATIENCE,
};
