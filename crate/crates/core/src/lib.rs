//! Intrusion-detection training toolkit: NSL-KDD preprocessing, a Conv1D-LSTM
//! classifier with exact gradients, squirrel-search hyperparameter tuning and
//! classification metrics.

pub mod dataset;
pub mod metrics;
pub mod nn;
pub mod ssa;
