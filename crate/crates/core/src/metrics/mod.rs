//! Classification metrics: confusion matrix, per-class report, ROC / AUC.

mod confusion;
mod report;
mod roc;

use thiserror::Error;

pub use confusion::{confusion, ConfusionMatrix};
pub use report::{class_report, ClassMetrics, ClassReport};
pub use roc::{roc_auc, RocCurve, RocPoint};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("length mismatch: {truth} truth labels vs {pred} predictions")]
    LengthMismatch { truth: usize, pred: usize },
    #[error("class index {index} out of range for {n_classes} classes")]
    IndexOutOfRange { index: usize, n_classes: usize },
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("ROC needs at least one positive and one negative row")]
    SingleClass,
    #[error("score {0} is not finite")]
    NonFiniteScore(String),
}
