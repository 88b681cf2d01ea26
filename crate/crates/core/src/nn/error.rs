use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("input length {found} does not match model input length {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("kernel of length {kernel} is longer than the input ({input})")]
    KernelTooLong { kernel: usize, input: usize },
    #[error("target is not one-hot")]
    NotOneHot,
    #[error("encoder column hash {data:016x} does not match model hash {model:016x}")]
    ColumnHashMismatch { model: u64, data: u64 },
    #[error("label {label} out of range for {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },
    #[error("{0} set is empty")]
    EmptySet(&'static str),
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperParams(String),
    #[error("training diverged at epoch {epoch} (non-finite loss)")]
    Diverged { epoch: usize },
    #[error("checkpoint I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint format: {0}")]
    CheckpointFormat(String),
    #[error("checkpoint format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("checkpoint checksum mismatch (file truncated or modified)")]
    ChecksumMismatch,
}
