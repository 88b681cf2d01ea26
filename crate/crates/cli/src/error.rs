use std::path::PathBuf;

use ids_core::dataset::DatasetError;
use ids_core::metrics::MetricsError;
use ids_core::nn::NnError;
use ids_core::ssa::SsaError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("cannot read config {path}: {source}")]
    ConfigRead { path: PathBuf, source: std::io::Error },
    #[error("config {path}: {source}")]
    ConfigParse { path: PathBuf, source: toml::de::Error },
    #[error("missing prerequisite: {0}")]
    Precondition(String),
    #[error("output directory {0} is locked by another command (remove the lock file if stale)")]
    Locked(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("artifact {path}: {reason}")]
    Artifact { path: PathBuf, reason: String },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Ssa(#[from] SsaError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("run directory check failed:\n{}", .0.join("\n"))]
    Verification(Vec<String>),
}

impl CliError {
    /// 2 for configuration and precondition problems, 3 for failures while working.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_)
            | CliError::ConfigRead { .. }
            | CliError::ConfigParse { .. }
            | CliError::Precondition(_)
            | CliError::Locked(_) => 2,
            _ => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
