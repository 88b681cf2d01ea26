use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: file contains no records")]
    EmptyFile { path: PathBuf },
    #[error("row {row}: expected {expected} fields, found {found}")]
    FieldCount {
        row: usize,
        expected: &'static str,
        found: usize,
    },
    #[error("row {row}, column `{column}`: {reason} (value {value:?})")]
    BadValue {
        row: usize,
        column: &'static str,
        value: String,
        reason: &'static str,
    },
    #[error("unknown attack name `{0}` (taxonomy file out of date?)")]
    UnknownAttackName(String),
    #[error("taxonomy line {line}: {reason}")]
    Taxonomy { line: usize, reason: String },
    #[error("cannot fit an encoder on an empty training set")]
    EmptyTrainingSet,
    #[error("invalid split fractions: {0}")]
    InvalidSplit(String),
    #[error("category {category} has {count} rows, too few to appear in every split")]
    CategoryTooSmall { category: String, count: usize },
    #[error("class {class} has zero rows; cannot compute a class weight")]
    ZeroClassCount { class: usize },
    #[error("encoder document: {0}")]
    EncoderFormat(String),
}
