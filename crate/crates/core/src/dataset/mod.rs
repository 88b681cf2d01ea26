//! NSL-KDD ingestion and leak-free preprocessing.

mod encoder;
mod error;
mod parse;
mod schema;
mod split;
pub mod synthetic;
mod taxonomy;
mod weights;

use serde::{Deserialize, Serialize};

pub use encoder::{
    CategoryLevels, ContinuousRange, EncodedDataset, FeatureMatrix, FittedEncoder, ENCODER_FORMAT_VERSION,
};
pub use error::DatasetError;
pub use parse::{parse_line, parse_nslkdd, parse_nslkdd_str, RawRecord};
pub use schema::{FeatureDef, FeatureKind, FeatureSchema};
pub use split::{allocate_three_way, apportion, stratified_split, stratified_subsample, SplitIndices, SplitSpec};
pub use taxonomy::{AttackTaxonomy, BinaryLabel, Category, BUNDLED_TAXONOMY};
pub use weights::{compute_class_weights, ClassWeights};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Binary,
    FiveClass,
}

impl Task {
    pub fn n_classes(self) -> usize {
        match self {
            Task::Binary => 2,
            Task::FiveClass => 5,
        }
    }

    pub fn class_names(self) -> Vec<String> {
        match self {
            Task::Binary => BinaryLabel::NAMES.iter().map(|s| s.to_string()).collect(),
            Task::FiveClass => Category::ALL.iter().map(|c| c.name().to_string()).collect(),
        }
    }
}

/// Maps every record to its five-class category.
pub fn categorize(records: &[RawRecord], taxonomy: &AttackTaxonomy) -> Result<Vec<Category>, DatasetError> {
    records.iter().map(|r| taxonomy.category(&r.attack_name)).collect()
}

/// Output of [`prepare`]: the encoder fitted on the training rows, every
/// row encoded with it, and the split indices into `data`.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub encoder: FittedEncoder,
    pub data: EncodedDataset,
    pub split: SplitIndices,
}

impl Prepared {
    pub fn train(&self) -> EncodedDataset {
        self.data.select(&self.split.train)
    }

    pub fn val(&self) -> EncodedDataset {
        self.data.select(&self.split.val)
    }

    pub fn test(&self) -> EncodedDataset {
        self.data.select(&self.split.test)
    }
}

/// Label → stratified split → fit on the training rows → encode all rows.
pub fn prepare(
    records: &[RawRecord],
    schema: &FeatureSchema,
    taxonomy: &AttackTaxonomy,
    spec: &SplitSpec,
) -> Result<Prepared, DatasetError> {
    let labels: Vec<usize> = categorize(records, taxonomy)?.iter().map(|c| c.index()).collect();
    let split = stratified_split(&labels, Category::ALL.len(), spec, |c| {
        Category::from_index(c).expect("valid category").to_string()
    })?;
    let train: Vec<RawRecord> = split.train.iter().map(|&i| records[i].clone()).collect();
    let encoder = FittedEncoder::fit(schema, &train)?;
    let data = encoder.transform(records, taxonomy)?;
    Ok(Prepared { encoder, data, split })
}
