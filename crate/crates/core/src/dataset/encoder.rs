//! Leak-free feature encoding: min-max scaling for numeric columns and
//! one-hot blocks for symbolic columns, fitted on training rows only.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::parse::RawRecord;
use super::schema::FeatureSchema;
use super::taxonomy::{AttackTaxonomy, Category};
use super::DatasetError;

pub const ENCODER_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousRange {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

impl ContinuousRange {
    /// `(x - min) / (max - min)` clamped to `[0, 1]`; constant columns map to 0.
    #[inline]
    pub fn scale(&self, x: f64) -> f64 {
        let span = self.max - self.min;
        if span <= 0.0 {
            0.0
        } else {
            ((x - self.min) / span).clamp(0.0, 1.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryLevels {
    pub name: String,
    /// Deduplicated, lexicographically sorted.
    pub levels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedEncoder {
    pub format_version: u32,
    pub continuous: Vec<ContinuousRange>,
    pub categorical: Vec<CategoryLevels>,
}

/// Dense row-major matrix tagged with the column layout it was encoded under.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<f64>,
    pub column_hash: u64,
}

impl FeatureMatrix {
    pub fn new(n_cols: usize, data: Vec<f64>, column_hash: u64) -> Self {
        assert!(n_cols > 0 && data.len().is_multiple_of(n_cols), "ragged feature matrix");
        Self {
            n_rows: data.len() / n_cols,
            n_cols,
            data,
            column_hash,
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            n_rows: indices.len(),
            n_cols: self.n_cols,
            data,
            column_hash: self.column_hash,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDataset {
    pub features: FeatureMatrix,
    /// 0 = Normal, 1 = Attack.
    pub binary: Vec<usize>,
    /// Category indices (see [`Category`]).
    pub five_class: Vec<usize>,
    pub class_counts: [usize; 5],
}

impl EncodedDataset {
    pub fn len(&self) -> usize {
        self.features.n_rows
    }

    pub fn is_empty(&self) -> bool {
        self.features.n_rows == 0
    }

    pub fn labels(&self, task: super::Task) -> &[usize] {
        match task {
            super::Task::Binary => &self.binary,
            super::Task::FiveClass => &self.five_class,
        }
    }

    pub fn categories(&self) -> Vec<Category> {
        self.five_class
            .iter()
            .map(|&c| Category::from_index(c).expect("valid category index"))
            .collect()
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        let five_class: Vec<usize> = indices.iter().map(|&i| self.five_class[i]).collect();
        Self {
            features: self.features.select(indices),
            binary: indices.iter().map(|&i| self.binary[i]).collect(),
            class_counts: count_categories(&five_class),
            five_class,
        }
    }
}

fn count_categories(labels: &[usize]) -> [usize; 5] {
    let mut counts = [0; 5];
    for &c in labels {
        counts[c] += 1;
    }
    counts
}

impl FittedEncoder {
    /// Fits category levels and numeric ranges. Only the given rows are seen.
    pub fn fit(schema: &FeatureSchema, train: &[RawRecord]) -> Result<Self, DatasetError> {
        if train.is_empty() {
            return Err(DatasetError::EmptyTrainingSet);
        }
        let continuous = schema
            .continuous()
            .enumerate()
            .map(|(j, def)| {
                let (min, max) = train.iter().map(|r| r.continuous[j]).fold(
                    (f64::INFINITY, f64::NEG_INFINITY),
                    |(lo, hi), x| (lo.min(x), hi.max(x)),
                );
                ContinuousRange {
                    name: def.name.to_string(),
                    min,
                    max,
                }
            })
            .collect();
        let categorical = schema
            .categorical()
            .enumerate()
            .map(|(j, def)| {
                let levels: BTreeSet<&str> = train.iter().map(|r| r.categorical[j].as_str()).collect();
                CategoryLevels {
                    name: def.name.to_string(),
                    levels: levels.into_iter().map(str::to_string).collect(),
                }
            })
            .collect();
        Ok(Self {
            format_version: ENCODER_FORMAT_VERSION,
            continuous,
            categorical,
        })
    }

    /// Encoded width: numeric columns plus the sum of category cardinalities.
    pub fn n_columns(&self) -> usize {
        self.continuous.len() + self.categorical.iter().map(|c| c.levels.len()).sum::<usize>()
    }

    /// Column names in encoded order; one-hot columns are `feature=level`.
    pub fn column_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.continuous.iter().map(|c| c.name.clone()).collect();
        for block in &self.categorical {
            names.extend(block.levels.iter().map(|l| format!("{}={}", block.name, l)));
        }
        names
    }

    /// First 8 bytes (little-endian) of SHA-256 over the newline-joined column names.
    pub fn column_hash(&self) -> u64 {
        let digest = Sha256::digest(self.column_names().join("\n").as_bytes());
        u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
    }

    /// Writes one encoded row into `out` (length [`Self::n_columns`]).
    pub fn encode_row(&self, record: &RawRecord, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n_columns());
        let (scaled, onehot) = out.split_at_mut(self.continuous.len());
        for ((dst, range), &x) in scaled.iter_mut().zip(&self.continuous).zip(&record.continuous) {
            *dst = range.scale(x);
        }
        onehot.fill(0.0);
        let mut offset = 0;
        for (block, value) in self.categorical.iter().zip(&record.categorical) {
            // Unseen levels leave the block all-zero.
            if let Ok(k) = block.levels.binary_search(value) {
                onehot[offset + k] = 1.0;
            }
            offset += block.levels.len();
        }
    }

    pub fn transform(
        &self,
        records: &[RawRecord],
        taxonomy: &AttackTaxonomy,
    ) -> Result<EncodedDataset, DatasetError> {
        let width = self.n_columns();
        let mut data = vec![0.0; records.len() * width];
        for (record, row) in records.iter().zip(data.chunks_exact_mut(width)) {
            self.encode_row(record, row);
        }
        let categories = records
            .iter()
            .map(|r| taxonomy.category(&r.attack_name))
            .collect::<Result<Vec<_>, _>>()?;
        let five_class: Vec<usize> = categories.iter().map(|c| c.index()).collect();
        Ok(EncodedDataset {
            features: FeatureMatrix {
                n_rows: records.len(),
                n_cols: width,
                data,
                column_hash: self.column_hash(),
            },
            binary: categories.iter().map(|c| c.binary().index()).collect(),
            class_counts: count_categories(&five_class),
            five_class,
        })
    }

    /// Recovers the level named by a one-hot block; `None` for the all-zero block.
    pub fn decode_category(&self, feature: usize, block: &[f64]) -> Option<&str> {
        let levels = &self.categorical.get(feature)?.levels;
        if block.len() != levels.len() {
            return None;
        }
        block
            .iter()
            .position(|&v| v == 1.0)
            .map(|k| levels[k].as_str())
    }

    /// Offset of each one-hot block within an encoded row.
    pub fn block_offsets(&self) -> Vec<usize> {
        let mut offset = self.continuous.len();
        self.categorical
            .iter()
            .map(|b| {
                let start = offset;
                offset += b.levels.len();
                start
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("encoder serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, DatasetError> {
        let enc: Self =
            serde_json::from_str(text).map_err(|e| DatasetError::EncoderFormat(e.to_string()))?;
        if enc.format_version != ENCODER_FORMAT_VERSION {
            return Err(DatasetError::EncoderFormat(format!(
                "format version {} (expected {ENCODER_FORMAT_VERSION})",
                enc.format_version
            )));
        }
        if enc.continuous.iter().any(|c| c.min.partial_cmp(&c.max).is_none_or(|o| o.is_gt())) {
            return Err(DatasetError::EncoderFormat("min > max".into()));
        }
        Ok(enc)
    }
}
