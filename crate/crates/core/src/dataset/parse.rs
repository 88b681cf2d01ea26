use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use super::schema::{FeatureKind, FeatureSchema};
use super::DatasetError;

/// One NSL-KDD connection record as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    /// Numeric features in schema order (categorical columns removed).
    pub continuous: Vec<f64>,
    /// Symbolic features in schema order.
    pub categorical: Vec<String>,
    pub attack_name: String,
    /// Difficulty score (0-21); parsed and kept out of the feature vector.
    pub difficulty: Option<u8>,
}

impl RawRecord {
    pub fn categorical_value(&self, schema: &FeatureSchema, name: &str) -> Option<&str> {
        schema
            .categorical()
            .position(|f| f.name == name)
            .map(|i| self.categorical[i].as_str())
    }

    pub fn continuous_value(&self, schema: &FeatureSchema, name: &str) -> Option<f64> {
        schema
            .continuous()
            .position(|f| f.name == name)
            .map(|i| self.continuous[i])
    }

    /// Serialises back to one comma-separated line in schema column order.
    pub fn to_line(&self, schema: &FeatureSchema) -> String {
        let mut line = String::with_capacity(160);
        let (mut ci, mut ki) = (0, 0);
        for def in schema.features() {
            if def.kind == FeatureKind::Categorical {
                line.push_str(&self.categorical[ki]);
                ki += 1;
            } else {
                let _ = write!(line, "{}", self.continuous[ci]);
                ci += 1;
            }
            line.push(',');
        }
        line.push_str(&self.attack_name);
        if let Some(d) = self.difficulty {
            let _ = write!(line, ",{d}");
        }
        line
    }
}

/// Reads an NSL-KDD text file (no header, 42 or 43 columns per row).
pub fn parse_nslkdd(path: &Path, schema: &FeatureSchema) -> Result<Vec<RawRecord>, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let records = parse_nslkdd_str(&text, schema)?;
    if records.is_empty() {
        return Err(DatasetError::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    Ok(records)
}

/// Parses in-memory text. Row numbers in errors are 1-based line numbers;
/// blank lines are skipped.
pub fn parse_nslkdd_str(text: &str, schema: &FeatureSchema) -> Result<Vec<RawRecord>, DatasetError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    // Parse shards in parallel; the first error in row order wins.
    let parsed: Vec<Result<RawRecord, DatasetError>> = lines
        .par_iter()
        .map(|&(row, line)| parse_line(row, line, schema))
        .collect();
    parsed.into_iter().collect()
}

pub fn parse_line(row: usize, line: &str, schema: &FeatureSchema) -> Result<RawRecord, DatasetError> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    let n = schema.len();
    if fields.len() != n + 1 && fields.len() != n + 2 {
        return Err(DatasetError::FieldCount {
            row,
            expected: "42|43",
            found: fields.len(),
        });
    }
    let mut continuous = Vec::with_capacity(schema.n_continuous());
    let mut categorical = Vec::with_capacity(schema.n_categorical());
    for (def, raw) in schema.features().iter().zip(&fields) {
        let bad = |reason| DatasetError::BadValue {
            row,
            column: def.name,
            value: raw.to_string(),
            reason,
        };
        match def.kind {
            FeatureKind::Categorical => {
                if raw.is_empty() {
                    return Err(bad("empty categorical value"));
                }
                categorical.push(raw.to_string());
            }
            FeatureKind::Continuous | FeatureKind::Rate => {
                let v: f64 = raw.parse().map_err(|_| bad("not a number"))?;
                if !v.is_finite() {
                    return Err(bad("not finite"));
                }
                if def.kind == FeatureKind::Rate && !(0.0..=1.0).contains(&v) {
                    return Err(bad("rate outside [0, 1]"));
                }
                continuous.push(v);
            }
        }
    }
    let attack_name = fields[n].to_string();
    if attack_name.is_empty() {
        return Err(DatasetError::BadValue {
            row,
            column: "attack_name",
            value: String::new(),
            reason: "empty label",
        });
    }
    let difficulty = match fields.get(n + 1) {
        None => None,
        Some(raw) => {
            let d: u8 = raw.parse().ok().filter(|d| *d <= 21).ok_or_else(|| DatasetError::BadValue {
                row,
                column: "difficulty",
                value: raw.to_string(),
                reason: "expected integer 0-21",
            })?;
            Some(d)
        }
    };
    Ok(RawRecord {
        continuous,
        categorical,
        attack_name,
        difficulty,
    })
}
