//! Binary container for encoded splits.
//!
//! Layout (little-endian): magic `IDSENC01`, u64 rows, u64 cols, u64 column
//! hash, `rows*cols` f64 features, then one category byte per row.

use std::io::{BufWriter, Read, Write};
use std::path::Path;

use ids_core::dataset::{Category, EncodedDataset, FeatureMatrix};

use crate::error::{CliError, Result};

const MAGIC: &[u8; 8] = b"IDSENC01";

pub fn write_encoded(path: &Path, data: &EncodedDataset) -> Result<()> {
    let file = std::fs::File::create(path).map_err(CliError::io(path))?;
    let mut w = BufWriter::new(file);
    let f = &data.features;
    let mut put = |bytes: &[u8]| w.write_all(bytes).map_err(CliError::io(path));
    put(MAGIC)?;
    put(&(f.n_rows as u64).to_le_bytes())?;
    put(&(f.n_cols as u64).to_le_bytes())?;
    put(&f.column_hash.to_le_bytes())?;
    for v in &f.data {
        put(&v.to_le_bytes())?;
    }
    let cats: Vec<u8> = data.five_class.iter().map(|&c| c as u8).collect();
    put(&cats)?;
    w.flush().map_err(CliError::io(path))
}

pub fn read_encoded(path: &Path) -> Result<EncodedDataset> {
    let bad = |reason: &str| CliError::Artifact {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(CliError::io(path))?;
    if bytes.len() < 32 || &bytes[..8] != MAGIC {
        return Err(bad("not an encoded split file"));
    }
    let word = |i: usize| u64::from_le_bytes(bytes[8 + 8 * i..16 + 8 * i].try_into().expect("8 bytes"));
    let (rows, cols, hash) = (word(0) as usize, word(1) as usize, word(2));
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(32 + rows))
        .ok_or_else(|| bad("header overflow"))?;
    if bytes.len() != expected {
        return Err(bad("size does not match header"));
    }
    let body = &bytes[32..32 + rows * cols * 8];
    let data: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let mut five_class = Vec::with_capacity(rows);
    let mut binary = Vec::with_capacity(rows);
    let mut class_counts = [0usize; 5];
    for &b in &bytes[32 + rows * cols * 8..] {
        let cat = Category::from_index(b as usize).ok_or_else(|| bad("invalid category byte"))?;
        five_class.push(cat.index());
        binary.push(cat.binary().index());
        class_counts[cat.index()] += 1;
    }
    Ok(EncodedDataset {
        features: FeatureMatrix::new(cols, data, hash),
        binary,
        five_class,
        class_counts,
    })
}
