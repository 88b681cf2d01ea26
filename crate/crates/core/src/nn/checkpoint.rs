//! Binary checkpoint format (little-endian):
//!
//! ```text
//! magic        8 bytes  "CLSTMCKP"
//! version      u32
//! meta_len     u32
//! meta         meta_len bytes of JSON (Architecture)
//! column_hash  u64
//! n_params     u64
//! params       n_params x f64
//! checksum     32 bytes SHA-256 of everything above
//! ```

use std::path::Path;

use sha2::{Digest, Sha256};

use super::{Architecture, ConvLstmModel, NnError};

pub const MAGIC: &[u8; 8] = b"CLSTMCKP";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn encode_checkpoint(model: &ConvLstmModel) -> Vec<u8> {
    let meta = serde_json::to_vec(&model.arch).expect("architecture serialises");
    let mut buf = Vec::with_capacity(64 + meta.len() + 8 * model.params.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(meta.len() as u32).to_le_bytes());
    buf.extend_from_slice(&meta);
    buf.extend_from_slice(&model.arch.column_hash.to_le_bytes());
    buf.extend_from_slice(&(model.params.len() as u64).to_le_bytes());
    for p in &model.params {
        buf.extend_from_slice(&p.to_le_bytes());
    }
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    buf
}

struct Reader<'a> {
    buf: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], NnError> {
        let end = self.at.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| NnError::CheckpointFormat("unexpected end of payload".into()))?;
        let s = &self.buf[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, NnError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, NnError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<ConvLstmModel, NnError> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(NnError::CheckpointFormat("bad magic bytes".into()));
    }
    if bytes.len() < MAGIC.len() + 4 + 32 {
        return Err(NnError::ChecksumMismatch);
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != digest {
        return Err(NnError::ChecksumMismatch);
    }
    let mut r = Reader { buf: body, at: MAGIC.len() };
    let version = r.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(NnError::VersionMismatch {
            found: version,
            expected: CHECKPOINT_VERSION,
        });
    }
    let meta_len = r.u32()? as usize;
    let arch: Architecture = serde_json::from_slice(r.take(meta_len)?)
        .map_err(|e| NnError::CheckpointFormat(format!("metadata: {e}")))?;
    let column_hash = r.u64()?;
    if column_hash != arch.column_hash {
        return Err(NnError::CheckpointFormat("column hash disagrees with metadata".into()));
    }
    let n = r.u64()? as usize;
    let raw = r.take(n.checked_mul(8).ok_or_else(|| NnError::CheckpointFormat("parameter count overflow".into()))?)?;
    if r.at != body.len() {
        return Err(NnError::CheckpointFormat("trailing bytes".into()));
    }
    let params: Vec<f64> = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    ConvLstmModel::from_params(arch, params)
}

pub fn save_checkpoint(model: &ConvLstmModel, path: &Path) -> Result<(), NnError> {
    std::fs::write(path, encode_checkpoint(model))?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<ConvLstmModel, NnError> {
    decode_checkpoint(&std::fs::read(path)?)
}
