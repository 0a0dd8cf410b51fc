//! On-disk and in-memory caching of block encodings.
//!
//! File layout (all little-endian):
//!
//! | bytes | content                          |
//! |-------|----------------------------------|
//! | 8     | magic `PSMPOUH\0`                |
//! | 4     | format version, `u32` (= 1)      |
//! | 4     | k-register width `n_k`, `u32`    |
//! | 8     | `η`, `f64`                       |
//! | 8·M²  | `U_H` row-major `f64`, `M = 4·2^n_k` |

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use super::{build_block_encoding, BlockEncoding, MAX_K_QUBITS};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const MAGIC: &[u8; 8] = b"PSMPOUH\0";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 4 + 8;

pub fn encode(enc: &BlockEncoding) -> Vec<u8> {
    let data = enc.matrix().as_slice();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * data.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(enc.n_k() as u32).to_le_bytes());
    out.extend_from_slice(&enc.eta().to_le_bytes());
    for x in data {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<BlockEncoding> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Cache("truncated header".into()));
    }
    if &bytes[..8] != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
    let version = word(8);
    if version != FORMAT_VERSION {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    let n_k = word(12) as usize;
    if n_k > MAX_K_QUBITS {
        return Err(Error::Cache(format!("n_k = {n_k} out of range")));
    }
    let eta = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let dim = 4usize << n_k;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != 8 * dim * dim {
        return Err(Error::Cache(format!(
            "payload is {} bytes, expected {}",
            payload.len(),
            8 * dim * dim
        )));
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let u_h = Matrix::from_row_major(dim, dim, data)?;
    BlockEncoding::from_parts(n_k, eta, u_h).map_err(|e| Error::Cache(format!("stored operator rejected: {e}")))
}

pub fn write_file(path: &Path, enc: &BlockEncoding) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&encode(enc))?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_file(path: &Path) -> Result<BlockEncoding> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}

/// Shared, lazily built block encodings keyed by `n_k`, optionally backed
/// by a directory of cache files.
#[derive(Debug, Default)]
pub struct BlockEncodingCache {
    dir: Option<PathBuf>,
    memory: Mutex<HashMap<usize, Arc<BlockEncoding>>>,
}

impl BlockEncodingCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: Some(dir.into()),
            memory: Mutex::default(),
        }
    }

    pub fn file_name(n_k: usize) -> String {
        format!("psmpo_uh_n{n_k}.bin")
    }

    pub fn get(&self, n_k: usize) -> Result<Arc<BlockEncoding>> {
        let mut memory = self.memory.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(enc) = memory.get(&n_k) {
            return Ok(Arc::clone(enc));
        }
        let enc = match &self.dir {
            Some(dir) => {
                let path = dir.join(Self::file_name(n_k));
                match read_file(&path) {
                    Ok(enc) if enc.n_k() == n_k => enc,
                    _ => {
                        let enc = build_block_encoding(n_k)?;
                        fs::create_dir_all(dir)?;
                        write_file(&path, &enc)?;
                        enc
                    }
                }
            }
            None => build_block_encoding(n_k)?,
        };
        let enc = Arc::new(enc);
        memory.insert(n_k, Arc::clone(&enc));
        Ok(enc)
    }
}
