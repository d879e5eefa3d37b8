//! Index persistence: a versioned binary format plus a JSON debug export.
//!
//! Binary layout, all integers big-endian:
//!
//! ```text
//! magic "EDB1" | u32 lambda bits | u32 block size | u32 id width |
//! u64 row count | rows: label (32) || payload (p * id_width) || nonce (lambda/8)
//! ```
//!
//! The binary form is also the canonical serialization signed by the
//! improved framework, so round-trips must be bit-exact.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::types::{EncryptedIndex, IndexRow, ID_WIDTH};
use super::SseError;
use crate::crypto::SecurityParam;

const MAGIC: &[u8; 4] = b"EDB1";

/// Serialize an index to its canonical byte form.
pub fn encode_index(index: &EncryptedIndex) -> Vec<u8> {
    let lambda = index.lambda();
    let nonce_len = lambda.key_len();
    let row_len = 32 + index.block_size() * ID_WIDTH + nonce_len;
    let mut out = Vec::with_capacity(4 + 4 + 4 + 4 + 8 + index.row_count() * row_len);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&lambda.bits().to_be_bytes());
    out.extend_from_slice(&(index.block_size() as u32).to_be_bytes());
    out.extend_from_slice(&(ID_WIDTH as u32).to_be_bytes());
    out.extend_from_slice(&(index.row_count() as u64).to_be_bytes());
    for row in index.rows() {
        out.extend_from_slice(&row.label);
        out.extend_from_slice(&row.payload);
        out.extend_from_slice(&row.nonce);
    }
    out
}

/// Parse an index from its canonical byte form.
pub fn decode_index(bytes: &[u8]) -> Result<EncryptedIndex, SseError> {
    let header_len = 4 + 4 + 4 + 4 + 8;
    if bytes.len() < header_len {
        return Err(SseError::Codec("truncated header".into()));
    }
    if &bytes[..4] != MAGIC {
        return Err(SseError::Codec("bad magic".into()));
    }
    let lambda_bits = u32::from_be_bytes(bytes[4..8].try_into().expect("length checked"));
    let block_size = u32::from_be_bytes(bytes[8..12].try_into().expect("length checked")) as usize;
    let id_width = u32::from_be_bytes(bytes[12..16].try_into().expect("length checked")) as usize;
    let row_count = u64::from_be_bytes(bytes[16..24].try_into().expect("length checked")) as usize;
    let lambda = SecurityParam::new(lambda_bits).map_err(|e| SseError::Codec(e.to_string()))?;
    if id_width != ID_WIDTH {
        return Err(SseError::Codec(format!(
            "unsupported id width {id_width}"
        )));
    }
    if block_size == 0 {
        return Err(SseError::Codec("zero block size".into()));
    }
    let nonce_len = lambda.key_len();
    let row_len = 32 + block_size * ID_WIDTH + nonce_len;
    let body = &bytes[header_len..];
    if body.len() != row_count * row_len {
        return Err(SseError::Codec(format!(
            "body is {} bytes, expected {}",
            body.len(),
            row_count * row_len
        )));
    }
    let mut rows = Vec::with_capacity(row_count);
    for chunk in body.chunks_exact(row_len) {
        rows.push(IndexRow {
            label: chunk[..32].try_into().expect("length checked"),
            payload: chunk[32..32 + block_size * ID_WIDTH].to_vec(),
            nonce: chunk[32 + block_size * ID_WIDTH..].to_vec(),
        });
    }
    if rows.windows(2).any(|w| w[0].label >= w[1].label) {
        return Err(SseError::Codec("rows not strictly sorted by label".into()));
    }
    Ok(EncryptedIndex::from_sorted_rows(rows, block_size, lambda))
}

pub fn write_index(index: &EncryptedIndex, path: &Path) -> Result<(), SseError> {
    std::fs::write(path, encode_index(index))?;
    Ok(())
}

pub fn read_index(path: &Path) -> Result<EncryptedIndex, SseError> {
    decode_index(&std::fs::read(path)?)
}

/// Human-readable export of the same data, for debugging.
#[derive(Debug, Serialize, Deserialize)]
pub struct EdbJson {
    pub lambda_bits: u32,
    pub block_size: usize,
    pub id_width: usize,
    pub rows: Vec<EdbJsonRow>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EdbJsonRow {
    pub label: String,
    pub payload: String,
    pub nonce: String,
}

impl EdbJson {
    pub fn from_index(index: &EncryptedIndex) -> Self {
        EdbJson {
            lambda_bits: index.lambda().bits(),
            block_size: index.block_size(),
            id_width: ID_WIDTH,
            rows: index
                .rows()
                .iter()
                .map(|row| EdbJsonRow {
                    label: hex::encode(row.label),
                    payload: hex::encode(&row.payload),
                    nonce: hex::encode(&row.nonce),
                })
                .collect(),
        }
    }
}
