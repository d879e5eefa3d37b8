//! Domain types for the encrypted index.

use std::collections::BTreeMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::SseError;
use crate::crypto::{SecretKey, SecurityParam};

/// Fixed identifier width in bytes, constant across a database.
pub const ID_WIDTH: usize = 16;

/// Reserved identifier used to pad the final block of each keyword's
/// postings. Never a real file id.
pub const PADDING_SENTINEL: FileId = FileId([0xFF; ID_WIDTH]);

/// Reserved leading byte marking a virtual (integrity-check) identifier.
/// Real file ids never start with this byte or the sentinel byte.
pub const VIRTUAL_ID_TAG: u8 = 0xFE;

/// A fixed-width file identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FileId(pub [u8; ID_WIDTH]);

impl FileId {
    pub fn as_bytes(&self) -> &[u8; ID_WIDTH] {
        &self.0
    }

    pub fn is_padding(&self) -> bool {
        *self == PADDING_SENTINEL
    }

    pub fn is_virtual(&self) -> bool {
        self.0[0] == VIRTUAL_ID_TAG
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, SseError> {
        let bytes = hex::decode(s).map_err(|e| SseError::Codec(e.to_string()))?;
        let arr: [u8; ID_WIDTH] = bytes
            .try_into()
            .map_err(|_| SseError::Codec("file id must be 16 bytes".into()))?;
        Ok(FileId(arr))
    }
}

/// Plaintext inverted index: keyword -> ordered set of file identifiers.
/// Insertion order of identifiers is preserved; duplicates are dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Database {
    map: BTreeMap<String, Vec<FileId>>,
}

impl Database {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, keyword: &str, id: FileId) {
        let ids = self.map.entry(keyword.to_string()).or_default();
        if !ids.contains(&id) {
            ids.push(id);
        }
    }

    /// The keyword set, in sorted order.
    pub fn keywords(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }

    pub fn ids(&self, keyword: &str) -> Option<&[FileId]> {
        self.map.get(keyword).map(Vec::as_slice)
    }

    pub fn keyword_count(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Every id across all keywords, deduplicated, sorted.
    pub fn all_ids(&self) -> Vec<FileId> {
        let mut ids: Vec<FileId> = self.map.values().flatten().copied().collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn validate(&self) -> Result<(), SseError> {
        for (keyword, ids) in &self.map {
            if keyword.is_empty() {
                return Err(SseError::InvalidDatabase("empty keyword".into()));
            }
            if ids.is_empty() {
                return Err(SseError::InvalidDatabase(format!(
                    "keyword {keyword:?} has no identifiers"
                )));
            }
            for id in ids {
                if id.is_padding() {
                    return Err(SseError::InvalidDatabase(format!(
                        "keyword {keyword:?} contains the padding sentinel"
                    )));
                }
                if id.0[0] >= VIRTUAL_ID_TAG {
                    return Err(SseError::InvalidDatabase(format!(
                        "keyword {keyword:?} contains an id with a reserved prefix byte"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl FromIterator<(String, Vec<FileId>)> for Database {
    fn from_iter<I: IntoIterator<Item = (String, Vec<FileId>)>>(iter: I) -> Self {
        let mut db = Database::new();
        for (keyword, ids) in iter {
            for id in ids {
                db.insert(&keyword, id);
            }
        }
        db
    }
}

/// The client's top-level secret for one encrypted index.
pub struct MasterKey {
    key: SecretKey,
    param: SecurityParam,
}

impl MasterKey {
    pub fn generate<R: RngCore>(param: SecurityParam, rng: &mut R) -> Result<Self, SseError> {
        Ok(MasterKey {
            key: SecretKey::generate(param, rng)?,
            param,
        })
    }

    pub fn param(&self) -> SecurityParam {
        self.param
    }

    pub(crate) fn key_bytes(&self) -> &[u8] {
        self.key.as_bytes()
    }
}

impl std::fmt::Debug for MasterKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MasterKey({} bits)", self.param.bits())
    }
}

/// One row of the encrypted index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexRow {
    /// F(K1, c) for the row's position counter c.
    pub label: [u8; 32],
    /// Masked packed identifiers; exactly block_size * ID_WIDTH bytes.
    pub payload: Vec<u8>,
    /// Fresh per-row mask nonce of lambda/8 bytes.
    pub nonce: Vec<u8>,
}

/// The outsourced artifact: rows sorted ascending by label bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptedIndex {
    rows: Vec<IndexRow>,
    block_size: usize,
    lambda: SecurityParam,
}

impl EncryptedIndex {
    pub(crate) fn from_sorted_rows(
        rows: Vec<IndexRow>,
        block_size: usize,
        lambda: SecurityParam,
    ) -> Self {
        debug_assert!(rows.windows(2).all(|w| w[0].label < w[1].label));
        EncryptedIndex {
            rows,
            block_size,
            lambda,
        }
    }

    pub fn rows(&self) -> &[IndexRow] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn lambda(&self) -> SecurityParam {
        self.lambda
    }

    pub fn id_width(&self) -> usize {
        ID_WIDTH
    }

    /// Exact-label lookup, as the ledger's Get would do it.
    pub fn lookup(&self, label: &[u8; 32]) -> Option<&IndexRow> {
        self.rows
            .binary_search_by(|row| row.label.as_slice().cmp(label))
            .ok()
            .map(|i| &self.rows[i])
    }
}

/// Per-keyword search token: the two derived keys plus the start counter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trapdoor {
    pub k1: [u8; 32],
    pub k2: [u8; 32],
    pub counter: u64,
}

impl Trapdoor {
    pub const ENCODED_LEN: usize = 72;

    /// Canonical wire form: K1 || K2 || big-endian counter.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::ENCODED_LEN);
        out.extend_from_slice(&self.k1);
        out.extend_from_slice(&self.k2);
        out.extend_from_slice(&self.counter.to_be_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SseError> {
        if bytes.len() != Self::ENCODED_LEN {
            return Err(SseError::Codec(format!(
                "trapdoor must be {} bytes, got {}",
                Self::ENCODED_LEN,
                bytes.len()
            )));
        }
        Ok(Trapdoor {
            k1: bytes[..32].try_into().expect("length checked"),
            k2: bytes[32..64].try_into().expect("length checked"),
            counter: u64::from_be_bytes(bytes[64..72].try_into().expect("length checked")),
        })
    }
}
