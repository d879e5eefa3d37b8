//! Setup and search for the encrypted inverted index.

use rand::RngCore;

use super::types::{
    Database, EncryptedIndex, FileId, IndexRow, MasterKey, Trapdoor, ID_WIDTH, PADDING_SENTINEL,
};
use super::SseError;
use crate::crypto::{prf_f, prf_g_expand, SecurityParam};

const KEY1_PREFIX: u8 = 0x01;
const KEY2_PREFIX: u8 = 0x02;

/// Bounds one search: at most `rounds` token submissions consuming at most
/// `step` rows each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchPaging {
    pub rounds: u64,
    pub step: u64,
}

impl SearchPaging {
    pub fn new(rounds: u64, step: u64) -> Result<Self, SseError> {
        if rounds == 0 || step == 0 {
            return Err(SseError::InvalidBlockSize);
        }
        Ok(SearchPaging { rounds, step })
    }

    /// Enough paging to exhaust any keyword at desk scale.
    pub fn ample() -> Self {
        SearchPaging {
            rounds: 1,
            step: u64::MAX,
        }
    }

    pub fn max_rows(&self) -> u64 {
        self.rounds.saturating_mul(self.step)
    }
}

/// Everything one search touched, for tracing and analysis.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    /// Unmasked identifier blocks in counter order, padding included.
    pub blocks: Vec<Vec<FileId>>,
    /// The labels looked up, in order, including the final miss if any.
    pub labels: Vec<[u8; 32]>,
    /// Rows actually consumed (hits only).
    pub rows_consumed: usize,
}

impl SearchOutcome {
    /// Concatenated identifiers with padding stripped, block order kept.
    pub fn ids(&self) -> Vec<FileId> {
        strip_padding(self.blocks.iter().flatten().copied())
    }
}

/// Build the encrypted index for `db` under a fresh master key.
///
/// Each keyword w emits exactly floor(|DB(w)|/p) + 1 rows with consecutive
/// counters from 0; the final block is padded with the sentinel id. Rows
/// are merged and sorted ascending by label bytes.
pub fn setup<R: RngCore>(
    db: &Database,
    lambda: SecurityParam,
    block_size: usize,
    rng: &mut R,
) -> Result<(MasterKey, EncryptedIndex), SseError> {
    let master = MasterKey::generate(lambda, rng)?;
    let index = setup_with_key(db, &master, block_size, rng)?;
    Ok((master, index))
}

/// Setup under a caller-held master key; used when several indexes must be
/// rebuilt or compared deterministically.
pub fn setup_with_key<R: RngCore>(
    db: &Database,
    master: &MasterKey,
    block_size: usize,
    rng: &mut R,
) -> Result<EncryptedIndex, SseError> {
    db.validate()?;
    setup_with_key_unchecked(db, master, block_size, rng)
}

/// Setup without the database invariant check; the single-server framework
/// feeds an augmented database that deliberately carries tagged virtual
/// identifiers.
pub(crate) fn setup_with_key_unchecked<R: RngCore>(
    db: &Database,
    master: &MasterKey,
    block_size: usize,
    rng: &mut R,
) -> Result<EncryptedIndex, SseError> {
    if block_size == 0 {
        return Err(SseError::InvalidBlockSize);
    }
    let lambda = master.param();
    let nonce_len = lambda.key_len();
    let mut rows = Vec::new();

    for keyword in db.keywords() {
        let trapdoor = derive_trapdoor(master, keyword)?;
        let ids = db.ids(keyword).expect("keyword comes from the database");
        // alpha + 1 blocks, always: a multiple-of-p posting list still gets
        // one trailing all-padding block, so block count = alpha + 1 holds
        // uniformly and search termination is uniform too.
        let blocks = ids.len() / block_size + 1;
        for c in 0..blocks as u64 {
            let mut packed = Vec::with_capacity(block_size * ID_WIDTH);
            for slot in 0..block_size {
                let idx = c as usize * block_size + slot;
                let id = ids.get(idx).copied().unwrap_or(PADDING_SENTINEL);
                packed.extend_from_slice(id.as_bytes());
            }
            let mut nonce = vec![0u8; nonce_len];
            rng.try_fill_bytes(&mut nonce)
                .map_err(|e| SseError::Crypto(crate::crypto::CryptoError::Entropy(e.to_string())))?;
            let mask = prf_g_expand(&trapdoor.k2, &nonce, packed.len())?;
            let payload: Vec<u8> = packed.iter().zip(&mask).map(|(a, b)| a ^ b).collect();
            let label = prf_f(&trapdoor.k1, &c.to_be_bytes())?;
            rows.push(IndexRow {
                label,
                payload,
                nonce,
            });
        }
    }

    rows.sort_unstable_by(|a, b| a.label.cmp(&b.label));
    if rows.windows(2).any(|w| w[0].label == w[1].label) {
        return Err(SseError::LabelCollision);
    }
    Ok(EncryptedIndex::from_sorted_rows(rows, block_size, lambda))
}

/// Derive the per-keyword token (K1, K2, c=0).
pub fn derive_trapdoor(master: &MasterKey, keyword: &str) -> Result<Trapdoor, SseError> {
    if keyword.is_empty() {
        return Err(SseError::EmptyKeyword);
    }
    let k1 = prf_f(master.key_bytes(), &prefixed(KEY1_PREFIX, keyword))?;
    let k2 = prf_f(master.key_bytes(), &prefixed(KEY2_PREFIX, keyword))?;
    Ok(Trapdoor { k1, k2, counter: 0 })
}

fn prefixed(prefix: u8, keyword: &str) -> Vec<u8> {
    let mut buf = Vec::with_capacity(1 + keyword.len());
    buf.push(prefix);
    buf.extend_from_slice(keyword.as_bytes());
    buf
}

/// Search the index with a trapdoor, returning the matched identifiers in
/// block order with padding stripped. Absent keywords yield an empty list.
pub fn search(index: &EncryptedIndex, trapdoor: &Trapdoor, paging: SearchPaging) -> Vec<FileId> {
    search_trace(index, trapdoor, paging).ids()
}

/// As [`search`], but exposing the full access trace.
pub fn search_trace(
    index: &EncryptedIndex,
    trapdoor: &Trapdoor,
    paging: SearchPaging,
) -> SearchOutcome {
    let mut outcome = SearchOutcome {
        blocks: Vec::new(),
        labels: Vec::new(),
        rows_consumed: 0,
    };
    let mut counter = trapdoor.counter;
    'rounds: for _ in 0..paging.rounds {
        for _ in 0..paging.step {
            let label = prf_f(&trapdoor.k1, &counter.to_be_bytes()).expect("non-empty key");
            outcome.labels.push(label);
            let Some(row) = index.lookup(&label) else {
                break 'rounds;
            };
            outcome
                .blocks
                .push(unmask_row(&trapdoor.k2, &row.payload, &row.nonce));
            outcome.rows_consumed += 1;
            counter += 1;
        }
    }
    outcome
}

/// Unmask one payload into its packed identifiers.
pub fn unmask_row(k2: &[u8; 32], payload: &[u8], nonce: &[u8]) -> Vec<FileId> {
    let mask = prf_g_expand(k2, nonce, payload.len()).expect("non-empty output");
    payload
        .chunks_exact(ID_WIDTH)
        .zip(mask.chunks_exact(ID_WIDTH))
        .map(|(chunk, mask_chunk)| {
            let mut id = [0u8; ID_WIDTH];
            for (i, byte) in id.iter_mut().enumerate() {
                *byte = chunk[i] ^ mask_chunk[i];
            }
            FileId(id)
        })
        .collect()
}

/// Drop sentinel entries, preserving order.
pub fn strip_padding(ids: impl IntoIterator<Item = FileId>) -> Vec<FileId> {
    ids.into_iter().filter(|id| !id.is_padding()).collect()
}
