//! Symmetric searchable encryption over an encrypted inverted index.
//!
//! Setup turns a plaintext keyword -> file-identifier map into an ordered
//! list of (label, payload, nonce) rows; search walks the rows for one
//! keyword using a trapdoor derived from the master key, without learning
//! the keyword itself. The scheme is the generic contract the fairness
//! frameworks build on: anything that can run setup / derive_trapdoor /
//! search, with search executable from the index and trapdoor alone, can
//! be plugged in.

mod codec;
mod scheme;
mod types;

pub use codec::{decode_index, encode_index, read_index, write_index, EdbJson};
pub use scheme::{
    derive_trapdoor, search, search_trace, setup, setup_with_key, strip_padding, unmask_row,
    SearchOutcome, SearchPaging,
};
pub(crate) use scheme::setup_with_key_unchecked;
pub use types::{
    Database, EncryptedIndex, FileId, IndexRow, MasterKey, Trapdoor, ID_WIDTH, PADDING_SENTINEL,
    VIRTUAL_ID_TAG,
};

use thiserror::Error;

use crate::crypto::CryptoError;

#[derive(Debug, Error)]
pub enum SseError {
    #[error("label collision during setup; abort and re-key")]
    LabelCollision,
    #[error("keyword must be non-empty")]
    EmptyKeyword,
    #[error("block size must be at least 1")]
    InvalidBlockSize,
    #[error("invalid database: {0}")]
    InvalidDatabase(String),
    #[error("malformed index encoding: {0}")]
    Codec(String),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
