//! Shared test support: random database generation and the brute-force
//! plaintext scan oracle the encrypted search is checked against.
//!
//! The oracle deliberately knows nothing about the encrypted index: it
//! answers queries straight from the plaintext map.

#![allow(dead_code)]

use rand::{Rng, RngCore};

use fairsse_core::sse::{Database, FileId, ID_WIDTH};

/// Random database with up to `max_keywords` keywords and up to
/// `max_ids_per_keyword` identifiers each. Identifiers stay out of the
/// reserved prefix range.
pub fn random_database<R: RngCore>(
    rng: &mut R,
    max_keywords: usize,
    max_ids_per_keyword: usize,
) -> Database {
    let mut db = Database::new();
    let keywords = rng.gen_range(1..=max_keywords);
    for k in 0..keywords {
        let keyword = format!("kw{k:03}");
        let count = rng.gen_range(1..=max_ids_per_keyword);
        for _ in 0..count {
            db.insert(&keyword, random_file_id(rng));
        }
    }
    db
}

pub fn random_file_id<R: RngCore>(rng: &mut R) -> FileId {
    let mut raw = [0u8; ID_WIDTH];
    rng.fill_bytes(&mut raw);
    raw[0] &= 0x7F;
    FileId(raw)
}

/// The independent oracle: scan the plaintext database.
pub fn plaintext_scan(db: &Database, keyword: &str) -> Vec<FileId> {
    db.ids(keyword).map(<[FileId]>::to_vec).unwrap_or_default()
}
