//! The two fairness frameworks. Both keep search off-chain at dedicated
//! server(s) and use the ledger only to make faithful execution and
//! payment enforceable: the multi-server design cross-checks committed
//! result digests, the single-server design signs the artifacts and
//! adjudicates disputes on-chain.

pub mod improved;
pub mod initial;

use thiserror::Error;

use crate::crypto::{hash_h, CryptoError};
use crate::ledger::LedgerError;
use crate::sse::{FileId, SseError};

#[derive(Debug, Error)]
pub enum FrameworkError {
    #[error("multi-server framework needs at least 2 servers, got {0}")]
    Config(usize),
    #[error("required deposit missing; server aborts")]
    AbortNoDeposit,
    #[error("retrieved identifiers fail the on-chain digest check")]
    RetrievalIntegrity,
    #[error("session is in state {state}, expected {expected}")]
    Phase { state: String, expected: String },
    #[error("signature verification failed; server aborts before searching")]
    ServerAbort,
    #[error(transparent)]
    Sse(#[from] SseError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
}

/// Canonical byte encoding of a result identifier set: lex-ordered,
/// padding-stripped, fixed-width concatenation. Signatures, commitments,
/// and hashes are over bytes, so the ordering must be canonical or honest
/// parties with differently-ordered results would spuriously mismatch.
pub fn canonical_id_bytes(ids: &[FileId]) -> Vec<u8> {
    let mut sorted: Vec<FileId> = ids.iter().filter(|id| !id.is_padding()).copied().collect();
    sorted.sort_unstable();
    let mut out = Vec::with_capacity(sorted.len() * 16);
    for id in sorted {
        out.extend_from_slice(id.as_bytes());
    }
    out
}

/// H(ID_w || r) over the canonical encoding; what the multi-server design
/// commits to and the client later checks retrieval against.
pub fn result_digest(ids: &[FileId], nonce: &[u8]) -> [u8; 32] {
    let mut buf = canonical_id_bytes(ids);
    buf.extend_from_slice(nonce);
    hash_h(&buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(b: u8) -> FileId {
        FileId([b; 16])
    }

    #[test]
    fn canonical_encoding_sorts_and_strips() {
        let a = canonical_id_bytes(&[id(3), crate::sse::PADDING_SENTINEL, id(1)]);
        let b = canonical_id_bytes(&[id(1), id(3)]);
        assert_eq!(a, b);
        assert_eq!(a.len(), 32);
    }

    #[test]
    fn digest_depends_on_order_sensitive_encoding_and_nonce() {
        let ids = [id(1), id(2)];
        let d1 = result_digest(&ids, b"nonce-a");
        let d2 = result_digest(&ids, b"nonce-b");
        assert_ne!(d1, d2);
        let swapped = [id(2), id(1)];
        assert_eq!(result_digest(&swapped, b"nonce-a"), d1, "canonical order");
        let tampered = [id(1), id(9)];
        assert_ne!(result_digest(&tampered, b"nonce-a"), d1);
    }
}
