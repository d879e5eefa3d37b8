//! Keyed PRFs and the shared hash.
//!
//! `prf_f` is HMAC-SHA256; `prf_g_expand` expands the same PRF in counter
//! mode to produce an arbitrary-length keystream; `hash_h` is plain SHA-256.

use hmac::{Hmac, Mac};
use sha2::{Digest, Sha256};

use super::CryptoError;

type HmacSha256 = Hmac<Sha256>;

pub type Digest32 = [u8; 32];

/// Fixed-output PRF: HMAC-SHA256(key, input).
pub fn prf_f(key: &[u8], input: &[u8]) -> Result<Digest32, CryptoError> {
    if key.is_empty() {
        return Err(CryptoError::KeyLength {
            got: 0,
            expected: 32,
        });
    }
    let mut mac = HmacSha256::new_from_slice(key).expect("hmac accepts any non-empty key");
    mac.update(input);
    Ok(mac.finalize().into_bytes().into())
}

/// Variable-output PRF keystream: blocks of HMAC-SHA256(key, nonce || i)
/// for a big-endian 32-bit block counter i, truncated to `out_len` bytes.
pub fn prf_g_expand(key: &[u8], nonce: &[u8], out_len: usize) -> Result<Vec<u8>, CryptoError> {
    if key.is_empty() {
        return Err(CryptoError::KeyLength {
            got: 0,
            expected: 32,
        });
    }
    if out_len == 0 {
        return Err(CryptoError::EmptyOutput);
    }
    let mut out = Vec::with_capacity(out_len.next_multiple_of(32));
    let mut counter: u32 = 0;
    while out.len() < out_len {
        let mut mac = HmacSha256::new_from_slice(key).expect("hmac accepts any non-empty key");
        mac.update(nonce);
        mac.update(&counter.to_be_bytes());
        out.extend_from_slice(&mac.finalize().into_bytes());
        counter += 1;
    }
    out.truncate(out_len);
    Ok(out)
}

/// Collision-resistant hash: SHA-256.
pub fn hash_h(data: &[u8]) -> Digest32 {
    Sha256::digest(data).into()
}

/// XOR two equal-length byte strings.
pub fn xor_bytes(a: &[u8], b: &[u8]) -> Vec<u8> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}
