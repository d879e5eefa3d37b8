//! Hash-based commitment in the random oracle model: the commitment to m
//! is H(key || m) for a fresh random key of lambda/8 bytes; opening reveals
//! the key.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::prf::hash_h;
use super::{CryptoError, SecurityParam};

/// The binding, hiding envelope. Reveals nothing about m without the key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commitment {
    pub value: [u8; 32],
}

impl Commitment {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.value
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let value: [u8; 32] = bytes
            .try_into()
            .map_err(|_| CryptoError::Decode("commitment"))?;
        Ok(Commitment { value })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpeningKey {
    bytes: Vec<u8>,
}

impl OpeningKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        OpeningKey {
            bytes: bytes.to_vec(),
        }
    }
}

/// Commit to a message under a fresh random opening key.
pub fn commit_msg<R: RngCore>(
    rng: &mut R,
    param: SecurityParam,
    m: &[u8],
) -> Result<(Commitment, OpeningKey), CryptoError> {
    let mut key = vec![0u8; param.key_len()];
    rng.try_fill_bytes(&mut key)
        .map_err(|e| CryptoError::Entropy(e.to_string()))?;
    let value = commitment_value(&key, m);
    Ok((Commitment { value }, OpeningKey { bytes: key }))
}

/// Accept iff (commitment, key, m) are consistent. Rejection is a value,
/// not an error.
pub fn open_commitment(c: &Commitment, key: &OpeningKey, m: &[u8]) -> bool {
    commitment_value(&key.bytes, m) == c.value
}

fn commitment_value(key: &[u8], m: &[u8]) -> [u8; 32] {
    let mut buf = Vec::with_capacity(key.len() + m.len());
    buf.extend_from_slice(key);
    buf.extend_from_slice(m);
    hash_h(&buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::hash_h;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng() -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(99)
    }

    #[test]
    fn open_accepts_honest_triple() {
        let mut rng = rng();
        let (c, key) = commit_msg(&mut rng, SecurityParam::DEFAULT, b"message").unwrap();
        assert!(open_commitment(&c, &key, b"message"));
    }

    #[test]
    fn open_rejects_wrong_key_or_message() {
        let mut rng = rng();
        let (c, key) = commit_msg(&mut rng, SecurityParam::DEFAULT, b"message").unwrap();
        let (_, other_key) = commit_msg(&mut rng, SecurityParam::DEFAULT, b"message").unwrap();
        assert!(!open_commitment(&c, &other_key, b"message"));
        assert!(!open_commitment(&c, &key, b"other message"));
    }

    #[test]
    fn fresh_randomness_gives_distinct_commitments() {
        let mut rng = rng();
        let (c1, _) = commit_msg(&mut rng, SecurityParam::DEFAULT, b"same").unwrap();
        let (c2, _) = commit_msg(&mut rng, SecurityParam::DEFAULT, b"same").unwrap();
        assert_ne!(c1, c2);
    }

    #[test]
    fn commitment_is_not_a_plain_hash_of_the_message() {
        let mut rng = rng();
        let (c, _) = commit_msg(&mut rng, SecurityParam::DEFAULT, b"message").unwrap();
        assert_ne!(c.value, hash_h(b"message"));
    }

    // Reference vector from an independent SHA-256 implementation
    // (Python hashlib): sha256(0x01*32 || "hello").
    #[test]
    fn commitment_value_matches_reference_vector() {
        let key = OpeningKey::from_bytes(&[0x01u8; 32]);
        let c = Commitment::from_bytes(
            &hex::decode("2e997ef63bcfa3477ae8a0625220e717c407ba0fdfd0074cc79afdfd44073a76")
                .unwrap(),
        )
        .unwrap();
        assert!(open_commitment(&c, &key, b"hello"));
    }

    // Bounded binding check: no second (key', m') opening found by brute
    // search over 2^20 candidate pairs.
    #[test]
    fn binding_survives_bounded_brute_force() {
        let mut rng = rng();
        let (c, key) = commit_msg(&mut rng, SecurityParam::DEFAULT, b"bound me").unwrap();
        for i in 0u32..(1 << 20) {
            let candidate_key = hash_h(&i.to_be_bytes());
            let candidate_msg = (i ^ 0xdead_beef).to_le_bytes();
            let forged_key = OpeningKey::from_bytes(&candidate_key);
            if open_commitment(&c, &forged_key, &candidate_msg) {
                // Only the genuine opening may verify.
                assert_eq!(candidate_key.as_slice(), key.as_bytes());
                assert_eq!(candidate_msg.as_slice(), b"bound me");
                panic!("brute-force opening found");
            }
        }
    }
}
