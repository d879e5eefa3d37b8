//! Cryptographic primitives consumed by the search schemes and the
//! fairness frameworks: PRFs, hashing, hash-based commitments, signatures,
//! and public-key encryption with verifiable decryption.
//!
//! Everything here is deterministic given its inputs, or draws randomness
//! from a caller-supplied RNG so that whole protocol runs replay exactly.

mod commitment;
mod pke;
mod prf;
mod sign;

pub use commitment::{commit_msg, open_commitment, Commitment, OpeningKey};
pub use pke::{
    pke_decrypt, pke_encrypt, prove_decryption, verify_decryption, Ciphertext, DecryptionProof,
    EncKeyPair, EncPublicKey, ProofBackend,
};
pub use prf::{hash_h, prf_f, prf_g_expand, Digest32};
pub use sign::{sign, verify_sig, SignKeyPair, Signature, VerifyKey};

use rand::RngCore;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CryptoError {
    #[error("key is {got} bytes, expected {expected}")]
    KeyLength { got: usize, expected: usize },
    #[error("requested zero-length PRF output")]
    EmptyOutput,
    #[error("entropy source failed: {0}")]
    Entropy(String),
    #[error("malformed {0} encoding")]
    Decode(&'static str),
    #[error("security parameter {0} is not a supported bit length")]
    BadSecurityParam(u32),
}

/// Security parameter lambda, in bits. Keys and nonces are lambda/8 bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SecurityParam(u32);

impl SecurityParam {
    pub const DEFAULT: SecurityParam = SecurityParam(256);

    pub fn new(bits: u32) -> Result<Self, CryptoError> {
        if bits % 8 != 0 || !(128..=512).contains(&bits) {
            return Err(CryptoError::BadSecurityParam(bits));
        }
        Ok(SecurityParam(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// lambda / 8
    pub fn key_len(self) -> usize {
        self.0 as usize / 8
    }
}

impl Default for SecurityParam {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Fixed-length secret key material of exactly lambda/8 bytes.
#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey {
    bytes: Vec<u8>,
}

impl SecretKey {
    pub fn generate<R: RngCore>(param: SecurityParam, rng: &mut R) -> Result<Self, CryptoError> {
        let mut bytes = vec![0u8; param.key_len()];
        rng.try_fill_bytes(&mut bytes)
            .map_err(|e| CryptoError::Entropy(e.to_string()))?;
        Ok(SecretKey { bytes })
    }

    pub fn from_bytes(param: SecurityParam, bytes: &[u8]) -> Result<Self, CryptoError> {
        if bytes.len() != param.key_len() {
            return Err(CryptoError::KeyLength {
                got: bytes.len(),
                expected: param.key_len(),
            });
        }
        Ok(SecretKey {
            bytes: bytes.to_vec(),
        })
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }
}

impl AsRef<[u8]> for SecretKey {
    fn as_ref(&self) -> &[u8] {
        &self.bytes
    }
}

// Keys never print their material.
impl std::fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SecretKey({} bytes)", self.bytes.len())
    }
}
