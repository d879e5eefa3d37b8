//! EU-CMA signatures (Ed25519) behind a thin wire-friendly wrapper.

use ed25519_dalek::{Signer, SigningKey, Verifier, VerifyingKey};
use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use super::CryptoError;

/// Signing key sk_s together with its verification key vk_s.
pub struct SignKeyPair {
    key: SigningKey,
}

impl SignKeyPair {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        SignKeyPair {
            key: SigningKey::generate(rng),
        }
    }

    pub fn verify_key(&self) -> VerifyKey {
        VerifyKey {
            bytes: self.key.verifying_key().to_bytes(),
        }
    }
}

impl std::fmt::Debug for SignKeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SignKeyPair(vk {})", hex::encode(self.verify_key().bytes))
    }
}

/// Public verification key, stored on the ledger as 32 raw bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyKey {
    bytes: [u8; 32],
}

impl VerifyKey {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let bytes: [u8; 32] = bytes
            .try_into()
            .map_err(|_| CryptoError::Decode("verify key"))?;
        // Reject encodings that are not valid curve points up front.
        VerifyingKey::from_bytes(&bytes).map_err(|_| CryptoError::Decode("verify key"))?;
        Ok(VerifyKey { bytes })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    bytes: Vec<u8>,
}

impl Signature {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        if bytes.len() != 64 {
            return Err(CryptoError::Decode("signature"));
        }
        Ok(Signature {
            bytes: bytes.to_vec(),
        })
    }
}

pub fn sign(kp: &SignKeyPair, m: &[u8]) -> Signature {
    Signature {
        bytes: kp.key.sign(m).to_vec(),
    }
}

/// Deterministic verification; accept is `true`.
pub fn verify_sig(vk: &VerifyKey, m: &[u8], sig: &Signature) -> bool {
    let Ok(key) = VerifyingKey::from_bytes(&vk.bytes) else {
        return false;
    };
    let Ok(sig_bytes) = <&[u8; 64]>::try_from(sig.bytes.as_slice()) else {
        return false;
    };
    key.verify(m, &ed25519_dalek::Signature::from_bytes(sig_bytes))
        .is_ok()
}
