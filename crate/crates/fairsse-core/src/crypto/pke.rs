//! IND-CPA public-key encryption with verifiable decryption.
//!
//! Encryption is ElGamal over the ristretto255 group in hybrid (KEM-DEM)
//! mode: the KEM shared point keys a PRF keystream that masks the message,
//! so plaintexts of any length fit. Verifiable decryption reveals the KEM
//! shared point together with a discrete-log-equality sigma proof (made
//! non-interactive with the Fiat-Shamir transform) that the point is the
//! one determined by the receiver's secret key. A transparent mock backend
//! skips the sigma proof for fast protocol tests.

use curve25519_dalek::constants::RISTRETTO_BASEPOINT_TABLE;
use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar;
use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha512};

use super::prf::{hash_h, prf_g_expand, xor_bytes};
use super::CryptoError;

const KEM_DOMAIN: &[u8] = b"fairsse/kem/v1";
const DLEQ_DOMAIN: &[u8] = b"fairsse/dleq/v1";
const DEM_NONCE: &[u8] = b"dem";

const PROOF_TAG_MOCK: u8 = 0x00;
const PROOF_TAG_SIGMA: u8 = 0x01;

/// Which realization of the decryption proof to produce and require.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofBackend {
    /// DLEQ sigma proof, Fiat-Shamir transformed. The default.
    #[default]
    Sigma,
    /// Reveals the KEM point without proving it; for fast test runs.
    Mock,
}

/// Decryption key sk_e with encryption key pk_e.
pub struct EncKeyPair {
    sk: Scalar,
    pk: RistrettoPoint,
}

impl EncKeyPair {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let sk = Scalar::random(rng);
        let pk = RISTRETTO_BASEPOINT_TABLE * &sk;
        EncKeyPair { sk, pk }
    }

    pub fn public_key(&self) -> EncPublicKey {
        EncPublicKey {
            bytes: self.pk.compress().to_bytes(),
        }
    }
}

impl std::fmt::Debug for EncKeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "EncKeyPair(pk {})", hex::encode(self.public_key().bytes))
    }
}

/// Encryption key pk_e, stored on the ledger as 32 raw bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncPublicKey {
    bytes: [u8; 32],
}

impl EncPublicKey {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let bytes: [u8; 32] = bytes
            .try_into()
            .map_err(|_| CryptoError::Decode("encryption key"))?;
        decompress(&bytes, "encryption key")?;
        Ok(EncPublicKey { bytes })
    }

    fn point(&self) -> RistrettoPoint {
        decompress(&self.bytes, "encryption key").expect("validated at construction")
    }
}

/// Hybrid ciphertext: compressed KEM point followed by the masked body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ciphertext {
    kem: [u8; 32],
    body: Vec<u8>,
}

impl Ciphertext {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(32 + self.body.len());
        out.extend_from_slice(&self.kem);
        out.extend_from_slice(&self.body);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        if bytes.len() < 32 {
            return Err(CryptoError::Decode("ciphertext"));
        }
        let kem: [u8; 32] = bytes[..32].try_into().expect("length checked");
        decompress(&kem, "ciphertext")?;
        Ok(Ciphertext {
            kem,
            body: bytes[32..].to_vec(),
        })
    }
}

/// Proof that a claimed plaintext is the true decryption of a ciphertext.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecryptionProof {
    shared: [u8; 32],
    dleq: Option<DleqProof>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct DleqProof {
    a1: [u8; 32],
    a2: [u8; 32],
    z: [u8; 32],
}

impl DecryptionProof {
    pub fn to_bytes(&self) -> Vec<u8> {
        match &self.dleq {
            Some(d) => {
                let mut out = Vec::with_capacity(1 + 32 * 4);
                out.push(PROOF_TAG_SIGMA);
                out.extend_from_slice(&self.shared);
                out.extend_from_slice(&d.a1);
                out.extend_from_slice(&d.a2);
                out.extend_from_slice(&d.z);
                out
            }
            None => {
                let mut out = Vec::with_capacity(1 + 32);
                out.push(PROOF_TAG_MOCK);
                out.extend_from_slice(&self.shared);
                out
            }
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        match bytes.first() {
            Some(&PROOF_TAG_SIGMA) if bytes.len() == 1 + 32 * 4 => Ok(DecryptionProof {
                shared: bytes[1..33].try_into().expect("length checked"),
                dleq: Some(DleqProof {
                    a1: bytes[33..65].try_into().expect("length checked"),
                    a2: bytes[65..97].try_into().expect("length checked"),
                    z: bytes[97..129].try_into().expect("length checked"),
                }),
            }),
            Some(&PROOF_TAG_MOCK) if bytes.len() == 1 + 32 => Ok(DecryptionProof {
                shared: bytes[1..33].try_into().expect("length checked"),
                dleq: None,
            }),
            _ => Err(CryptoError::Decode("decryption proof")),
        }
    }
}

/// Randomized encryption of an arbitrary-length message under pk_e.
pub fn pke_encrypt<R: RngCore + CryptoRng>(
    pk: &EncPublicKey,
    m: &[u8],
    rng: &mut R,
) -> Ciphertext {
    let k = Scalar::random(rng);
    let c1 = RISTRETTO_BASEPOINT_TABLE * &k;
    let shared = pk.point() * k;
    let kem = c1.compress().to_bytes();
    let body = mask_body(&kem, &shared.compress().to_bytes(), m);
    Ciphertext { kem, body }
}

pub fn pke_decrypt(kp: &EncKeyPair, ct: &Ciphertext) -> Result<Vec<u8>, CryptoError> {
    let c1 = decompress(&ct.kem, "ciphertext")?;
    let shared = c1 * kp.sk;
    Ok(mask_body(&ct.kem, &shared.compress().to_bytes(), &ct.body))
}

/// Produce a proof that `ct` decrypts to whatever the revealed KEM point
/// determines. An honest prover calls this after decrypting; the verifier
/// is the one that checks the claimed plaintext.
pub fn prove_decryption<R: RngCore + CryptoRng>(
    backend: ProofBackend,
    kp: &EncKeyPair,
    ct: &Ciphertext,
    rng: &mut R,
) -> Result<DecryptionProof, CryptoError> {
    let c1 = decompress(&ct.kem, "ciphertext")?;
    let shared = c1 * kp.sk;
    let shared_bytes = shared.compress().to_bytes();
    let dleq = match backend {
        ProofBackend::Mock => None,
        ProofBackend::Sigma => {
            let w = Scalar::random(rng);
            let a1 = RISTRETTO_BASEPOINT_TABLE * &w;
            let a2 = c1 * w;
            let a1_bytes = a1.compress().to_bytes();
            let a2_bytes = a2.compress().to_bytes();
            let e = challenge(
                kp.public_key().as_bytes(),
                &ct.kem,
                &shared_bytes,
                &a1_bytes,
                &a2_bytes,
            );
            let z = w + e * kp.sk;
            Some(DleqProof {
                a1: a1_bytes,
                a2: a2_bytes,
                z: z.to_bytes(),
            })
        }
    };
    Ok(DecryptionProof {
        shared: shared_bytes,
        dleq,
    })
}

/// Accept iff `claimed` is the true plaintext of `ct` under the key behind
/// `pk`, as attested by `proof`. Any malformed component rejects.
pub fn verify_decryption(
    backend: ProofBackend,
    pk: &EncPublicKey,
    ct: &Ciphertext,
    claimed: &[u8],
    proof: &DecryptionProof,
) -> bool {
    let Ok(c1) = decompress(&ct.kem, "ciphertext") else {
        return false;
    };
    let Ok(shared) = decompress(&proof.shared, "proof") else {
        return false;
    };
    if backend == ProofBackend::Sigma {
        let Some(d) = &proof.dleq else {
            return false;
        };
        let (Ok(a1), Ok(a2)) = (decompress(&d.a1, "proof"), decompress(&d.a2, "proof")) else {
            return false;
        };
        let Some(z) = Scalar::from_canonical_bytes(d.z).into_option() else {
            return false;
        };
        let e = challenge(pk.as_bytes(), &ct.kem, &proof.shared, &d.a1, &d.a2);
        let lhs1 = RISTRETTO_BASEPOINT_TABLE * &z;
        let rhs1 = a1 + pk.point() * e;
        let lhs2 = c1 * z;
        let rhs2 = a2 + shared * e;
        if lhs1 != rhs1 || lhs2 != rhs2 {
            return false;
        }
    }
    if claimed.len() != ct.body.len() {
        return false;
    }
    mask_body(&ct.kem, &proof.shared, &ct.body) == claimed
}

fn mask_body(kem: &[u8; 32], shared: &[u8; 32], data: &[u8]) -> Vec<u8> {
    if data.is_empty() {
        return Vec::new();
    }
    let mut ikm = Vec::with_capacity(KEM_DOMAIN.len() + 64);
    ikm.extend_from_slice(KEM_DOMAIN);
    ikm.extend_from_slice(shared);
    ikm.extend_from_slice(kem);
    let dem_key = hash_h(&ikm);
    let stream = prf_g_expand(&dem_key, DEM_NONCE, data.len()).expect("non-empty output");
    xor_bytes(data, &stream)
}

fn challenge(
    pk: &[u8; 32],
    kem: &[u8; 32],
    shared: &[u8; 32],
    a1: &[u8; 32],
    a2: &[u8; 32],
) -> Scalar {
    let mut h = Sha512::new();
    h.update(DLEQ_DOMAIN);
    h.update(pk);
    h.update(kem);
    h.update(shared);
    h.update(a1);
    h.update(a2);
    Scalar::from_bytes_mod_order_wide(&h.finalize().into())
}

fn decompress(bytes: &[u8; 32], what: &'static str) -> Result<RistrettoPoint, CryptoError> {
    CompressedRistretto::from_slice(bytes)
        .ok()
        .and_then(|c| c.decompress())
        .ok_or(CryptoError::Decode(what))
}
