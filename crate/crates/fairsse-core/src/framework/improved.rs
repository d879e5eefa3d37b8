//! Single-server framework: per-keyword virtual identifiers act as a MAC
//! over each result set, the encrypted index and every trapdoor are
//! signed, results travel encrypted on-chain, and a four-step on-chain
//! dispute procedure settles every disagreement as Action type-1 (server
//! favored) or type-2 (client favored).

use std::collections::BTreeMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::FrameworkError;
use crate::analysis::ExecutionTrace;
use crate::crypto::{
    hash_h, pke_decrypt, pke_encrypt, prove_decryption, sign, verify_decryption, verify_sig,
    Ciphertext, DecryptionProof, EncKeyPair, EncPublicKey, ProofBackend, SecretKey, SecurityParam,
    SignKeyPair, Signature, VerifyKey,
};
use crate::ledger::{
    LedgerState, Party, SettlementAction, SettlementContext, SettlementKind,
};
use crate::sse::{
    decode_index, derive_trapdoor, encode_index, search_trace, Database, EncryptedIndex, FileId,
    MasterKey, SearchPaging, Trapdoor, ID_WIDTH, VIRTUAL_ID_TAG,
};

const VK_ITEM: &str = "setup/vk_s";
const PK_ITEM: &str = "setup/pk_e";
const SIG_I_ITEM: &str = "setup/sig_i";

/// An encrypted index together with the client's signature over its
/// canonical serialization.
#[derive(Debug, Clone)]
pub struct SignedIndex {
    pub index: EncryptedIndex,
    pub sig: Signature,
}

/// Client-side secrets plus the public artifacts of one deployment.
pub struct ImprovedDeployment {
    pub lambda: SecurityParam,
    pub block_size: usize,
    pub backend: ProofBackend,
    pub verify_key: VerifyKey,
    pub enc_key: EncPublicKey,
    /// The index copy handed to the server at setup.
    pub signed_index: SignedIndex,
    master: MasterKey,
    keyword_keys: BTreeMap<String, SecretKey>,
    sign_keys: SignKeyPair,
    enc_keys: EncKeyPair,
}

impl ImprovedDeployment {
    pub fn trapdoor(&self, keyword: &str) -> Result<Trapdoor, FrameworkError> {
        Ok(derive_trapdoor(&self.master, keyword)?)
    }

    pub fn keyword_key(&self, keyword: &str) -> Option<&SecretKey> {
        self.keyword_keys.get(keyword)
    }
}

/// The virtual identifier for one keyword: a tagged truncation of
/// H(K_w || ID_w), recomputable by the client from the returned ids.
pub fn virtual_id(keyword_key: &SecretKey, ids: &[FileId]) -> FileId {
    let mut sorted: Vec<FileId> = ids.iter().filter(|id| !id.is_padding()).copied().collect();
    sorted.sort_unstable();
    let mut buf = Vec::with_capacity(keyword_key.as_bytes().len() + sorted.len() * ID_WIDTH);
    buf.extend_from_slice(keyword_key.as_bytes());
    for id in &sorted {
        buf.extend_from_slice(id.as_bytes());
    }
    let digest = hash_h(&buf);
    let mut raw = [0u8; ID_WIDTH];
    raw[0] = VIRTUAL_ID_TAG;
    raw[1..].copy_from_slice(&digest[..ID_WIDTH - 1]);
    FileId(raw)
}

/// Canonical plaintext of a search result: the virtual identifier first,
/// then the real identifiers in lex order.
pub fn canonical_result_bytes(ids: &[FileId]) -> Vec<u8> {
    let mut virtuals: Vec<FileId> = Vec::new();
    let mut reals: Vec<FileId> = Vec::new();
    for id in ids {
        if id.is_padding() {
            continue;
        }
        if id.is_virtual() {
            virtuals.push(*id);
        } else {
            reals.push(*id);
        }
    }
    reals.sort_unstable();
    let mut out = Vec::with_capacity((virtuals.len() + reals.len()) * ID_WIDTH);
    for id in virtuals.iter().chain(&reals) {
        out.extend_from_slice(id.as_bytes());
    }
    out
}

fn parse_result_bytes(bytes: &[u8]) -> Option<Vec<FileId>> {
    if bytes.len() % ID_WIDTH != 0 {
        return None;
    }
    Some(
        bytes
            .chunks_exact(ID_WIDTH)
            .map(|c| FileId(c.try_into().expect("chunked exactly")))
            .collect(),
    )
}

/// Run the underlying setup over the database augmented with one virtual
/// identifier per keyword, sign the index, and publish vk_s, pk_e, and
/// sig_I on the ledger.
pub fn setup_improved<R: RngCore + rand::CryptoRng>(
    ledger: &mut LedgerState,
    client: &Party,
    db: &Database,
    lambda: SecurityParam,
    block_size: usize,
    backend: ProofBackend,
    rng: &mut R,
) -> Result<ImprovedDeployment, FrameworkError> {
    db.validate().map_err(FrameworkError::Sse)?;
    let mut keyword_keys = BTreeMap::new();
    let mut augmented = Database::new();
    for keyword in db.keywords() {
        let ids = db.ids(keyword).expect("keyword from db");
        let key = SecretKey::generate(lambda, rng)?;
        let vid = virtual_id(&key, ids);
        for id in ids {
            augmented.insert(keyword, *id);
        }
        augmented.insert(keyword, vid);
        keyword_keys.insert(keyword.to_string(), key);
    }
    // The augmented database intentionally carries tagged virtual ids, so
    // it skips Database::validate; setup_with_key only needs block packing.
    let master = MasterKey::generate(lambda, rng)?;
    let index = setup_augmented(&augmented, &master, block_size, rng)?;
    let sign_keys = SignKeyPair::generate(rng);
    let enc_keys = EncKeyPair::generate(rng);
    let sig_i = sign(&sign_keys, &encode_index(&index));

    let verify_key = sign_keys.verify_key();
    let enc_key = enc_keys.public_key();
    ledger.store_item(client, VK_ITEM, verify_key.as_bytes())?;
    ledger.contract_call(client, "publish_key", VK_ITEM);
    ledger.store_item(client, PK_ITEM, enc_key.as_bytes())?;
    ledger.contract_call(client, "publish_key", PK_ITEM);
    ledger.store_item(client, SIG_I_ITEM, sig_i.as_bytes())?;
    ledger.contract_call(client, "publish_signature", SIG_I_ITEM);

    Ok(ImprovedDeployment {
        lambda,
        block_size,
        backend,
        verify_key,
        enc_key,
        signed_index: SignedIndex {
            index,
            sig: sig_i,
        },
        master,
        keyword_keys,
        sign_keys,
        enc_keys,
    })
}

fn setup_augmented<R: RngCore>(
    db: &Database,
    master: &MasterKey,
    block_size: usize,
    rng: &mut R,
) -> Result<EncryptedIndex, FrameworkError> {
    // Same construction as the plain setup; the augmented database is
    // valid except for the deliberate virtual-id tags.
    Ok(crate::sse::setup_with_key_unchecked(
        db, master, block_size, rng,
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionState {
    Requested,
    TrapdoorIssued,
    ResultPosted,
    Validated,
    Disputed,
    SettledType1,
    SettledType2,
}

impl std::fmt::Display for SessionState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Where a dispute was decided, in the contract's checking order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisputeStep {
    /// The posted ciphertext bytes did not even parse.
    CiphertextWellFormed,
    /// Step i: sig_w against the server-provided (r, T_w).
    TrapdoorSignature,
    /// Step ii: sig_I over the uploaded index copy.
    IndexSignature,
    /// Step iii: the client's decryption proof.
    DecryptionProof,
    /// Step iv: on-contract re-execution of the search.
    ReExecution,
}

/// One single-server search session.
pub struct ImprovedSession {
    pub id: String,
    pub query_index: usize,
    keyword: String,
    pub state: SessionState,
    nonce: Option<Vec<u8>>,
    trapdoor: Option<Trapdoor>,
    /// Workflow contract calls made so far (dispute work not included);
    /// the settlement charges these against the deposits.
    workflow_steps: u64,
    pub dispute_step: Option<DisputeStep>,
    pub settlement: Option<SettlementKind>,
}

impl ImprovedSession {
    pub fn new(id: &str, query_index: usize, keyword: &str) -> Self {
        ImprovedSession {
            id: id.to_string(),
            query_index,
            keyword: keyword.to_string(),
            state: SessionState::Requested,
            nonce: None,
            trapdoor: None,
            workflow_steps: 0,
            dispute_step: None,
            settlement: None,
        }
    }

    fn expect_state(&self, expected: SessionState) -> Result<(), FrameworkError> {
        if self.state == expected {
            Ok(())
        } else {
            Err(FrameworkError::Phase {
                state: self.state.to_string(),
                expected: expected.to_string(),
            })
        }
    }

    fn sig_w_key(&self) -> String {
        format!("session/{}/sig_w", self.id)
    }

    fn c_w_key(&self) -> String {
        format!("session/{}/c_w", self.id)
    }

    fn settlement_ctx(&self, ledger: &LedgerState, server: &Party, disputed: bool) -> SettlementContext {
        // +1 for the settlement call itself.
        let exec_cost = (self.workflow_steps + 1) * ledger.pricing().gas_per_contract_step;
        SettlementContext {
            session: self.id.clone(),
            client: Party::client(),
            server: server.clone(),
            fee: ledger.pricing().search_fee,
            exec_cost,
            disputed,
        }
    }

    fn apply_settlement(
        &mut self,
        ledger: &mut LedgerState,
        server: &Party,
        kind: SettlementKind,
        disputed: bool,
    ) -> Result<(), FrameworkError> {
        let ctx = self.settlement_ctx(ledger, server, disputed);
        let action = match kind {
            SettlementKind::Type1 => SettlementAction::type1(ctx),
            SettlementKind::Type2 => SettlementAction::type2(ctx),
        };
        ledger.settle(&action)?;
        ledger.cancel_deadline(&self.id);
        self.settlement = Some(kind);
        self.state = match kind {
            SettlementKind::Type1 => SessionState::SettledType1,
            SettlementKind::Type2 => SessionState::SettledType2,
        };
        Ok(())
    }
}

/// The server's side of a deployment: its held (possibly tampered) index
/// copy and what it received over the private channel.
pub struct ImprovedServer {
    pub party: Party,
    pub held: SignedIndex,
    received: Option<(Vec<u8>, Trapdoor)>,
    /// The canonical plaintext this server actually encrypted, kept so the
    /// dispute bundle can be assembled.
    last_plaintext: Option<Vec<u8>>,
}

impl ImprovedServer {
    pub fn new(party: Party, held: SignedIndex) -> Self {
        ImprovedServer {
            party,
            held,
            received: None,
            last_plaintext: None,
        }
    }

    /// Fault injection: garble the trapdoor the server thinks it received,
    /// as if the client had signed one token and sent another. The next
    /// sig_w verification fails and the server aborts.
    pub fn corrupt_received_trapdoor(&mut self) {
        if let Some((_, trapdoor)) = &mut self.received {
            trapdoor.k1[0] ^= 0x80;
        }
    }
}

/// Whether the contract told both parties to proceed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Proceed {
    Go,
    Halt,
}

/// Request phase: both parties deposit per the pricing config; the
/// contract verifies the deposits and signals proceed or halt. A halt
/// keeps no escrow.
pub fn begin_search(
    ledger: &mut LedgerState,
    session: &mut ImprovedSession,
    server: &Party,
) -> Result<Proceed, FrameworkError> {
    session.expect_state(SessionState::Requested)?;
    let client = Party::client();
    let need_client = ledger.pricing().improved_client_deposit();
    let need_server = ledger.pricing().improved_server_deposit();
    if ledger.balance(&client) < need_client || ledger.balance(server) < need_server {
        ledger.log(&Party::operator(), "proceed_denied", &session.id, 0);
        return Ok(Proceed::Halt);
    }
    ledger.deposit(&client, need_client, &session.id)?;
    session.workflow_steps += 1;
    ledger.deposit(server, need_server, &session.id)?;
    session.workflow_steps += 1;
    ledger.contract_call(&Party::operator(), "proceed_check", &session.id);
    session.workflow_steps += 1;
    // If the server never posts a result, the client wins by default.
    let deadline = ledger.height() + ledger.pricing().deadline_blocks;
    let ctx = session.settlement_ctx(ledger, server, false);
    ledger.register_deadline(deadline, SettlementAction::type2(ctx));
    Ok(Proceed::Go)
}

/// Which keyword the client actually embeds in the signed trapdoor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrapdoorChoice {
    /// The session keyword.
    Genuine,
    /// A different keyword, still correctly signed; the signature checks
    /// pass and only dispute step iv can tell.
    Bogus,
}

/// Search phase, client side: derive the trapdoor, sign H(r || T_w), post
/// sig_w on the ledger, and hand (T_w, r) to the server privately.
pub fn issue_trapdoor<R: RngCore>(
    ledger: &mut LedgerState,
    deployment: &ImprovedDeployment,
    session: &mut ImprovedSession,
    server: &mut ImprovedServer,
    choice: TrapdoorChoice,
    rng: &mut R,
) -> Result<(), FrameworkError> {
    session.expect_state(SessionState::Requested)?;
    let keyword = match choice {
        TrapdoorChoice::Genuine => session.keyword.clone(),
        TrapdoorChoice::Bogus => format!("bogus-{}", session.keyword),
    };
    let trapdoor = deployment.trapdoor(&keyword)?;
    let mut nonce = vec![0u8; deployment.lambda.key_len()];
    rng.fill_bytes(&mut nonce);
    let sig_w = sign(
        &deployment.sign_keys,
        &sig_w_message(&nonce, &trapdoor),
    );
    ledger.store_item(&Party::client(), &session.sig_w_key(), sig_w.as_bytes())?;
    ledger.contract_call(&Party::client(), "store_sig_w", &session.sig_w_key());
    session.workflow_steps += 1;
    // Private channel: the ledger never sees T_w or r here.
    server.received = Some((nonce.clone(), trapdoor.clone()));
    session.nonce = Some(nonce);
    session.trapdoor = Some(trapdoor);
    session.state = SessionState::TrapdoorIssued;
    let deadline = ledger.height() + ledger.pricing().deadline_blocks;
    let ctx = session.settlement_ctx(ledger, &server.party, false);
    ledger.register_deadline(deadline, SettlementAction::type2(ctx));
    Ok(())
}

fn sig_w_message(nonce: &[u8], trapdoor: &Trapdoor) -> [u8; 32] {
    let mut buf = Vec::with_capacity(nonce.len() + Trapdoor::ENCODED_LEN);
    buf.extend_from_slice(nonce);
    buf.extend_from_slice(&trapdoor.to_bytes());
    hash_h(&buf)
}

/// How the server behaves in the search phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServerSearchScript {
    Honest,
    /// Searches honestly, then perturbs the identifiers before encrypting.
    WrongIds,
    /// Holds a tampered index (sig_I no longer verifies over it) and
    /// searches it anyway instead of aborting.
    StaleIndex,
    /// Never posts a result; the deadline settles the session.
    Silent,
    /// Encrypts random junk bytes instead of the result encoding.
    GarbageCiphertext,
    /// Posts raw bytes that do not even parse as a ciphertext.
    UndecodableCiphertext,
}

/// Search phase, server side: verify sig_w and sig_I, run the search, and
/// post the encrypted canonical result as C_w. Scripted deviations replace
/// individual steps.
pub fn server_search<R: RngCore + rand::CryptoRng>(
    ledger: &mut LedgerState,
    session: &mut ImprovedSession,
    server: &mut ImprovedServer,
    script: ServerSearchScript,
    trace: &mut ExecutionTrace,
    rng: &mut R,
) -> Result<(), FrameworkError> {
    session.expect_state(SessionState::TrapdoorIssued)?;
    if script == ServerSearchScript::Silent {
        trace.touch_query(session.query_index, &session.id);
        return Ok(());
    }
    let (nonce, trapdoor) = server.received.clone().expect("trapdoor was issued");

    // Verify sig_w from the ledger against the received (r, T_w).
    let vk = read_verify_key(ledger)?;
    let sig_w = read_signature(ledger, &session.sig_w_key())?;
    if !verify_sig(&vk, &sig_w_message(&nonce, &trapdoor), &sig_w) {
        return Err(FrameworkError::ServerAbort);
    }
    // Verify sig_I over the held index; an honest server aborts on
    // mismatch, the stale-index adversary skips the self-check.
    let sig_i = read_signature(ledger, SIG_I_ITEM)?;
    let index_ok = verify_sig(&vk, &encode_index(&server.held.index), &sig_i);
    if !index_ok && script != ServerSearchScript::StaleIndex {
        return Err(FrameworkError::ServerAbort);
    }

    let outcome = search_trace(&server.held.index, &trapdoor, SearchPaging::ample());
    let hits = outcome.rows_consumed;
    trace.record_lookups(
        session.query_index,
        &session.id,
        server.party.name(),
        outcome
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l, i < hits)),
    );
    let ids = outcome.ids();

    let plaintext = match script {
        ServerSearchScript::Honest | ServerSearchScript::StaleIndex => canonical_result_bytes(&ids),
        ServerSearchScript::WrongIds => {
            let mut wrong: Vec<FileId> = ids.clone();
            let real = wrong.iter_mut().find(|id| !id.is_virtual());
            match real {
                Some(id) => id.0[7] ^= 0x55,
                None => wrong.push(FileId([0x21; ID_WIDTH])),
            }
            canonical_result_bytes(&wrong)
        }
        ServerSearchScript::GarbageCiphertext => {
            let mut junk = vec![0u8; 48];
            rng.fill_bytes(&mut junk);
            junk
        }
        ServerSearchScript::Silent | ServerSearchScript::UndecodableCiphertext => unreachable!(),
    };

    let pk = read_enc_key(ledger)?;
    let c_w_bytes = if script == ServerSearchScript::UndecodableCiphertext {
        vec![0x00; 7]
    } else {
        pke_encrypt(&pk, &plaintext, rng).to_bytes()
    };
    ledger.store_item(&server.party, &session.c_w_key(), &c_w_bytes)?;
    ledger.contract_call(&server.party, "store_c_w", &session.c_w_key());
    session.workflow_steps += 1;
    server.last_plaintext = Some(plaintext);
    session.state = SessionState::ResultPosted;
    // From here the ball is in the client's court: silence means the
    // result stands and the server is paid.
    let deadline = ledger.height() + ledger.pricing().deadline_blocks;
    let ctx = session.settlement_ctx(ledger, &server.party, false);
    ledger.register_deadline(deadline, SettlementAction::type1(ctx));
    Ok(())
}

/// Handle the undecodable-script variant, which must bypass the normal
/// posting path.
pub fn server_post_undecodable(
    ledger: &mut LedgerState,
    session: &mut ImprovedSession,
    server: &mut ImprovedServer,
) -> Result<(), FrameworkError> {
    session.expect_state(SessionState::TrapdoorIssued)?;
    ledger.store_item(&server.party, &session.c_w_key(), &[0x00; 7])?;
    ledger.contract_call(&server.party, "store_c_w", &session.c_w_key());
    session.workflow_steps += 1;
    server.last_plaintext = Some(Vec::new());
    session.state = SessionState::ResultPosted;
    let deadline = ledger.height() + ledger.pricing().deadline_blocks;
    let ctx = session.settlement_ctx(ledger, &server.party, false);
    ledger.register_deadline(deadline, SettlementAction::type1(ctx));
    Ok(())
}

/// How the client behaves at validation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClientValidateScript {
    Honest,
    /// Disputes a correct result with a fabricated plaintext; the
    /// decryption proof cannot cover the fabrication.
    FalseDispute,
    /// Disputes whatever came back with the truthful plaintext and a
    /// valid proof, even when validation passed; dispute step iv then
    /// decides on the re-executed search.
    DisputeTruthfully,
    /// Never calls SearchOK or Dispute; the deadline settles type-1.
    Withhold,
}

/// What the validation phase decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationOutcome {
    SearchOk,
    DisputeRaised,
    Withheld,
}

/// Retrieval & validation phase, client side: decrypt C_w, recompute the
/// virtual identifier from K_w and the returned ids, and either call
/// SearchOK (settling type-1) or raise a dispute with the claimed
/// plaintext and a decryption proof.
pub fn client_validate<R: RngCore + rand::CryptoRng>(
    ledger: &mut LedgerState,
    deployment: &ImprovedDeployment,
    session: &mut ImprovedSession,
    server: &Party,
    script: ClientValidateScript,
    rng: &mut R,
) -> Result<ValidationOutcome, FrameworkError> {
    session.expect_state(SessionState::ResultPosted)?;
    if script == ClientValidateScript::Withhold {
        return Ok(ValidationOutcome::Withheld);
    }
    let c_w_bytes = ledger
        .get_item(&session.c_w_key())
        .expect("result was posted")
        .to_vec();

    let decrypted: Option<Vec<u8>> = Ciphertext::from_bytes(&c_w_bytes)
        .ok()
        .map(|ct| pke_decrypt(&deployment.enc_keys, &ct).expect("kem point validated"));

    let valid = match &decrypted {
        None => false,
        Some(plain) => self_check(deployment, &session.keyword, plain),
    };

    if valid && script == ClientValidateScript::Honest {
        ledger.contract_call(&Party::client(), "search_ok", &session.id);
        session.apply_settlement(ledger, server, SettlementKind::Type1, false)?;
        return Ok(ValidationOutcome::SearchOk);
    }

    // Dispute: post the claimed plaintext and the decryption proof.
    let truthful_claim = decrypted.unwrap_or_default();
    let claim = match script {
        ClientValidateScript::FalseDispute => {
            let mut fabricated = truthful_claim.clone();
            if fabricated.is_empty() {
                fabricated = vec![0x33; ID_WIDTH];
            } else {
                let last = fabricated.len() - 1;
                fabricated[last] ^= 0xFF;
            }
            fabricated
        }
        _ => truthful_claim,
    };
    let proof: Vec<u8> = Ciphertext::from_bytes(&c_w_bytes)
        .ok()
        .map(|ct| {
            prove_decryption(deployment.backend, &deployment.enc_keys, &ct, rng)
                .expect("kem point validated")
                .to_bytes()
        })
        .unwrap_or_default();
    ledger.store_item(
        &Party::client(),
        &format!("session/{}/dispute/claim", session.id),
        &claim,
    )?;
    ledger.store_item(
        &Party::client(),
        &format!("session/{}/dispute/proof", session.id),
        &proof,
    )?;
    ledger.contract_call(&Party::client(), "dispute", &session.id);
    session.state = SessionState::Disputed;
    // The server now owes its bundle half; silence defaults type-2.
    let deadline = ledger.height() + ledger.pricing().deadline_blocks;
    let ctx = session.settlement_ctx(ledger, server, true);
    ledger.register_deadline(deadline, SettlementAction::type2(ctx));
    Ok(ValidationOutcome::DisputeRaised)
}

fn self_check(deployment: &ImprovedDeployment, keyword: &str, plaintext: &[u8]) -> bool {
    let Some(ids) = parse_result_bytes(plaintext) else {
        return false;
    };
    match deployment.keyword_key(keyword) {
        Some(kw_key) => {
            let Some((first, rest)) = ids.split_first() else {
                return false;
            };
            first.is_virtual() && *first == virtual_id(kw_key, rest)
        }
        // Unknown keyword: the client expects an empty result.
        None => ids.is_empty(),
    }
}

/// How the server answers the dispute request for (r, T_w).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServerDisputeScript {
    /// Supply the genuine (r, T_w) and upload the held index.
    Truthful,
    /// Supply a fabricated trapdoor; step i catches it.
    WrongTrapdoor,
    /// Supply nothing by the deadline.
    Unresponsive,
}

/// Dispute resolution: the 4-step decision procedure, preceded by a
/// well-formedness check on the posted ciphertext bytes. The first failing
/// step decides. Steps i/ii settle type-2 (server misbehaved around its
/// artifacts), step iii settles type-1 (the client's proof is bad), and
/// step iv settles type-2 exactly when the re-executed search disagrees
/// with the proven plaintext.
pub fn resolve_dispute(
    ledger: &mut LedgerState,
    deployment_backend: ProofBackend,
    session: &mut ImprovedSession,
    server: &mut ImprovedServer,
    script: ServerDisputeScript,
) -> Result<(SettlementKind, DisputeStep), FrameworkError> {
    session.expect_state(SessionState::Disputed)?;
    let vk = read_verify_key(ledger)?;
    let pk = read_enc_key(ledger)?;

    // Server side of the bundle.
    let supplied: Option<(Vec<u8>, Trapdoor)> = match script {
        ServerDisputeScript::Unresponsive => None,
        ServerDisputeScript::Truthful => server.received.clone(),
        ServerDisputeScript::WrongTrapdoor => server.received.clone().map(|(nonce, t)| {
            let mut wrong = t;
            wrong.k1[0] ^= 0x01;
            (nonce, wrong)
        }),
    };
    if let Some((nonce, trapdoor)) = &supplied {
        let mut bundle = nonce.clone();
        bundle.extend_from_slice(&trapdoor.to_bytes());
        ledger.store_item(
            &server.party,
            &format!("session/{}/dispute/rtw", session.id),
            &bundle,
        )?;
        ledger.store_item(
            &server.party,
            &format!("session/{}/dispute/index", session.id),
            &encode_index(&server.held.index),
        )?;
    }
    ledger.contract_call(&Party::operator(), "resolve_dispute", &session.id);

    let c_w_bytes = ledger
        .get_item(&session.c_w_key())
        .expect("dispute implies a posted result")
        .to_vec();
    let claim = ledger
        .get_item(&format!("session/{}/dispute/claim", session.id))
        .expect("dispute stores a claim")
        .to_vec();
    let proof_bytes = ledger
        .get_item(&format!("session/{}/dispute/proof", session.id))
        .expect("dispute stores a proof")
        .to_vec();

    // Well-formedness precheck: the posting obligation includes posting
    // an actual ciphertext.
    let Ok(c_w) = Ciphertext::from_bytes(&c_w_bytes) else {
        let step = DisputeStep::CiphertextWellFormed;
        session.dispute_step = Some(step);
        let server_party = server.party.clone();
        session.apply_settlement(ledger, &server_party, SettlementKind::Type2, true)?;
        return Ok((SettlementKind::Type2, step));
    };

    // Step i: sig_w against the provided (r, T_w).
    let sig_w = read_signature(ledger, &session.sig_w_key())?;
    let step_i_ok = supplied
        .as_ref()
        .is_some_and(|(nonce, t)| verify_sig(&vk, &sig_w_message(nonce, t), &sig_w));
    if !step_i_ok {
        return decide(ledger, session, server, SettlementKind::Type2, DisputeStep::TrapdoorSignature);
    }

    // Step ii: sig_I over the uploaded index copy.
    let sig_i = read_signature(ledger, SIG_I_ITEM)?;
    let uploaded = ledger
        .get_item(&format!("session/{}/dispute/index", session.id))
        .expect("supplied bundle stored the index")
        .to_vec();
    if !verify_sig(&vk, &uploaded, &sig_i) {
        return decide(ledger, session, server, SettlementKind::Type2, DisputeStep::IndexSignature);
    }

    // Step iii: the client's decryption proof for the claimed plaintext.
    let proof_ok = DecryptionProof::from_bytes(&proof_bytes)
        .map(|proof| verify_decryption(deployment_backend, &pk, &c_w, &claim, &proof))
        .unwrap_or(false);
    if !proof_ok {
        return decide(ledger, session, server, SettlementKind::Type1, DisputeStep::DecryptionProof);
    }

    // Step iv: re-execute the search on-contract from (index, T_w) alone.
    let index = decode_index(&uploaded).expect("signature verified over valid encoding");
    let (_, trapdoor) = supplied.expect("step i verified the bundle");
    let outcome = search_trace(&index, &trapdoor, SearchPaging::ample());
    // Re-execution is real contract work: one step per row walked.
    ledger.note_contract_steps(outcome.labels.len() as u64);
    let recomputed = canonical_result_bytes(&outcome.ids());
    if recomputed == claim {
        decide(ledger, session, server, SettlementKind::Type1, DisputeStep::ReExecution)
    } else {
        decide(ledger, session, server, SettlementKind::Type2, DisputeStep::ReExecution)
    }
}

fn decide(
    ledger: &mut LedgerState,
    session: &mut ImprovedSession,
    server: &ImprovedServer,
    kind: SettlementKind,
    step: DisputeStep,
) -> Result<(SettlementKind, DisputeStep), FrameworkError> {
    session.dispute_step = Some(step);
    let server_party = server.party.clone();
    session.apply_settlement(ledger, &server_party, kind, true)?;
    Ok((kind, step))
}

fn read_verify_key(ledger: &LedgerState) -> Result<VerifyKey, FrameworkError> {
    let bytes = ledger
        .get_item(VK_ITEM)
        .ok_or(crate::ledger::LedgerError::MissingItem(VK_ITEM.into()))?;
    Ok(VerifyKey::from_bytes(bytes)?)
}

fn read_enc_key(ledger: &LedgerState) -> Result<EncPublicKey, FrameworkError> {
    let bytes = ledger
        .get_item(PK_ITEM)
        .ok_or(crate::ledger::LedgerError::MissingItem(PK_ITEM.into()))?;
    Ok(EncPublicKey::from_bytes(bytes)?)
}

fn read_signature(ledger: &LedgerState, key: &str) -> Result<Signature, FrameworkError> {
    let bytes = ledger
        .get_item(key)
        .ok_or_else(|| crate::ledger::LedgerError::MissingItem(key.into()))?;
    Ok(Signature::from_bytes(bytes)?)
}
