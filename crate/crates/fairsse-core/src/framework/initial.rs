//! Multi-server framework: n independently encrypted indexes, commitment
//! of hashed results, on-chain equality validation, payment, and
//! client-side retrieval checking.
//!
//! Fairness here rests on at least one server staying honest: any
//! disagreeing commitment blocks payment and leaves the dispute offline.
//! If every server colludes on the same wrong digest, the contract cannot
//! tell; the scenario suite documents that run.

use rand::RngCore;

use super::{result_digest, FrameworkError};
use crate::analysis::ExecutionTrace;
use crate::batch::map_collect;
use crate::crypto::{commit_msg, open_commitment, Commitment, OpeningKey, SecurityParam};
use crate::ledger::{LedgerState, Party};
use crate::sse::{
    derive_trapdoor, search_trace, setup, strip_padding, Database, EncryptedIndex, FileId,
    MasterKey, SearchPaging, Trapdoor,
};

/// One server's share of the deployment: its own independently encrypted
/// index and its ledger identity.
#[derive(Debug)]
pub struct ServerReplica {
    pub id: usize,
    pub party: Party,
    pub index: EncryptedIndex,
}

/// Client-side keys plus the n replicas.
#[derive(Debug)]
pub struct MultiServerDeployment {
    pub lambda: SecurityParam,
    pub block_size: usize,
    pub replicas: Vec<ServerReplica>,
    master_keys: Vec<MasterKey>,
}

impl MultiServerDeployment {
    pub fn server_count(&self) -> usize {
        self.replicas.len()
    }

    /// The client derives a per-replica trapdoor; each replica has its own
    /// master key.
    pub fn trapdoor_for(&self, replica: usize, keyword: &str) -> Result<Trapdoor, FrameworkError> {
        Ok(derive_trapdoor(&self.master_keys[replica], keyword)?)
    }
}

/// Run Setup n times over the same database; every server receives a
/// unique index built from a distinct fresh master key.
pub fn setup_multi<R: RngCore>(
    db: &Database,
    n: usize,
    lambda: SecurityParam,
    block_size: usize,
    rng: &mut R,
) -> Result<MultiServerDeployment, FrameworkError> {
    if n < 2 {
        return Err(FrameworkError::Config(n));
    }
    let mut master_keys = Vec::with_capacity(n);
    let mut replicas = Vec::with_capacity(n);
    for i in 0..n {
        let (master, index) = setup(db, lambda, block_size, rng)?;
        master_keys.push(master);
        replicas.push(ServerReplica {
            id: i,
            party: Party::server(i),
            index,
        });
    }
    Ok(MultiServerDeployment {
        lambda,
        block_size,
        replicas,
        master_keys,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialPhase {
    Request,
    Search,
    Validation,
    Retrieval,
    Paid,
    DisputeOffline,
}

impl std::fmt::Display for InitialPhase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// How one replica behaves during the search phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialServerScript {
    Honest,
    /// Commits to a digest over a per-server corrupted result.
    WrongCommit,
    /// Commits to the shared colluded wrong result; when all replicas run
    /// this, their digests agree and the contract pays for a fake answer.
    ColludedWrongCommit,
    /// Commits honestly, then never posts its opening key.
    WithholdOpening,
}

/// Per-server record of the commit/open exchange.
#[derive(Debug, Clone)]
pub struct CommitmentRecord {
    pub commitment: Option<Commitment>,
    pub opening: Option<OpeningKey>,
    pub opened_digest: Option<[u8; 32]>,
}

/// One multi-server search session.
#[derive(Debug)]
pub struct InitialSession {
    pub id: String,
    pub query_index: usize,
    keyword: String,
    pub nonce: Vec<u8>,
    pub phase: InitialPhase,
    pub records: Vec<CommitmentRecord>,
    /// What each replica computed and would deliver on retrieval.
    server_results: Vec<Option<Vec<FileId>>>,
    /// Opening keys held server-side until the validation phase.
    held_openings: Vec<Option<(OpeningKey, [u8; 32])>>,
}

impl InitialSession {
    fn expect_phase(&self, expected: InitialPhase) -> Result<(), FrameworkError> {
        if self.phase == expected {
            Ok(())
        } else {
            Err(FrameworkError::Phase {
                state: self.phase.to_string(),
                expected: expected.to_string(),
            })
        }
    }

    pub fn escrow_purpose(&self) -> &str {
        &self.id
    }

    /// The result an honest retrieval would deliver.
    pub fn delivered_ids(&self, replica: usize) -> Option<&[FileId]> {
        self.server_results[replica].as_deref()
    }
}

/// Request phase: the client deposits n fees plus workflow gas and
/// broadcasts a fresh challenge nonce r to every server over the private
/// channels.
pub fn request_search<R: RngCore>(
    ledger: &mut LedgerState,
    deployment: &MultiServerDeployment,
    client: &Party,
    session_id: &str,
    query_index: usize,
    keyword: &str,
    rng: &mut R,
) -> Result<InitialSession, FrameworkError> {
    let n = deployment.server_count();
    let amount = ledger.pricing().initial_client_deposit(n);
    ledger.deposit(client, amount, session_id)?;
    let mut nonce = vec![0u8; deployment.lambda.key_len()];
    rng.fill_bytes(&mut nonce);
    Ok(InitialSession {
        id: session_id.to_string(),
        query_index,
        keyword: keyword.to_string(),
        nonce,
        phase: InitialPhase::Search,
        records: (0..n)
            .map(|_| CommitmentRecord {
                commitment: None,
                opening: None,
                opened_digest: None,
            })
            .collect(),
        server_results: vec![None; n],
        held_openings: vec![None; n],
    })
}

/// Search phase for one replica: verify the deposit, run the local search,
/// commit to H(ID_w || r), and post the commitment on the ledger. Replica
/// searches are read-only and evaluated as a parallel batch by
/// [`commit_all`].
pub fn server_commit<R: RngCore>(
    ledger: &mut LedgerState,
    deployment: &MultiServerDeployment,
    session: &mut InitialSession,
    replica: usize,
    script: InitialServerScript,
    trace: &mut ExecutionTrace,
    rng: &mut R,
) -> Result<(), FrameworkError> {
    session.expect_phase(InitialPhase::Search)?;
    let n = deployment.server_count();
    let expected = ledger.pricing().initial_client_deposit(n);
    if ledger.escrow_total(&session.id) < expected {
        return Err(FrameworkError::AbortNoDeposit);
    }

    let ids = replica_search(deployment, session, replica, trace);
    let committed_ids = apply_script(&ids, replica, script);
    let digest = result_digest(&committed_ids, &session.nonce);
    let (commitment, opening) = commit_msg(rng, deployment.lambda, &digest)?;
    let server = &deployment.replicas[replica].party;
    ledger.store_item(
        server,
        &format!("s/{}/commit/{replica}", session.id),
        commitment.as_bytes(),
    )?;
    session.records[replica].commitment = Some(commitment);
    session.server_results[replica] = Some(committed_ids);
    session.held_openings[replica] = Some((opening, digest));
    if session.records.iter().all(|r| r.commitment.is_some()) {
        session.phase = InitialPhase::Validation;
    }
    Ok(())
}

fn replica_search(
    deployment: &MultiServerDeployment,
    session: &InitialSession,
    replica: usize,
    trace: &mut ExecutionTrace,
) -> Vec<FileId> {
    let trapdoor = deployment
        .trapdoor_for(replica, &session.keyword)
        .expect("keyword validated at request");
    let outcome = search_trace(
        &deployment.replicas[replica].index,
        &trapdoor,
        SearchPaging::ample(),
    );
    let hits = outcome.rows_consumed;
    trace.record_lookups(
        session.query_index,
        &session.id,
        deployment.replicas[replica].party.name(),
        outcome
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l, i < hits)),
    );
    outcome.ids()
}

fn apply_script(ids: &[FileId], replica: usize, script: InitialServerScript) -> Vec<FileId> {
    match script {
        InitialServerScript::Honest | InitialServerScript::WithholdOpening => ids.to_vec(),
        InitialServerScript::WrongCommit => {
            let mut wrong = ids.to_vec();
            match wrong.first_mut() {
                Some(first) => first.0[15] ^= 1 + replica as u8,
                None => wrong.push(FileId([0x42; 16])),
            }
            wrong
        }
        // Every colluder applies the same deterministic corruption, so
        // their digests still agree.
        InitialServerScript::ColludedWrongCommit => {
            let mut wrong = ids.to_vec();
            match wrong.first_mut() {
                Some(first) => first.0[15] ^= 0xA5,
                None => wrong.push(FileId([0x42; 16])),
            }
            wrong
        }
    }
}

/// Run the search phase for every replica. The searches themselves are
/// pure reads and run as a data-parallel batch; commitments and ledger
/// writes happen afterwards in replica order so runs stay deterministic.
pub fn commit_all<R: RngCore>(
    ledger: &mut LedgerState,
    deployment: &MultiServerDeployment,
    session: &mut InitialSession,
    scripts: &[InitialServerScript],
    trace: &mut ExecutionTrace,
    rng: &mut R,
) -> Result<(), FrameworkError> {
    session.expect_phase(InitialPhase::Search)?;
    let n = deployment.server_count();
    let expected = ledger.pricing().initial_client_deposit(n);
    if ledger.escrow_total(&session.id) < expected {
        return Err(FrameworkError::AbortNoDeposit);
    }
    let keyword = session.keyword.clone();
    let replica_ids: Vec<usize> = (0..n).collect();
    let outcomes = map_collect(&replica_ids, |&i| {
        let trapdoor = deployment
            .trapdoor_for(i, &keyword)
            .expect("keyword validated at request");
        search_trace(
            &deployment.replicas[i].index,
            &trapdoor,
            SearchPaging::ample(),
        )
    });
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let hits = outcome.rows_consumed;
        trace.record_lookups(
            session.query_index,
            &session.id,
            deployment.replicas[i].party.name(),
            outcome
                .labels
                .iter()
                .enumerate()
                .map(|(j, l)| (l, j < hits)),
        );
        let ids = outcome.ids();
        let committed_ids = apply_script(&ids, i, scripts[i]);
        let digest = result_digest(&committed_ids, &session.nonce);
        let (commitment, opening) = commit_msg(rng, deployment.lambda, &digest)?;
        ledger.store_item(
            &deployment.replicas[i].party,
            &format!("s/{}/commit/{i}", session.id),
            commitment.as_bytes(),
        )?;
        session.records[i].commitment = Some(commitment);
        session.server_results[i] = Some(committed_ids);
        session.held_openings[i] = Some((opening, digest));
    }
    session.phase = InitialPhase::Validation;
    Ok(())
}

/// Validation phase: once every commitment is on the ledger, each server
/// posts its opening key; the contract opens all commitments, stores the
/// digests, and pays every server iff all opened digests agree. Any
/// mismatch, invalid opening, or withheld key freezes the escrow and
/// leaves the dispute offline.
pub fn validate_and_pay(
    ledger: &mut LedgerState,
    deployment: &MultiServerDeployment,
    session: &mut InitialSession,
    scripts: &[InitialServerScript],
) -> Result<InitialPhase, FrameworkError> {
    session.expect_phase(InitialPhase::Validation)?;
    // Openings may only be posted after every commitment is present;
    // sealing a block in between keeps the commit-before-open order
    // visible in item heights.
    ledger.advance_block();

    let n = deployment.server_count();
    for i in 0..n {
        if scripts[i] == InitialServerScript::WithholdOpening {
            continue;
        }
        let (opening, digest) = session.held_openings[i].clone().expect("committed");
        let mut value = opening.as_bytes().to_vec();
        value.extend_from_slice(&digest);
        ledger.store_item(
            &deployment.replicas[i].party,
            &format!("s/{}/open/{i}", session.id),
            &value,
        )?;
        session.records[i].opening = Some(opening);
    }

    // Contract side: open whatever arrived.
    let mut opened: Vec<Option<[u8; 32]>> = vec![None; n];
    for i in 0..n {
        ledger.contract_call(&Party::operator(), "open_commitment", &session.id);
        let key = format!("s/{}/open/{i}", session.id);
        let Some(value) = ledger.get_item(&key).map(<[u8]>::to_vec) else {
            continue;
        };
        let key_len = deployment.lambda.key_len();
        if value.len() != key_len + 32 {
            continue;
        }
        let opening = OpeningKey::from_bytes(&value[..key_len]);
        let digest: [u8; 32] = value[key_len..].try_into().expect("length checked");
        let commitment = session.records[i].commitment.as_ref().expect("committed");
        if open_commitment(commitment, &opening, &digest) {
            ledger.store_item(
                &Party::operator(),
                &format!("s/{}/digest/{i}", session.id),
                &digest,
            )?;
            opened[i] = Some(digest);
            session.records[i].opened_digest = Some(digest);
        }
    }
    ledger.contract_call(&Party::operator(), "compare_digests", &session.id);

    let all_equal = opened.iter().all(|d| d.is_some() && *d == opened[0]);
    if all_equal {
        ledger.contract_call(&Party::operator(), "pay_servers", &session.id);
        let fee = ledger.pricing().search_fee;
        let client = Party::client();
        for replica in &deployment.replicas {
            ledger.escrow_pay(&session.id, &client, &replica.party, fee);
            ledger.log(&Party::operator(), "pay_server", replica.party.name(), fee);
        }
        let gas = ledger.pricing().initial_workflow_gas(n);
        ledger.escrow_pay(&session.id, &client, &Party::operator(), gas);
        let rest = ledger.escrow_of(&session.id, &client);
        ledger.escrow_pay(&session.id, &client, &client.clone(), rest);
        ledger.check_conservation()?;
        session.phase = InitialPhase::Paid;
    } else {
        // Escrow stays frozen on the ledger for the offline dispute.
        ledger.log(&Party::operator(), "dispute_offline", &session.id, 0);
        session.phase = InitialPhase::DisputeOffline;
    }
    Ok(session.phase)
}

/// Retrieval phase: the client fetches ID_w from any server over the
/// private channel and checks it against the opened on-chain digest.
pub fn retrieve_and_check(
    session: &InitialSession,
    delivered: &[FileId],
) -> Result<Vec<FileId>, FrameworkError> {
    session.expect_phase(InitialPhase::Paid)?;
    let reference = session
        .records
        .iter()
        .find_map(|r| r.opened_digest)
        .expect("paid phase implies opened digests");
    let delivered_clean = strip_padding(delivered.iter().copied());
    if result_digest(&delivered_clean, &session.nonce) == reference {
        Ok(delivered_clean)
    } else {
        Err(FrameworkError::RetrievalIntegrity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::PricingConfig;
    use crate::sse::{search, ID_WIDTH};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn id(b: u8) -> FileId {
        FileId([b; ID_WIDTH])
    }

    fn sample_db() -> Database {
        let mut db = Database::new();
        for i in 1..=5 {
            db.insert("apple", id(i));
        }
        for i in 6..=8 {
            db.insert("pear", id(i));
        }
        db
    }

    fn env(n: usize) -> (LedgerState, MultiServerDeployment, ChaCha20Rng) {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        let deployment =
            setup_multi(&sample_db(), n, SecurityParam::DEFAULT, 2, &mut rng).unwrap();
        let mut ledger = LedgerState::new(PricingConfig::default(), 4).unwrap();
        ledger.register_party(&Party::client(), 10_000).unwrap();
        for replica in &deployment.replicas {
            ledger.register_party(&replica.party, 1_000).unwrap();
        }
        (ledger, deployment, rng)
    }

    fn run(
        ledger: &mut LedgerState,
        deployment: &MultiServerDeployment,
        scripts: &[InitialServerScript],
        rng: &mut ChaCha20Rng,
    ) -> (InitialSession, InitialPhase) {
        let mut trace = ExecutionTrace::new(deployment.block_size);
        let mut session = request_search(
            ledger, deployment, &Party::client(), "q0", 0, "apple", rng,
        )
        .unwrap();
        commit_all(ledger, deployment, &mut session, scripts, &mut trace, rng).unwrap();
        let phase = validate_and_pay(ledger, deployment, &mut session, scripts).unwrap();
        (session, phase)
    }

    #[test]
    fn rejects_single_server_deployment() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let err = setup_multi(&sample_db(), 1, SecurityParam::DEFAULT, 2, &mut rng).unwrap_err();
        assert!(matches!(err, FrameworkError::Config(1)));
    }

    #[test]
    fn replicas_are_byte_distinct_and_individually_correct() {
        let (_, deployment, _) = env(3);
        let bytes: Vec<Vec<u8>> = deployment
            .replicas
            .iter()
            .map(|r| crate::sse::encode_index(&r.index))
            .collect();
        assert_ne!(bytes[0], bytes[1]);
        assert_ne!(bytes[1], bytes[2]);
        assert_ne!(bytes[0], bytes[2]);
        for i in 0..3 {
            let t = deployment.trapdoor_for(i, "apple").unwrap();
            let ids = search(&deployment.replicas[i].index, &t, SearchPaging::ample());
            assert_eq!(ids, vec![id(1), id(2), id(3), id(4), id(5)]);
        }
    }

    #[test]
    fn escrow_covers_fees_plus_workflow_gas() {
        let (mut ledger, deployment, mut rng) = env(3);
        let before = ledger.balance(&Party::client());
        let session = request_search(
            &mut ledger,
            &deployment,
            &Party::client(),
            "q0",
            0,
            "apple",
            &mut rng,
        )
        .unwrap();
        // fee 10 x 3 servers + (3 + 2) gas = 35.
        assert_eq!(before - ledger.balance(&Party::client()), 35);
        assert_eq!(ledger.escrow_total(session.escrow_purpose()), 35);
    }

    #[test]
    fn underfunded_client_stays_in_request_phase() {
        let (_, deployment, mut rng) = env(2);
        let mut ledger = LedgerState::new(PricingConfig::default(), 4).unwrap();
        ledger.register_party(&Party::client(), 5).unwrap();
        let err = request_search(
            &mut ledger,
            &deployment,
            &Party::client(),
            "q0",
            0,
            "apple",
            &mut rng,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            FrameworkError::Ledger(crate::ledger::LedgerError::InsufficientFunds { .. })
        ));
    }

    #[test]
    fn server_aborts_without_deposit() {
        let (mut ledger, deployment, mut rng) = env(2);
        let mut trace = ExecutionTrace::new(2);
        // Hand-build a session without the deposit.
        let mut session = InitialSession {
            id: "q9".into(),
            query_index: 0,
            keyword: "apple".into(),
            nonce: vec![0u8; 32],
            phase: InitialPhase::Search,
            records: (0..2)
                .map(|_| CommitmentRecord {
                    commitment: None,
                    opening: None,
                    opened_digest: None,
                })
                .collect(),
            server_results: vec![None; 2],
            held_openings: vec![None; 2],
        };
        let err = server_commit(
            &mut ledger,
            &deployment,
            &mut session,
            0,
            InitialServerScript::Honest,
            &mut trace,
            &mut rng,
        )
        .unwrap_err();
        assert!(matches!(err, FrameworkError::AbortNoDeposit));
    }

    #[test]
    fn all_honest_servers_get_paid() {
        let (mut ledger, deployment, mut rng) = env(3);
        let scripts = [InitialServerScript::Honest; 3];
        let balances_before: Vec<u64> = deployment
            .replicas
            .iter()
            .map(|r| ledger.balance(&r.party))
            .collect();
        let (session, phase) = run(&mut ledger, &deployment, &scripts, &mut rng);
        assert_eq!(phase, InitialPhase::Paid);
        for (replica, before) in deployment.replicas.iter().zip(balances_before) {
            assert_eq!(ledger.balance(&replica.party) - before, 10);
        }
        assert_eq!(ledger.escrow_total(session.escrow_purpose()), 0);
    }

    #[test]
    fn one_wrong_commit_blocks_all_payments() {
        let (mut ledger, deployment, mut rng) = env(3);
        let scripts = [
            InitialServerScript::Honest,
            InitialServerScript::WrongCommit,
            InitialServerScript::Honest,
        ];
        let balances_before: Vec<u64> = deployment
            .replicas
            .iter()
            .map(|r| ledger.balance(&r.party))
            .collect();
        let (session, phase) = run(&mut ledger, &deployment, &scripts, &mut rng);
        assert_eq!(phase, InitialPhase::DisputeOffline);
        for (replica, before) in deployment.replicas.iter().zip(balances_before) {
            assert_eq!(ledger.balance(&replica.party), before, "no payment");
        }
        // Escrow frozen, not refunded.
        assert_eq!(ledger.escrow_total(session.escrow_purpose()), 35);
    }

    #[test]
    fn withheld_opening_ends_in_dispute_offline() {
        let (mut ledger, deployment, mut rng) = env(2);
        let scripts = [
            InitialServerScript::Honest,
            InitialServerScript::WithholdOpening,
        ];
        let (_, phase) = run(&mut ledger, &deployment, &scripts, &mut rng);
        assert_eq!(phase, InitialPhase::DisputeOffline);
    }

    #[test]
    fn full_collusion_defeats_the_equality_check() {
        let (mut ledger, deployment, mut rng) = env(3);
        let scripts = [InitialServerScript::ColludedWrongCommit; 3];
        let (session, phase) = run(&mut ledger, &deployment, &scripts, &mut rng);
        // The documented caveat: agreeing wrong digests are paid.
        assert_eq!(phase, InitialPhase::Paid);
        // And the colluded result does not match the true answer.
        let true_ids = vec![id(1), id(2), id(3), id(4), id(5)];
        assert_ne!(
            session.delivered_ids(0).unwrap(),
            true_ids.as_slice()
        );
    }

    #[test]
    fn retrieval_checks_digest_and_rejects_tampering() {
        let (mut ledger, deployment, mut rng) = env(2);
        let scripts = [InitialServerScript::Honest; 2];
        let (session, phase) = run(&mut ledger, &deployment, &scripts, &mut rng);
        assert_eq!(phase, InitialPhase::Paid);
        let delivered = session.delivered_ids(0).unwrap().to_vec();
        let checked = retrieve_and_check(&session, &delivered).unwrap();
        assert_eq!(checked.len(), 5);

        let mut tampered = delivered.clone();
        tampered[0].0[0] ^= 0xFF;
        assert!(matches!(
            retrieve_and_check(&session, &tampered),
            Err(FrameworkError::RetrievalIntegrity)
        ));

        let mut missing = delivered;
        missing.pop();
        assert!(matches!(
            retrieve_and_check(&session, &missing),
            Err(FrameworkError::RetrievalIntegrity)
        ));
    }

    #[test]
    fn openings_never_precede_commitments_on_chain() {
        let (mut ledger, deployment, mut rng) = env(3);
        let scripts = [InitialServerScript::Honest; 3];
        run(&mut ledger, &deployment, &scripts, &mut rng);
        let max_commit = (0..3)
            .filter_map(|i| ledger.item_height(&format!("s/q0/commit/{i}")))
            .max()
            .unwrap();
        let min_open = (0..3)
            .filter_map(|i| ledger.item_height(&format!("s/q0/open/{i}")))
            .min()
            .unwrap();
        assert!(min_open > max_commit, "commit-before-open ordering");
    }

    #[test]
    fn ledger_never_sees_result_or_trapdoor_bytes_in_honest_runs() {
        let (mut ledger, deployment, mut rng) = env(3);
        let scripts = [InitialServerScript::Honest; 3];
        let (session, _) = run(&mut ledger, &deployment, &scripts, &mut rng);

        let mut haystack = Vec::new();
        for (_, item) in ledger.items() {
            haystack.extend_from_slice(&item.bytes);
        }
        let contains = |needle: &[u8]| {
            !needle.is_empty() && haystack.windows(needle.len()).any(|w| w == needle)
        };
        for i in 1..=8u8 {
            assert!(!contains(id(i).as_bytes()), "file id leaked");
        }
        for replica in 0..3 {
            let t = deployment.trapdoor_for(replica, "apple").unwrap();
            assert!(!contains(&t.k1), "trapdoor K1 leaked");
            assert!(!contains(&t.k2), "trapdoor K2 leaked");
        }
        // The opened digest itself is on the ledger, by design.
        let digest = result_digest(session.delivered_ids(0).unwrap(), &session.nonce);
        assert!(contains(&digest));
    }
}
