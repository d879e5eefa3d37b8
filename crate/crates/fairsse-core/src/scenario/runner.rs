//! Deterministic end-to-end scenario execution.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::config::{AdversaryBehavior, DatabaseSpec, FrameworkKind, ScenarioConfig};
use super::ingest::ingest_corpus;
use super::report::{ScenarioReport, SessionOutcome, REPORT_SCHEMA};
use super::ScenarioError;
use crate::analysis::{analyze, ExecutionTrace, ObserverView, ACTOR_LEDGER};
use crate::framework::improved::{
    begin_search, client_validate, issue_trapdoor, resolve_dispute, server_search,
    setup_improved, ClientValidateScript, ImprovedServer, ImprovedSession, Proceed,
    ServerDisputeScript, ServerSearchScript, SessionState, SignedIndex, TrapdoorChoice,
    ValidationOutcome,
};
use crate::framework::initial::{
    commit_all, request_search, retrieve_and_check, setup_multi, validate_and_pay, InitialPhase,
    InitialServerScript,
};
use crate::ledger::{store_edb_on_chain, BaselineToken, LedgerState, Party, SettlementKind};
use crate::sse::{decode_index, derive_trapdoor, encode_index, setup, Database, FileId, ID_WIDTH};

/// A finished run: the report plus the raw artifacts tests inspect.
#[derive(Debug)]
pub struct ScenarioRun {
    pub report: ScenarioReport,
    pub ledger: LedgerState,
    pub trace: ExecutionTrace,
    pub database: Database,
}

/// Execute one scenario deterministically.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioRun, ScenarioError> {
    config.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let database = build_database(config, &mut rng)?;
    let lambda = config.lambda()?;

    let mut ledger = LedgerState::new(config.pricing, config.miner_count)?;
    let client = Party::client();
    ledger.register_party(&client, config.initial_balance)?;
    let server_count = match config.framework {
        FrameworkKind::Initial => config.n.expect("validated"),
        _ => 1,
    };
    for i in 0..server_count {
        ledger.register_party(&Party::server(i), config.initial_balance)?;
    }

    let mut trace = ExecutionTrace::new(config.block_size);
    let sessions = match config.framework {
        FrameworkKind::BaselineOnChain => run_baseline(
            config, &database, lambda, &mut ledger, &mut trace, &mut rng,
        )?,
        FrameworkKind::Initial => run_initial(
            config, &database, lambda, &mut ledger, &mut trace, &mut rng,
        )?,
        FrameworkKind::Improved => run_improved(
            config, &database, lambda, &mut ledger, &mut trace, &mut rng,
        )?,
    };

    ledger.advance_block();
    ledger
        .check_conservation()
        .map_err(|_| ScenarioError::Invariant("token conservation".into()))?;

    let report = ScenarioReport {
        schema: REPORT_SCHEMA.to_string(),
        framework: config.framework,
        adversary: config.adversary,
        seed: config.seed,
        sessions,
        conservation_ok: true,
        cost: ledger.cost_report(),
        leakage_ledger_view: analyze(&trace, ObserverView::LedgerOnly),
        leakage_server_view: analyze(&trace, ObserverView::ServerView),
        ledger_event_count: ledger.events().len(),
        final_height: ledger.height(),
    };
    Ok(ScenarioRun {
        report,
        ledger,
        trace,
        database,
    })
}

fn build_database<R: RngCore>(
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<Database, ScenarioError> {
    let db = match &config.database {
        DatabaseSpec::Inline { entries } => {
            let mut db = Database::new();
            for (keyword, ids) in entries {
                for hex_id in ids {
                    let id = FileId::from_hex(hex_id)
                        .map_err(|e| ScenarioError::Config(e.to_string()))?;
                    db.insert(keyword, id);
                }
            }
            db
        }
        DatabaseSpec::Generated {
            keywords,
            max_ids_per_keyword,
        } => {
            let mut db = Database::new();
            for k in 0..*keywords {
                let keyword = format!("kw{k:03}");
                let count = rng.gen_range(1..=*max_ids_per_keyword);
                for _ in 0..count {
                    let mut raw = [0u8; ID_WIDTH];
                    rng.fill_bytes(&mut raw);
                    raw[0] &= 0x7F;
                    db.insert(&keyword, FileId(raw));
                }
            }
            db
        }
        DatabaseSpec::Corpus { path } => ingest_corpus(std::path::Path::new(path))?.0,
    };
    db.validate().map_err(|e| ScenarioError::Config(e.to_string()))?;
    Ok(db)
}

fn snapshot(ledger: &LedgerState) -> BTreeMap<Party, u64> {
    ledger.balances().clone()
}

fn deltas(before: &BTreeMap<Party, u64>, ledger: &LedgerState) -> BTreeMap<String, i64> {
    let mut out = BTreeMap::new();
    for (party, after) in ledger.balances() {
        let b = before.get(party).copied().unwrap_or(0);
        out.insert(party.to_string(), *after as i64 - b as i64);
    }
    out
}

fn run_baseline(
    config: &ScenarioConfig,
    database: &Database,
    lambda: crate::crypto::SecurityParam,
    ledger: &mut LedgerState,
    trace: &mut ExecutionTrace,
    rng: &mut ChaCha20Rng,
) -> Result<Vec<SessionOutcome>, ScenarioError> {
    let client = Party::client();
    let (master, index) = setup(database, lambda, config.block_size, rng)?;
    store_edb_on_chain(ledger, &client, &index)?;
    ledger.advance_block();

    let reveal = config.reveal_k2.unwrap_or(true);
    let gas = config.pricing.gas_per_contract_step;
    let budget = config
        .baseline_rounds
        .saturating_mul(config.baseline_step)
        .saturating_mul(gas);

    let mut outcomes = Vec::new();
    for (i, keyword) in config.queries.iter().enumerate() {
        let session_id = format!("q{i}");
        trace.touch_query(i, &session_id);
        let before = snapshot(ledger);
        ledger.deposit(&client, budget, &session_id)?;
        let trapdoor = derive_trapdoor(&master, keyword)?;
        let mut counter = 0u64;
        for round in 0..config.baseline_rounds {
            let token = BaselineToken {
                k1: trapdoor.k1,
                k2: reveal.then_some(trapdoor.k2),
                counter,
            };
            let call_id = format!("{session_id}-r{round}");
            let out = ledger.baseline_contract_search(
                &client,
                &session_id,
                &call_id,
                &token,
                config.baseline_step,
            )?;
            let hits = out.rows_consumed as usize;
            trace.record_lookups(
                i,
                &session_id,
                ACTOR_LEDGER,
                out.labels.iter().enumerate().map(|(j, l)| (l, j < hits)),
            );
            counter += out.rows_consumed;
            if out.hit_end {
                break;
            }
        }
        ledger.refund_escrow(&session_id, &client)?;
        ledger.advance_block();
        outcomes.push(SessionOutcome {
            session_id,
            adversary: config.adversary,
            terminal_state: "completed".to_string(),
            settlement: None,
            dispute_step: None,
            net_deltas: deltas(&before, ledger),
        });
    }
    Ok(outcomes)
}

fn initial_scripts(config: &ScenarioConfig, n: usize) -> Vec<InitialServerScript> {
    match config.adversary {
        AdversaryBehavior::InitialAllCollude => vec![InitialServerScript::ColludedWrongCommit; n],
        AdversaryBehavior::InitialOneServerWrongCommit => {
            let cheats: Vec<usize> = if config.cheat_servers.is_empty() {
                vec![0]
            } else {
                config.cheat_servers.clone()
            };
            (0..n)
                .map(|i| {
                    if cheats.contains(&i) {
                        InitialServerScript::WrongCommit
                    } else {
                        InitialServerScript::Honest
                    }
                })
                .collect()
        }
        _ => vec![InitialServerScript::Honest; n],
    }
}

fn run_initial(
    config: &ScenarioConfig,
    database: &Database,
    lambda: crate::crypto::SecurityParam,
    ledger: &mut LedgerState,
    trace: &mut ExecutionTrace,
    rng: &mut ChaCha20Rng,
) -> Result<Vec<SessionOutcome>, ScenarioError> {
    let n = config.n.expect("validated");
    let deployment = setup_multi(database, n, lambda, config.block_size, rng)?;
    let scripts = initial_scripts(config, n);
    let client = Party::client();

    let mut outcomes = Vec::new();
    for (i, keyword) in config.queries.iter().enumerate() {
        let session_id = format!("q{i}");
        trace.touch_query(i, &session_id);
        let before = snapshot(ledger);
        let mut session = request_search(
            ledger,
            &deployment,
            &client,
            &session_id,
            i,
            keyword,
            rng,
        )?;
        commit_all(ledger, &deployment, &mut session, &scripts, trace, rng)?;
        let phase = validate_and_pay(ledger, &deployment, &mut session, &scripts)?;
        if phase == InitialPhase::Paid {
            // Retrieval from any server; under full collusion the colluded
            // answer passes this check, which is the documented caveat.
            let delivered = session.delivered_ids(0).expect("committed").to_vec();
            retrieve_and_check(&session, &delivered)
                .map_err(|e| ScenarioError::Invariant(e.to_string()))?;
        }
        ledger.advance_block();
        outcomes.push(SessionOutcome {
            session_id,
            adversary: config.adversary,
            terminal_state: match phase {
                InitialPhase::Paid => "paid".to_string(),
                InitialPhase::DisputeOffline => "dispute_offline".to_string(),
                other => other.to_string(),
            },
            settlement: None,
            dispute_step: None,
            net_deltas: deltas(&before, ledger),
        });
    }
    Ok(outcomes)
}

/// Build the stale copy a cheating server holds: corrupt the payload of
/// the row the queried keyword's first lookup hits, so the stale search
/// actually returns wrong identifiers. Falls back to the first row when
/// the keyword has no rows.
fn tampered_copy(
    deployment: &crate::framework::improved::ImprovedDeployment,
    keyword: &str,
) -> SignedIndex {
    let signed = &deployment.signed_index;
    let mut bytes = encode_index(&signed.index);
    let header = 4 + 4 + 4 + 4 + 8;
    if bytes.len() <= header + 32 {
        return signed.clone();
    }
    let row_len = 32 + signed.index.block_size() * ID_WIDTH + signed.index.lambda().key_len();
    let row_idx = deployment
        .trapdoor(keyword)
        .ok()
        .and_then(|t| {
            let label = crate::crypto::prf_f(&t.k1, &0u64.to_be_bytes()).ok()?;
            signed.index.rows().iter().position(|r| r.label == label)
        })
        .unwrap_or(0);
    bytes[header + row_idx * row_len + 32] ^= 0xFF;
    SignedIndex {
        index: decode_index(&bytes).expect("payload flip keeps the encoding well-formed"),
        sig: signed.sig.clone(),
    }
}

fn run_improved(
    config: &ScenarioConfig,
    database: &Database,
    lambda: crate::crypto::SecurityParam,
    ledger: &mut LedgerState,
    trace: &mut ExecutionTrace,
    rng: &mut ChaCha20Rng,
) -> Result<Vec<SessionOutcome>, ScenarioError> {
    let client = Party::client();
    let server_party = Party::server(0);
    let deployment = setup_improved(
        ledger,
        &client,
        database,
        lambda,
        config.block_size,
        config.proof_backend,
        rng,
    )?;
    ledger.advance_block();

    let server_script = match config.adversary {
        AdversaryBehavior::ServerWrongIds => ServerSearchScript::WrongIds,
        AdversaryBehavior::ServerStaleIndex => ServerSearchScript::StaleIndex,
        AdversaryBehavior::ServerSilent => ServerSearchScript::Silent,
        AdversaryBehavior::ServerGarbageCiphertext => ServerSearchScript::GarbageCiphertext,
        _ => ServerSearchScript::Honest,
    };
    let client_script = match config.adversary {
        AdversaryBehavior::ClientFalseDispute => ClientValidateScript::FalseDispute,
        AdversaryBehavior::ClientWithholdValidation => ClientValidateScript::Withhold,
        _ => ClientValidateScript::Honest,
    };
    let trapdoor_choice = match config.adversary {
        AdversaryBehavior::ClientBogusSignedTrapdoor => TrapdoorChoice::Bogus,
        _ => TrapdoorChoice::Genuine,
    };

    let mut outcomes = Vec::new();
    for (i, keyword) in config.queries.iter().enumerate() {
        let session_id = format!("q{i}");
        trace.touch_query(i, &session_id);
        let before = snapshot(ledger);
        let mut session = ImprovedSession::new(&session_id, i, keyword);
        let held = if config.adversary == AdversaryBehavior::ServerStaleIndex {
            tampered_copy(&deployment, keyword)
        } else {
            deployment.signed_index.clone()
        };
        let mut server = ImprovedServer::new(server_party.clone(), held);

        if begin_search(ledger, &mut session, &server_party)? == Proceed::Halt {
            outcomes.push(SessionOutcome {
                session_id,
                adversary: config.adversary,
                terminal_state: "halted".to_string(),
                settlement: None,
                dispute_step: None,
                net_deltas: deltas(&before, ledger),
            });
            continue;
        }
        issue_trapdoor(
            ledger,
            &deployment,
            &mut session,
            &mut server,
            trapdoor_choice,
            rng,
        )?;
        server_search(ledger, &mut session, &mut server, server_script, trace, rng)?;

        if session.state == SessionState::TrapdoorIssued {
            // Silent server: run to the deadline.
            run_to_deadline(ledger, config.pricing.deadline_blocks);
        } else {
            match client_validate(
                ledger,
                &deployment,
                &mut session,
                &server_party,
                client_script,
                rng,
            )? {
                ValidationOutcome::SearchOk => {}
                ValidationOutcome::Withheld => {
                    run_to_deadline(ledger, config.pricing.deadline_blocks);
                }
                ValidationOutcome::DisputeRaised => {
                    resolve_dispute(
                        ledger,
                        config.proof_backend,
                        &mut session,
                        &mut server,
                        ServerDisputeScript::Truthful,
                    )?;
                }
            }
        }

        let settlement = ledger.settlement_of(&session_id);
        let terminal_state = match settlement {
            Some(SettlementKind::Type1) => "settled_type1".to_string(),
            Some(SettlementKind::Type2) => "settled_type2".to_string(),
            None => session.state.to_string(),
        };
        ledger.advance_block();
        outcomes.push(SessionOutcome {
            session_id,
            adversary: config.adversary,
            terminal_state,
            settlement,
            dispute_step: session.dispute_step,
            net_deltas: deltas(&before, ledger),
        });
    }
    Ok(outcomes)
}

fn run_to_deadline(ledger: &mut LedgerState, deadline_blocks: u64) {
    for _ in 0..=deadline_blocks {
        ledger.advance_block();
        let fired = ledger.expire_deadlines();
        if !fired.is_empty() {
            return;
        }
    }
}
