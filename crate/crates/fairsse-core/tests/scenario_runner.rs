//! Config-driven runs: determinism, adversary outcomes through the report
//! surface, cross-framework cost comparison, and leakage views.

mod common;

use fairsse_core::analysis::ObserverView;
use fairsse_core::ledger::SettlementKind;
use fairsse_core::scenario::{
    run_scenario, AdversaryBehavior, DatabaseSpec, FrameworkKind, ScenarioConfig,
};

fn generated_db() -> DatabaseSpec {
    DatabaseSpec::Generated {
        keywords: 8,
        max_ids_per_keyword: 20,
    }
}

fn queries() -> Vec<String> {
    vec![
        "kw000".into(),
        "kw001".into(),
        "kw000".into(),
        "kw005".into(),
    ]
}

#[test]
fn identical_config_and_seed_reproduce_identical_report_bytes() {
    for framework in [
        FrameworkKind::BaselineOnChain,
        FrameworkKind::Initial,
        FrameworkKind::Improved,
    ] {
        let mut config = ScenarioConfig::new(framework, 99, generated_db());
        config.queries = queries();
        let a = run_scenario(&config).unwrap().report.to_json();
        let b = run_scenario(&config).unwrap().report.to_json();
        assert_eq!(a, b, "framework {framework:?} not reproducible");
    }
}

#[test]
fn different_seeds_differ() {
    let mut config = ScenarioConfig::new(FrameworkKind::Improved, 1, generated_db());
    config.queries = queries();
    let a = run_scenario(&config).unwrap().report.to_json();
    config.seed = 2;
    let b = run_scenario(&config).unwrap().report.to_json();
    assert_ne!(a, b);
}

#[test]
fn improved_honest_all_settles_every_session_type1() {
    let mut config = ScenarioConfig::new(FrameworkKind::Improved, 5, generated_db());
    config.queries = queries();
    let run = run_scenario(&config).unwrap();
    assert_eq!(run.report.sessions.len(), 4);
    for session in &run.report.sessions {
        assert_eq!(session.settlement, Some(SettlementKind::Type1));
        assert_eq!(session.terminal_state, "settled_type1");
        assert_eq!(session.dispute_step, None);
    }
    assert!(run.report.conservation_ok);
}

#[test]
fn improved_server_wrong_ids_settles_type2_at_step_iv() {
    let mut config = ScenarioConfig::new(FrameworkKind::Improved, 6, generated_db());
    config.queries = vec!["kw000".into(), "kw002".into()];
    config.adversary = AdversaryBehavior::ServerWrongIds;
    let run = run_scenario(&config).unwrap();
    for session in &run.report.sessions {
        assert_eq!(session.settlement, Some(SettlementKind::Type2));
        assert_eq!(
            serde_json::to_value(session.dispute_step).unwrap(),
            serde_json::json!("re_execution")
        );
    }
}

#[test]
fn initial_honest_pays_and_one_cheater_freezes() {
    let mut config = ScenarioConfig::new(FrameworkKind::Initial, 7, generated_db());
    config.queries = vec!["kw000".into()];
    let run = run_scenario(&config).unwrap();
    assert_eq!(run.report.sessions[0].terminal_state, "paid");

    config.adversary = AdversaryBehavior::InitialOneServerWrongCommit;
    config.cheat_servers = vec![1];
    let run = run_scenario(&config).unwrap();
    assert_eq!(run.report.sessions[0].terminal_state, "dispute_offline");

    config.adversary = AdversaryBehavior::InitialAllCollude;
    config.cheat_servers = Vec::new();
    let run = run_scenario(&config).unwrap();
    assert_eq!(
        run.report.sessions[0].terminal_state, "paid",
        "full collusion is the documented successful cheat"
    );
}

#[test]
fn baseline_reveal_modes_agree_on_lookups_but_differ_on_stored_results() {
    let mut config = ScenarioConfig::new(FrameworkKind::BaselineOnChain, 8, generated_db());
    config.queries = vec!["kw000".into(), "kw003".into()];
    config.reveal_k2 = Some(true);
    let revealed = run_scenario(&config).unwrap();
    config.reveal_k2 = Some(false);
    let masked = run_scenario(&config).unwrap();

    // Same access pattern either way.
    assert_eq!(
        revealed.report.leakage_ledger_view.profile,
        masked.report.leakage_ledger_view.profile
    );
    let has_results = |run: &fairsse_core::scenario::ScenarioRun| {
        run.ledger.items().any(|(k, _)| k.starts_with("result/"))
    };
    assert!(has_results(&revealed));
    assert!(!has_results(&masked));
}

#[test]
fn baseline_leaks_on_ledger_improved_does_not() {
    let mut baseline = ScenarioConfig::new(FrameworkKind::BaselineOnChain, 9, generated_db());
    baseline.queries = queries();
    let run = run_scenario(&baseline).unwrap();
    let ledger_leak = &run.report.leakage_ledger_view;
    assert_eq!(ledger_leak.view, ObserverView::LedgerOnly);
    assert!(!ledger_leak.partition.is_empty());
    // Queries 0 and 2 repeat the keyword; the chain observer sees it.
    assert!(ledger_leak.partition.iter().any(|c| c == &vec![0, 2]));

    let mut improved = ScenarioConfig::new(FrameworkKind::Improved, 9, generated_db());
    improved.queries = queries();
    let run = run_scenario(&improved).unwrap();
    assert!(
        run.report.leakage_ledger_view.partition.is_empty(),
        "no on-ledger lookups to partition"
    );
    assert!(run
        .report
        .leakage_ledger_view
        .profile
        .per_query
        .iter()
        .all(|q| q.entries == 0));
    // The server still sees its own access pattern.
    assert!(run
        .report
        .leakage_server_view
        .partition
        .iter()
        .any(|c| c == &vec![0, 2]));
}

#[test]
fn baseline_costs_strictly_more_than_improved_on_the_same_queries() {
    let mut baseline = ScenarioConfig::new(FrameworkKind::BaselineOnChain, 10, generated_db());
    baseline.queries = queries();
    let baseline_run = run_scenario(&baseline).unwrap();

    let mut improved = ScenarioConfig::new(FrameworkKind::Improved, 10, generated_db());
    improved.queries = queries();
    let improved_run = run_scenario(&improved).unwrap();

    let (b, i) = (baseline_run.report.cost, improved_run.report.cost);
    assert!(b.storage_bytes > i.storage_bytes);
    assert!(b.contract_steps > i.contract_steps);
    assert!(b.replicated_storage_bytes > i.replicated_storage_bytes);
}

#[test]
fn unknown_keyword_is_an_empty_honest_result() {
    let mut config = ScenarioConfig::new(FrameworkKind::Improved, 11, generated_db());
    config.queries = vec!["not-a-keyword".into()];
    let run = run_scenario(&config).unwrap();
    assert_eq!(
        run.report.sessions[0].settlement,
        Some(SettlementKind::Type1)
    );
}

#[test]
fn invalid_config_fails_before_execution() {
    let mut config = ScenarioConfig::new(FrameworkKind::Improved, 12, generated_db());
    config.adversary = AdversaryBehavior::InitialAllCollude;
    let err = run_scenario(&config).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn inline_database_round_trip() {
    let mut entries = std::collections::BTreeMap::new();
    entries.insert(
        "alpha".to_string(),
        vec![
            "000102030405060708090a0b0c0d0e0f".to_string(),
            "101112131415161718191a1b1c1d1e1f".to_string(),
        ],
    );
    let mut config = ScenarioConfig::new(
        FrameworkKind::Improved,
        13,
        DatabaseSpec::Inline { entries },
    );
    config.queries = vec!["alpha".into()];
    let run = run_scenario(&config).unwrap();
    assert_eq!(run.database.ids("alpha").unwrap().len(), 2);
    assert_eq!(
        run.report.sessions[0].settlement,
        Some(SettlementKind::Type1)
    );
}

#[test]
fn report_json_has_versioned_schema() {
    let mut config = ScenarioConfig::new(FrameworkKind::Improved, 14, generated_db());
    config.queries = vec!["kw000".into()];
    let run = run_scenario(&config).unwrap();
    let value: serde_json::Value = serde_json::from_str(&run.report.to_json()).unwrap();
    assert_eq!(value["schema"], "fairsse-report/1");
    assert_eq!(value["sessions"][0]["settlement"], "type1");
}
