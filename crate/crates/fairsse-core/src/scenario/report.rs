//! The versioned scenario report: the single integration surface the
//! golden-file tests pin.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{AdversaryBehavior, FrameworkKind};
use crate::analysis::LeakageReport;
use crate::framework::improved::DisputeStep;
use crate::ledger::{CostReport, SettlementKind};

pub const REPORT_SCHEMA: &str = "fairsse-report/1";

/// Terminal record for one session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionOutcome {
    pub session_id: String,
    pub adversary: AdversaryBehavior,
    pub terminal_state: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settlement: Option<SettlementKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dispute_step: Option<DisputeStep>,
    /// Balance change per party over the session, in tokens.
    pub net_deltas: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub schema: String,
    pub framework: FrameworkKind,
    pub adversary: AdversaryBehavior,
    pub seed: u64,
    pub sessions: Vec<SessionOutcome>,
    pub conservation_ok: bool,
    pub cost: CostReport,
    pub leakage_ledger_view: LeakageReport,
    pub leakage_server_view: LeakageReport,
    pub ledger_event_count: usize,
    pub final_height: u64,
}

impl ScenarioReport {
    /// The canonical report bytes; identical (config, seed) pairs must
    /// reproduce these exactly.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
