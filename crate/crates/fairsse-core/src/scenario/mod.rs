//! End-to-end scenario harness: corpus ingestion, scenario configuration,
//! the adversary catalog, run orchestration, and report emission.
//!
//! A scenario is one deterministic logical thread: (config, seed) fully
//! determine the report bytes. Independent scenarios can run in parallel
//! processes.

mod config;
mod ingest;
mod report;
mod runner;

pub use config::{
    AdversaryBehavior, DatabaseSpec, FrameworkKind, ScenarioConfig, CONFIG_SCHEMA,
};
pub use ingest::{ingest_corpus, IngestStats};
pub use report::{ScenarioReport, SessionOutcome, REPORT_SCHEMA};
pub use runner::{run_scenario, ScenarioRun};

use thiserror::Error;

use crate::framework::FrameworkError;
use crate::ledger::LedgerError;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario config: {0}")]
    Config(String),
    #[error("corpus directory has no readable files: {0}")]
    EmptyCorpus(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Framework(#[from] FrameworkError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Sse(#[from] crate::sse::SseError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ScenarioError {
    /// Process exit code contract: 2 for config problems, 3 for invariant
    /// violations, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) | ScenarioError::EmptyCorpus(_) => 2,
            ScenarioError::Invariant(_) => 3,
            ScenarioError::Ledger(LedgerError::ConservationViolated) => 3,
            _ => 1,
        }
    }
}
