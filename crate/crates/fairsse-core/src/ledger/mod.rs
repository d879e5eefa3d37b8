//! Deterministic simulated blockchain: registered accounts, escrow,
//! an append-only item store, block progression with chained digests,
//! pricing and cost accounting, and the hosted contract logic (baseline
//! on-chain search; settlement actions and deadlines for the fairness
//! frameworks).
//!
//! Consensus is abstracted to one logical sealer. The miner count only
//! multiplies the cost model; it never fans out execution. All state
//! changes go through calls attributed to a registered party, and token
//! conservation is re-checked after every mutation.

mod contract;
mod pricing;
mod state;

pub use contract::{store_edb_on_chain, BaselineSearchOutput, BaselineToken};
pub use pricing::{
    CostReport, PricingConfig, SettlementAction, SettlementContext, SettlementKind, Transfer,
};
pub use state::{DeadlineEntry, LedgerEvent, LedgerState, Party, Receipt};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("insufficient funds: {party} has {have}, needs {need}")]
    InsufficientFunds { party: String, need: u64, have: u64 },
    #[error("item {0} already stored; the item store is append-only")]
    Immutability(String),
    #[error("gas assertion failed: escrow {have} below required {need}")]
    GasAssertion { need: u64, have: u64 },
    #[error("session {0} already settled")]
    AlreadySettled(String),
    #[error("party {0} is not registered")]
    UnknownParty(String),
    #[error("party {0} is already registered")]
    AlreadyRegistered(String),
    #[error("token conservation violated")]
    ConservationViolated,
    #[error("missing on-chain item {0}")]
    MissingItem(String),
    #[error("malformed on-chain item {0}")]
    MalformedItem(String),
    #[error("invalid pricing: {0}")]
    InvalidPricing(String),
}
