//! Pricing, settlement actions, and the replication-adjusted cost model.

use serde::{Deserialize, Serialize};

use super::state::Party;
use super::LedgerError;

/// Contract invocations a non-disputed single-server search session makes:
/// two deposits, the proceed check, storing the trapdoor signature, storing
/// the result ciphertext, and the settlement call.
pub const IMPROVED_WORKFLOW_STEPS: u64 = 6;

/// Pre-agreed amounts. All values are integer tokens; the deadline is in
/// blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PricingConfig {
    pub search_fee: u64,
    pub gas_per_contract_step: u64,
    pub dispute_deposit: u64,
    pub punishment_amount: u64,
    pub deadline_blocks: u64,
}

impl Default for PricingConfig {
    fn default() -> Self {
        PricingConfig {
            search_fee: 10,
            gas_per_contract_step: 1,
            dispute_deposit: 25,
            punishment_amount: 20,
            deadline_blocks: 3,
        }
    }
}

impl PricingConfig {
    pub fn validate(&self) -> Result<(), LedgerError> {
        if self.punishment_amount == 0 {
            return Err(LedgerError::InvalidPricing(
                "punishment_amount must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Contract work of the multi-server validation flow: open each of the
    /// n commitments, compare, pay.
    pub fn initial_workflow_gas(&self, n: usize) -> u64 {
        (n as u64 + 2) * self.gas_per_contract_step
    }

    /// Client-side deposit for one multi-server query: n search fees plus
    /// the workflow gas.
    pub fn initial_client_deposit(&self, n: usize) -> u64 {
        n as u64 * self.search_fee + self.initial_workflow_gas(n)
    }

    pub fn improved_workflow_gas(&self) -> u64 {
        IMPROVED_WORKFLOW_STEPS * self.gas_per_contract_step
    }

    /// Client covers the fee, the workflow gas, and its dispute share.
    pub fn improved_client_deposit(&self) -> u64 {
        self.search_fee + self.improved_workflow_gas() + self.dispute_deposit
    }

    /// Server covers the workflow gas, its dispute share, and the
    /// pre-agreed punishment for potential cheating.
    pub fn improved_server_deposit(&self) -> u64 {
        self.improved_workflow_gas() + self.dispute_deposit + self.punishment_amount
    }
}

/// Terminal settlement favoring the server (Type1) or the client (Type2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SettlementKind {
    Type1,
    Type2,
}

/// Everything settle() needs to compute the transfers for one session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettlementContext {
    /// Escrow purpose string shared by both parties' deposits.
    pub session: String,
    pub client: Party,
    pub server: Party,
    pub fee: u64,
    /// Workflow execution charge: contract steps times gas price.
    pub exec_cost: u64,
    /// Whether dispute resolution ran; the losing side's dispute deposit
    /// is then consumed by the contract operator.
    pub disputed: bool,
}

/// A settlement decision together with its context; applying it computes
/// the transfers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettlementAction {
    pub kind: SettlementKind,
    pub ctx: SettlementContext,
}

impl SettlementAction {
    pub fn type1(ctx: SettlementContext) -> Self {
        SettlementAction {
            kind: SettlementKind::Type1,
            ctx,
        }
    }

    pub fn type2(ctx: SettlementContext) -> Self {
        SettlementAction {
            kind: SettlementKind::Type2,
            ctx,
        }
    }
}

/// One applied escrow payout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transfer {
    pub to: Party,
    pub amount: u64,
    pub memo: String,
}

/// Resource totals versus their several-miners-replicated equivalents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub storage_bytes: u64,
    pub contract_steps: u64,
    pub miner_count: u64,
    pub replicated_storage_bytes: u64,
    pub replicated_contract_steps: u64,
}
