//! Core chain state: accounts, escrow, items, blocks, and the event log.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::pricing::{CostReport, PricingConfig, SettlementAction, SettlementKind};
use super::LedgerError;
use crate::crypto::hash_h;

/// A registered on-chain identity. Calls are attributed to parties; only
/// registered parties can change contract state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Party(String);

impl Party {
    pub fn new(name: impl Into<String>) -> Self {
        Party(name.into())
    }

    pub fn client() -> Self {
        Party("client".into())
    }

    pub fn server(i: usize) -> Self {
        Party(format!("server-{i}"))
    }

    /// Sink account collecting execution charges; models the contract
    /// operator / miner compensation side of the cost model.
    pub fn operator() -> Self {
        Party("operator".into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// One logged state change. Field order is the stable JSON-lines order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEvent {
    pub height: u64,
    pub caller: String,
    pub op: String,
    pub key: String,
    pub amount: u64,
    pub digest: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Receipt {
    pub height: u64,
    pub event_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredItem {
    pub bytes: Vec<u8>,
    pub height: u64,
}

/// A registered auto-settlement: if the session is still open at
/// `at_height`, the default action fires.
#[derive(Debug, Clone)]
pub struct DeadlineEntry {
    pub at_height: u64,
    pub action: SettlementAction,
}

/// The simulated chain.
#[derive(Debug, Clone)]
pub struct LedgerState {
    pricing: PricingConfig,
    miner_count: u64,
    height: u64,
    block_digests: Vec<[u8; 32]>,
    pending_event_digests: Vec<[u8; 32]>,
    balances: BTreeMap<Party, u64>,
    escrow: BTreeMap<String, BTreeMap<Party, u64>>,
    items: BTreeMap<String, StoredItem>,
    events: Vec<LedgerEvent>,
    minted: u64,
    registered: BTreeSet<Party>,
    contract_steps: u64,
    stored_bytes: u64,
    pub(super) deadlines: Vec<DeadlineEntry>,
    pub(super) settled: BTreeMap<String, SettlementKind>,
}

impl LedgerState {
    pub fn new(pricing: PricingConfig, miner_count: u64) -> Result<Self, LedgerError> {
        pricing.validate()?;
        let mut ledger = LedgerState {
            pricing,
            miner_count: miner_count.max(1),
            height: 0,
            block_digests: vec![[0u8; 32]],
            pending_event_digests: Vec::new(),
            balances: BTreeMap::new(),
            escrow: BTreeMap::new(),
            items: BTreeMap::new(),
            events: Vec::new(),
            minted: 0,
            registered: BTreeSet::new(),
            contract_steps: 0,
            stored_bytes: 0,
            deadlines: Vec::new(),
            settled: BTreeMap::new(),
        };
        ledger
            .register_party(&Party::operator(), 0)
            .expect("fresh ledger");
        Ok(ledger)
    }

    pub fn pricing(&self) -> &PricingConfig {
        &self.pricing
    }

    pub fn height(&self) -> u64 {
        self.height
    }

    pub fn miner_count(&self) -> u64 {
        self.miner_count
    }

    pub fn contract_steps(&self) -> u64 {
        self.contract_steps
    }

    pub fn stored_bytes(&self) -> u64 {
        self.stored_bytes
    }

    pub fn register_party(&mut self, party: &Party, initial_balance: u64) -> Result<(), LedgerError> {
        if !self.registered.insert(party.clone()) {
            return Err(LedgerError::AlreadyRegistered(party.to_string()));
        }
        self.balances.insert(party.clone(), initial_balance);
        self.minted += initial_balance;
        self.log(party, "register", party.name(), initial_balance);
        self.check_conservation()
    }

    pub fn balance(&self, party: &Party) -> u64 {
        self.balances.get(party).copied().unwrap_or(0)
    }

    pub fn balances(&self) -> &BTreeMap<Party, u64> {
        &self.balances
    }

    fn require_registered(&self, party: &Party) -> Result<(), LedgerError> {
        if self.registered.contains(party) {
            Ok(())
        } else {
            Err(LedgerError::UnknownParty(party.to_string()))
        }
    }

    /// Lock tokens under an escrow purpose. A zero amount is accepted and
    /// leaves a no-op escrow record.
    pub fn deposit(
        &mut self,
        party: &Party,
        amount: u64,
        purpose: &str,
    ) -> Result<Receipt, LedgerError> {
        self.require_registered(party)?;
        let balance = self.balances.get_mut(party).expect("registered");
        if *balance < amount {
            return Err(LedgerError::InsufficientFunds {
                party: party.to_string(),
                need: amount,
                have: *balance,
            });
        }
        *balance -= amount;
        *self
            .escrow
            .entry(purpose.to_string())
            .or_default()
            .entry(party.clone())
            .or_insert(0) += amount;
        let receipt = self.log(party, "deposit", purpose, amount);
        self.check_conservation()?;
        Ok(receipt)
    }

    pub fn escrow_of(&self, purpose: &str, party: &Party) -> u64 {
        self.escrow
            .get(purpose)
            .and_then(|m| m.get(party))
            .copied()
            .unwrap_or(0)
    }

    pub fn escrow_total(&self, purpose: &str) -> u64 {
        self.escrow
            .get(purpose)
            .map(|m| m.values().sum())
            .unwrap_or(0)
    }

    pub fn total_escrow(&self) -> u64 {
        self.escrow.values().flat_map(|m| m.values()).sum()
    }

    /// Move tokens out of a party's escrow to a recipient's balance.
    /// Saturates at what the escrow actually holds; returns the amount
    /// moved.
    pub(crate) fn escrow_pay(
        &mut self,
        purpose: &str,
        from: &Party,
        to: &Party,
        amount: u64,
    ) -> u64 {
        let available = self
            .escrow
            .get_mut(purpose)
            .and_then(|m| m.get_mut(from));
        let Some(held) = available else { return 0 };
        let moved = amount.min(*held);
        *held -= moved;
        *self.balances.entry(to.clone()).or_insert(0) += moved;
        moved
    }

    pub(crate) fn escrow_remaining(&self, purpose: &str, party: &Party) -> u64 {
        self.escrow_of(purpose, party)
    }

    /// Return a party's remaining escrow under a purpose to its balance.
    pub fn refund_escrow(&mut self, purpose: &str, party: &Party) -> Result<u64, LedgerError> {
        self.require_registered(party)?;
        let remaining = self.escrow_of(purpose, party);
        let moved = self.escrow_pay(purpose, party, &party.clone(), remaining);
        if moved > 0 {
            self.log(party, "escrow_refund", purpose, moved);
        }
        self.check_conservation()?;
        Ok(moved)
    }

    /// Store an immutable item. Any party may read it back; that public
    /// readability is what amplifies on-chain leakage.
    pub fn store_item(
        &mut self,
        caller: &Party,
        key: &str,
        bytes: &[u8],
    ) -> Result<Receipt, LedgerError> {
        self.require_registered(caller)?;
        if self.items.contains_key(key) {
            return Err(LedgerError::Immutability(key.to_string()));
        }
        self.stored_bytes += bytes.len() as u64;
        self.items.insert(
            key.to_string(),
            StoredItem {
                bytes: bytes.to_vec(),
                height: self.height,
            },
        );
        let receipt = self.log(caller, "store_item", key, bytes.len() as u64);
        self.check_conservation()?;
        Ok(receipt)
    }

    pub fn get_item(&self, key: &str) -> Option<&[u8]> {
        self.items.get(key).map(|item| item.bytes.as_slice())
    }

    pub fn item_height(&self, key: &str) -> Option<u64> {
        self.items.get(key).map(|item| item.height)
    }

    pub fn items(&self) -> impl Iterator<Item = (&str, &StoredItem)> {
        self.items.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Seal the pending events into a new block and extend the hash chain.
    pub fn advance_block(&mut self) -> u64 {
        let mut acc = Vec::with_capacity(self.pending_event_digests.len() * 32);
        for d in &self.pending_event_digests {
            acc.extend_from_slice(d);
        }
        let events_digest = hash_h(&acc);
        let prev = self.block_digests.last().expect("genesis digest");
        let mut buf = Vec::with_capacity(72);
        buf.extend_from_slice(prev);
        buf.extend_from_slice(&(self.height + 1).to_be_bytes());
        buf.extend_from_slice(&events_digest);
        self.block_digests.push(hash_h(&buf));
        self.pending_event_digests.clear();
        self.height += 1;
        self.height
    }

    pub fn block_digests(&self) -> &[[u8; 32]] {
        &self.block_digests
    }

    pub(crate) fn note_contract_steps(&mut self, n: u64) {
        self.contract_steps += n;
    }

    pub(crate) fn log(&mut self, caller: &Party, op: &str, key: &str, amount: u64) -> Receipt {
        let mut buf = Vec::new();
        buf.extend_from_slice(&self.height.to_be_bytes());
        buf.extend_from_slice(caller.name().as_bytes());
        buf.push(0);
        buf.extend_from_slice(op.as_bytes());
        buf.push(0);
        buf.extend_from_slice(key.as_bytes());
        buf.push(0);
        buf.extend_from_slice(&amount.to_be_bytes());
        let digest = hash_h(&buf);
        self.pending_event_digests.push(digest);
        self.events.push(LedgerEvent {
            height: self.height,
            caller: caller.to_string(),
            op: op.to_string(),
            key: key.to_string(),
            amount,
            digest: hex::encode(digest),
        });
        Receipt {
            height: self.height,
            event_index: self.events.len() - 1,
        }
    }

    pub fn events(&self) -> &[LedgerEvent] {
        &self.events
    }

    /// One compact JSON object per event, in emission order.
    pub fn export_events_jsonl(&self) -> String {
        let mut out = String::new();
        for event in &self.events {
            out.push_str(&serde_json::to_string(event).expect("event serializes"));
            out.push('\n');
        }
        out
    }

    /// Total minted must always equal balances plus locked escrow.
    pub fn check_conservation(&self) -> Result<(), LedgerError> {
        let circulating: u64 = self.balances.values().sum::<u64>() + self.total_escrow();
        if circulating == self.minted {
            Ok(())
        } else {
            Err(LedgerError::ConservationViolated)
        }
    }

    pub fn cost_report(&self) -> CostReport {
        CostReport {
            storage_bytes: self.stored_bytes,
            contract_steps: self.contract_steps,
            miner_count: self.miner_count,
            replicated_storage_bytes: self.stored_bytes * self.miner_count,
            replicated_contract_steps: self.contract_steps * self.miner_count,
        }
    }
}
