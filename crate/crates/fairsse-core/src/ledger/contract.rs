//! Hosted contract logic: the baseline on-chain search loop, settlement
//! application, and deadline expiry.

use super::pricing::{SettlementAction, SettlementKind, Transfer};
use super::state::{DeadlineEntry, LedgerState, Party, Receipt};
use super::LedgerError;
use crate::crypto::prf_f;
use crate::sse::{unmask_row, EncryptedIndex, FileId, ID_WIDTH};

/// The search token the client hands the contract. Withholding K2 is the
/// leakage fix: the contract then returns masked rows for client-side
/// unmasking instead of recovering identifiers on-chain.
#[derive(Debug, Clone)]
pub struct BaselineToken {
    pub k1: [u8; 32],
    pub k2: Option<[u8; 32]>,
    pub counter: u64,
}

/// What one contract search call produced.
#[derive(Debug, Clone, Default)]
pub struct BaselineSearchOutput {
    /// Identifier blocks recovered on-chain (reveal mode only), padding
    /// included.
    pub revealed_blocks: Vec<Vec<FileId>>,
    /// (payload, nonce) pairs returned unopened (masked mode only).
    pub masked_rows: Vec<(Vec<u8>, Vec<u8>)>,
    /// Labels looked up, in order, including the final miss if any.
    pub labels: Vec<[u8; 32]>,
    pub rows_consumed: u64,
    /// True when the loop stopped on a missing label.
    pub hit_end: bool,
}

/// Upload an encrypted index into the item store, one row per item plus a
/// metadata item. Each parsed-and-added row counts as contract work.
pub fn store_edb_on_chain(
    ledger: &mut LedgerState,
    caller: &Party,
    index: &EncryptedIndex,
) -> Result<(), LedgerError> {
    let mut meta = Vec::with_capacity(8);
    meta.extend_from_slice(&index.lambda().bits().to_be_bytes());
    meta.extend_from_slice(&(index.block_size() as u32).to_be_bytes());
    ledger.store_item(caller, "edb/meta", &meta)?;
    for row in index.rows() {
        let mut value = Vec::with_capacity(row.payload.len() + row.nonce.len());
        value.extend_from_slice(&row.payload);
        value.extend_from_slice(&row.nonce);
        ledger.store_item(caller, &format!("edb/{}", hex::encode(row.label)), &value)?;
        ledger.note_contract_steps(1);
    }
    Ok(())
}

impl LedgerState {
    /// Run the on-chain search loop for one token submission, consuming at
    /// most `step` rows. Gas is charged per iteration from the caller's
    /// escrow under `purpose`; the call asserts up front that the escrow
    /// covers the worst case.
    ///
    /// `call_id` scopes any stored result items so repeated searches do
    /// not collide in the append-only store.
    pub fn baseline_contract_search(
        &mut self,
        caller: &Party,
        purpose: &str,
        call_id: &str,
        token: &BaselineToken,
        step: u64,
    ) -> Result<BaselineSearchOutput, LedgerError> {
        let gas = self.pricing().gas_per_contract_step;
        let need = step.saturating_mul(gas);
        let have = self.escrow_of(purpose, caller);
        if have < need {
            return Err(LedgerError::GasAssertion { need, have });
        }

        let meta = self
            .get_item("edb/meta")
            .ok_or_else(|| LedgerError::MissingItem("edb/meta".into()))?;
        if meta.len() != 8 {
            return Err(LedgerError::MalformedItem("edb/meta".into()));
        }
        let block_size =
            u32::from_be_bytes(meta[4..8].try_into().expect("length checked")) as usize;
        let payload_len = block_size * ID_WIDTH;

        let mut out = BaselineSearchOutput::default();
        let mut counter = token.counter;
        for _ in 0..step {
            let label = prf_f(&token.k1, &counter.to_be_bytes()).expect("non-empty key");
            out.labels.push(label);
            let key = format!("edb/{}", hex::encode(label));
            self.charge_gas(caller, purpose, gas);
            self.log(caller, "contract_get", &key, 0);
            let Some(value) = self.get_item(&key).map(<[u8]>::to_vec) else {
                out.hit_end = true;
                break;
            };
            if value.len() <= payload_len {
                return Err(LedgerError::MalformedItem(key));
            }
            let (payload, nonce) = value.split_at(payload_len);
            match &token.k2 {
                Some(k2) => {
                    let block = unmask_row(k2, payload, nonce);
                    let mut packed = Vec::with_capacity(payload_len);
                    for id in &block {
                        packed.extend_from_slice(id.as_bytes());
                    }
                    // "Parse and save": recovered identifiers land in the
                    // public item store, which is exactly the leakage the
                    // masked mode avoids.
                    self.store_item(
                        caller,
                        &format!("result/{call_id}/{counter}"),
                        &packed,
                    )?;
                    out.revealed_blocks.push(block);
                }
                None => {
                    out.masked_rows.push((payload.to_vec(), nonce.to_vec()));
                }
            }
            out.rows_consumed += 1;
            counter += 1;
        }
        self.check_conservation()?;
        Ok(out)
    }

    fn charge_gas(&mut self, payer: &Party, purpose: &str, gas: u64) {
        self.escrow_pay(purpose, payer, &Party::operator(), gas);
        self.note_contract_steps(1);
    }

    /// Count contract work for a framework call and move its gas charge to
    /// the settlement (nothing is deducted here).
    pub fn contract_call(&mut self, caller: &Party, op: &str, key: &str) -> Receipt {
        self.note_contract_steps(1);
        self.log(caller, op, key, 0)
    }

    /// Apply a settlement exactly once per session.
    ///
    /// Type1 pays the server its fee out of the client's escrow and
    /// returns the server's whole deposit; Type2 hands the server's
    /// deposit to the client after deducting the execution charge and,
    /// when a dispute ran, the server's dispute share. The loser of a
    /// dispute forfeits its dispute share to the operator. Residual
    /// escrow always returns to its owner.
    pub fn settle(&mut self, action: &SettlementAction) -> Result<Vec<Transfer>, LedgerError> {
        let ctx = &action.ctx;
        if self.settled.contains_key(&ctx.session) {
            return Err(LedgerError::AlreadySettled(ctx.session.clone()));
        }
        let operator = Party::operator();
        let dispute_share = if ctx.disputed {
            self.pricing().dispute_deposit
        } else {
            0
        };
        let mut transfers = Vec::new();
        let mut pay = |ledger: &mut LedgerState, from: &Party, to: &Party, amount: u64, memo: &str| {
            let moved = ledger.escrow_pay(&ctx.session, from, to, amount);
            if moved > 0 {
                transfers.push(Transfer {
                    to: to.clone(),
                    amount: moved,
                    memo: memo.to_string(),
                });
            }
        };
        match action.kind {
            SettlementKind::Type1 => {
                pay(self, &ctx.client, &ctx.server, ctx.fee, "search fee");
                pay(self, &ctx.client, &operator, ctx.exec_cost, "execution");
                pay(self, &ctx.client, &operator, dispute_share, "dispute share");
                let rest = self.escrow_remaining(&ctx.session, &ctx.client);
                pay(self, &ctx.client, &ctx.client.clone(), rest, "deposit return");
                let server_all = self.escrow_remaining(&ctx.session, &ctx.server);
                pay(self, &ctx.server, &ctx.server.clone(), server_all, "deposit return");
            }
            SettlementKind::Type2 => {
                pay(self, &ctx.server, &operator, ctx.exec_cost, "execution");
                pay(self, &ctx.server, &operator, dispute_share, "dispute share");
                let forfeit = self.escrow_remaining(&ctx.session, &ctx.server);
                pay(self, &ctx.server, &ctx.client, forfeit, "server deposit to client");
                let rest = self.escrow_remaining(&ctx.session, &ctx.client);
                pay(self, &ctx.client, &ctx.client.clone(), rest, "deposit return");
            }
        }
        let kind_name = match action.kind {
            SettlementKind::Type1 => "type1",
            SettlementKind::Type2 => "type2",
        };
        self.note_contract_steps(1);
        self.log(
            &operator,
            "settle",
            &format!("{}/{kind_name}", ctx.session),
            transfers.iter().map(|t| t.amount).sum(),
        );
        self.settled.insert(ctx.session.clone(), action.kind);
        self.check_conservation()?;
        Ok(transfers)
    }

    pub fn settlement_of(&self, session: &str) -> Option<SettlementKind> {
        self.settled.get(session).copied()
    }

    /// Register the default action that fires if the session is still open
    /// at the given height. Later registrations supersede earlier ones for
    /// the same session.
    pub fn register_deadline(&mut self, at_height: u64, action: SettlementAction) {
        self.deadlines
            .retain(|d| d.action.ctx.session != action.ctx.session);
        self.deadlines.push(DeadlineEntry { at_height, action });
    }

    pub fn cancel_deadline(&mut self, session: &str) {
        self.deadlines.retain(|d| d.action.ctx.session != session);
    }

    /// Fire every registered default whose deadline has passed and whose
    /// session is still unsettled. Returns the triggered settlements.
    pub fn expire_deadlines(&mut self) -> Vec<(String, SettlementKind)> {
        let due: Vec<DeadlineEntry> = {
            let height = self.height();
            let (ready, keep): (Vec<_>, Vec<_>) = self
                .deadlines
                .drain(..)
                .partition(|d| d.at_height <= height);
            self.deadlines = keep;
            ready
        };
        let mut triggered = Vec::new();
        for entry in due {
            let session = entry.action.ctx.session.clone();
            if self.settled.contains_key(&session) {
                continue;
            }
            self.log(
                &Party::operator(),
                "deadline_expired",
                &session,
                0,
            );
            self.settle(&entry.action).expect("session checked unsettled");
            triggered.push((session, entry.action.kind));
        }
        triggered
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::pricing::{PricingConfig, SettlementContext};
    use crate::sse::{setup, Database, SearchPaging};
    use crate::{crypto::SecurityParam, sse::derive_trapdoor};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn pricing() -> PricingConfig {
        PricingConfig {
            search_fee: 10,
            gas_per_contract_step: 1,
            dispute_deposit: 2,
            punishment_amount: 20,
            deadline_blocks: 3,
        }
    }

    fn ctx(session: &str, fee: u64, exec: u64, disputed: bool) -> SettlementContext {
        SettlementContext {
            session: session.into(),
            client: Party::client(),
            server: Party::server(0),
            fee,
            exec_cost: exec,
            disputed,
        }
    }

    fn funded_ledger() -> LedgerState {
        let mut l = LedgerState::new(pricing(), 4).unwrap();
        l.register_party(&Party::client(), 1_000).unwrap();
        l.register_party(&Party::server(0), 1_000).unwrap();
        l
    }

    #[test]
    fn type1_pays_fee_plus_full_deposit_back() {
        let mut l = funded_ledger();
        l.deposit(&Party::client(), 15, "s").unwrap();
        l.deposit(&Party::server(0), 20, "s").unwrap();
        let before = l.balance(&Party::server(0));
        l.settle(&SettlementAction::type1(ctx("s", 10, 0, false)))
            .unwrap();
        assert_eq!(l.balance(&Party::server(0)) - before, 30);
        assert_eq!(l.escrow_total("s"), 0);
        assert_eq!(l.balance(&Party::client()), 1_000 - 10);
    }

    #[test]
    fn type2_deducts_execution_and_dispute_share() {
        let mut l = funded_ledger();
        l.deposit(&Party::server(0), 20, "s").unwrap();
        let before = l.balance(&Party::client());
        l.settle(&SettlementAction::type2(ctx("s", 10, 3, true)))
            .unwrap();
        assert_eq!(l.balance(&Party::client()) - before, 15);
        assert_eq!(l.balance(&Party::operator()), 5);
        assert_eq!(l.escrow_total("s"), 0);
    }

    #[test]
    fn double_settlement_is_rejected() {
        let mut l = funded_ledger();
        l.deposit(&Party::client(), 15, "s").unwrap();
        let action = SettlementAction::type1(ctx("s", 10, 0, false));
        l.settle(&action).unwrap();
        assert!(matches!(
            l.settle(&action),
            Err(LedgerError::AlreadySettled(_))
        ));
    }

    #[test]
    fn deadline_fires_default_action_once_due() {
        let mut l = funded_ledger();
        l.deposit(&Party::client(), 15, "s").unwrap();
        l.register_deadline(2, SettlementAction::type1(ctx("s", 10, 0, false)));
        assert!(l.expire_deadlines().is_empty(), "not due at height 0");
        l.advance_block();
        l.advance_block();
        let fired = l.expire_deadlines();
        assert_eq!(fired, vec![("s".to_string(), SettlementKind::Type1)]);
        assert_eq!(l.settlement_of("s"), Some(SettlementKind::Type1));
    }

    #[test]
    fn deadline_skips_settled_sessions() {
        let mut l = funded_ledger();
        l.deposit(&Party::server(0), 20, "s").unwrap();
        l.register_deadline(1, SettlementAction::type2(ctx("s", 10, 0, false)));
        l.settle(&SettlementAction::type1(ctx("s", 10, 0, false)))
            .unwrap();
        l.advance_block();
        assert!(l.expire_deadlines().is_empty());
        assert_eq!(l.settlement_of("s"), Some(SettlementKind::Type1));
    }

    fn chain_with_index() -> (LedgerState, BaselineToken) {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let mut db = Database::new();
        for i in 1..=5u8 {
            db.insert("w", crate::sse::FileId([i; 16]));
        }
        let (master, index) = setup(&db, SecurityParam::DEFAULT, 2, &mut rng).unwrap();
        let mut l = funded_ledger();
        store_edb_on_chain(&mut l, &Party::client(), &index).unwrap();
        let t = derive_trapdoor(&master, "w").unwrap();
        // Sanity: the plaintext search sees 3 blocks.
        assert_eq!(
            crate::sse::search_trace(&index, &t, SearchPaging::ample())
                .blocks
                .len(),
            3
        );
        let token = BaselineToken {
            k1: t.k1,
            k2: Some(t.k2),
            counter: 0,
        };
        (l, token)
    }

    #[test]
    fn baseline_search_stops_at_missing_label() {
        let (mut l, token) = chain_with_index();
        l.deposit(&Party::client(), 100, "q").unwrap();
        let out = l
            .baseline_contract_search(&Party::client(), "q", "q0", &token, 10)
            .unwrap();
        assert_eq!(out.rows_consumed, 3);
        assert!(out.hit_end);
        assert_eq!(out.revealed_blocks.len(), 3);
        // Gas: 4 iterations entered (3 hits + terminating miss).
        assert_eq!(l.balance(&Party::operator()), 4);
    }

    #[test]
    fn gas_assertion_blocks_underfunded_search() {
        let (mut l, token) = chain_with_index();
        l.deposit(&Party::client(), 5, "q").unwrap();
        let before = l.events().len();
        let err = l
            .baseline_contract_search(&Party::client(), "q", "q0", &token, 10)
            .unwrap_err();
        assert!(matches!(err, LedgerError::GasAssertion { need: 10, have: 5 }));
        assert_eq!(l.events().len(), before, "no state change");
    }

    #[test]
    fn masked_mode_unmasks_client_side_to_same_ids() {
        let (mut l, token) = chain_with_index();
        l.deposit(&Party::client(), 100, "q").unwrap();
        let revealed = l
            .baseline_contract_search(&Party::client(), "q", "q0", &token, 10)
            .unwrap();
        let masked_token = BaselineToken {
            k1: token.k1,
            k2: None,
            counter: 0,
        };
        let masked = l
            .baseline_contract_search(&Party::client(), "q", "q1", &masked_token, 10)
            .unwrap();
        let k2 = token.k2.unwrap();
        let unmasked: Vec<Vec<FileId>> = masked
            .masked_rows
            .iter()
            .map(|(payload, nonce)| unmask_row(&k2, payload, nonce))
            .collect();
        assert_eq!(unmasked, revealed.revealed_blocks);
        // Masked mode leaves no recovered identifiers in the store.
        assert!(l.items().all(|(k, _)| !k.starts_with("result/q1")));
        assert!(l.items().any(|(k, _)| k.starts_with("result/q0")));
    }
}
