//! Leakage analysis over execution traces: search-pattern equality
//! partitions and access-pattern size profiles.
//!
//! The analyzer consumes observer views. The ledger-only view is what any
//! chain reader sees (on-chain lookups only); the server view adds the
//! label accesses the storing server observed. A trapdoor scheme that is
//! deterministic per keyword makes repeated queries observable: two
//! queries hit the same first label iff they target the same keyword, and
//! block counts order the posting-list sizes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const TRACE_SCHEMA: &str = "fairsse-trace/1";

/// Actor name for on-chain lookups.
pub const ACTOR_LEDGER: &str = "ledger";

/// One index lookup as an observer saw it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LookupRecord {
    /// "ledger" for on-chain lookups, otherwise the server's party name.
    pub actor: String,
    /// Hex of the looked-up label.
    pub label: String,
    pub hit: bool,
}

/// Everything observable about one query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub query_index: usize,
    pub session_id: String,
    pub lookups: Vec<LookupRecord>,
}

/// The raw observable record of a whole run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub schema: String,
    pub block_size: usize,
    pub queries: Vec<QueryRecord>,
}

impl ExecutionTrace {
    pub fn new(block_size: usize) -> Self {
        ExecutionTrace {
            schema: TRACE_SCHEMA.to_string(),
            block_size,
            queries: Vec::new(),
        }
    }

    fn query_mut(&mut self, query_index: usize, session_id: &str) -> &mut QueryRecord {
        if let Some(pos) = self
            .queries
            .iter()
            .position(|q| q.query_index == query_index)
        {
            return &mut self.queries[pos];
        }
        self.queries.push(QueryRecord {
            query_index,
            session_id: session_id.to_string(),
            lookups: Vec::new(),
        });
        self.queries.last_mut().expect("just pushed")
    }

    pub fn record_lookups<'a>(
        &mut self,
        query_index: usize,
        session_id: &str,
        actor: &str,
        labels: impl IntoIterator<Item = (&'a [u8; 32], bool)>,
    ) {
        let record = self.query_mut(query_index, session_id);
        for (label, hit) in labels {
            record.lookups.push(LookupRecord {
                actor: actor.to_string(),
                label: hex::encode(label),
                hit,
            });
        }
    }

    /// Ensure a query appears in the trace even if nothing was observed.
    pub fn touch_query(&mut self, query_index: usize, session_id: &str) {
        self.query_mut(query_index, session_id);
    }
}

/// Which observer's lookups to keep when deriving a [`QueryTrace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObserverView {
    /// Any chain reader: only on-chain lookups are visible. Models the
    /// permissionless amplification of on-chain leakage.
    LedgerOnly,
    /// The storing server: label accesses against its own index.
    ServerView,
}

/// The per-query observables the leakage statistics run on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryObservation {
    pub query_index: usize,
    /// Exact on-index lookups, hex labels in access order.
    pub labels: Vec<String>,
    /// Rows actually consumed (hits).
    pub row_count: usize,
    /// Result blocks returned; one per consumed row.
    pub block_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryTrace {
    pub queries: Vec<QueryObservation>,
}

/// Project an execution trace onto one observer's view.
pub fn extract_query_trace(trace: &ExecutionTrace, view: ObserverView) -> QueryTrace {
    let queries = trace
        .queries
        .iter()
        .map(|q| {
            let filtered: Vec<&LookupRecord> = q
                .lookups
                .iter()
                .filter(|l| match view {
                    ObserverView::LedgerOnly => l.actor == ACTOR_LEDGER,
                    ObserverView::ServerView => l.actor != ACTOR_LEDGER,
                })
                .collect();
            let hits = filtered.iter().filter(|l| l.hit).count();
            QueryObservation {
                query_index: q.query_index,
                labels: filtered.iter().map(|l| l.label.clone()).collect(),
                row_count: hits,
                block_count: hits,
            }
        })
        .collect();
    QueryTrace { queries }
}

/// Partition query indexes into equality classes: two queries share a
/// class iff their first-lookup labels are byte-equal. Queries that
/// produced no observable lookups are omitted; they leak nothing to this
/// observer.
pub fn search_pattern_partition(trace: &QueryTrace) -> Vec<Vec<usize>> {
    let mut classes: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for q in &trace.queries {
        if let Some(first) = q.labels.first() {
            classes.entry(first).or_default().push(q.query_index);
        }
    }
    let mut partition: Vec<Vec<usize>> = classes.into_values().collect();
    partition.sort_by_key(|class| class[0]);
    partition
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuerySize {
    pub query_index: usize,
    pub blocks: usize,
    /// blocks * p payload entries; padding keeps this a multiple of p.
    pub entries: usize,
}

/// Observable result sizes plus the pairwise order relation they reveal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessProfile {
    pub per_query: Vec<QuerySize>,
    /// order[i][j] = sign(entries_i - entries_j) over observed queries.
    pub order: Vec<Vec<i8>>,
}

pub fn access_pattern_profile(trace: &QueryTrace, block_size: usize) -> AccessProfile {
    let per_query: Vec<QuerySize> = trace
        .queries
        .iter()
        .map(|q| QuerySize {
            query_index: q.query_index,
            blocks: q.block_count,
            entries: q.block_count * block_size,
        })
        .collect();
    let order = per_query
        .iter()
        .map(|a| {
            per_query
                .iter()
                .map(|b| (a.entries as i64 - b.entries as i64).signum() as i8)
                .collect()
        })
        .collect();
    AccessProfile { per_query, order }
}

/// The emitted JSON report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub view: ObserverView,
    pub partition: Vec<Vec<usize>>,
    pub profile: AccessProfile,
}

pub fn analyze(trace: &ExecutionTrace, view: ObserverView) -> LeakageReport {
    let qt = extract_query_trace(trace, view);
    LeakageReport {
        view,
        partition: search_pattern_partition(&qt),
        profile: access_pattern_profile(&qt, trace.block_size),
    }
}
