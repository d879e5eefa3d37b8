//! Versioned scenario configuration and the adversary catalog.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::crypto::{ProofBackend, SecurityParam};
use crate::ledger::PricingConfig;

pub const CONFIG_SCHEMA: &str = "fairsse-scenario/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameworkKind {
    #[serde(rename = "baseline-onchain")]
    BaselineOnChain,
    #[serde(rename = "initial")]
    Initial,
    #[serde(rename = "improved")]
    Improved,
}

/// Every scripted deviation point the fairness analysis names. Each label
/// maps to exactly one deviation in the protocol flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryBehavior {
    HonestAll,
    ServerWrongIds,
    ServerStaleIndex,
    ServerSilent,
    ServerGarbageCiphertext,
    ClientFalseDispute,
    ClientBogusSignedTrapdoor,
    ClientWithholdValidation,
    InitialOneServerWrongCommit,
    InitialAllCollude,
}

impl AdversaryBehavior {
    pub const ALL: [AdversaryBehavior; 10] = [
        AdversaryBehavior::HonestAll,
        AdversaryBehavior::ServerWrongIds,
        AdversaryBehavior::ServerStaleIndex,
        AdversaryBehavior::ServerSilent,
        AdversaryBehavior::ServerGarbageCiphertext,
        AdversaryBehavior::ClientFalseDispute,
        AdversaryBehavior::ClientBogusSignedTrapdoor,
        AdversaryBehavior::ClientWithholdValidation,
        AdversaryBehavior::InitialOneServerWrongCommit,
        AdversaryBehavior::InitialAllCollude,
    ];

    pub fn applies_to(self, framework: FrameworkKind) -> bool {
        use AdversaryBehavior::*;
        match self {
            HonestAll => true,
            InitialOneServerWrongCommit | InitialAllCollude => {
                framework == FrameworkKind::Initial
            }
            _ => framework == FrameworkKind::Improved,
        }
    }
}

/// Where the plaintext database comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DatabaseSpec {
    /// Explicit keyword -> hex file-id lists.
    Inline {
        entries: BTreeMap<String, Vec<String>>,
    },
    /// Seed-derived random database.
    Generated {
        keywords: usize,
        max_ids_per_keyword: usize,
    },
    /// Ingest a directory of text files.
    Corpus { path: String },
}

fn default_block_size() -> usize {
    2
}
fn default_lambda_bits() -> u32 {
    256
}
fn default_miner_count() -> u64 {
    4
}
fn default_initial_balance() -> u64 {
    10_000
}
fn default_baseline_step() -> u64 {
    16
}
fn default_baseline_rounds() -> u64 {
    8
}
fn default_adversary() -> AdversaryBehavior {
    AdversaryBehavior::HonestAll
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub schema: String,
    pub framework: FrameworkKind,
    /// Mandatory: identical (config, seed) pairs replay byte-identically.
    pub seed: u64,
    pub database: DatabaseSpec,
    pub queries: Vec<String>,
    /// Server count; multi-server framework only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default = "default_block_size")]
    pub block_size: usize,
    #[serde(default = "default_lambda_bits")]
    pub lambda_bits: u32,
    #[serde(default)]
    pub pricing: PricingConfig,
    #[serde(default = "default_miner_count")]
    pub miner_count: u64,
    #[serde(default = "default_initial_balance")]
    pub initial_balance: u64,
    #[serde(default = "default_adversary")]
    pub adversary: AdversaryBehavior,
    /// Which replicas cheat under InitialOneServerWrongCommit.
    #[serde(default)]
    pub cheat_servers: Vec<usize>,
    /// Baseline only: hand K2 to the contract (true) or keep results
    /// masked on-chain (false).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reveal_k2: Option<bool>,
    #[serde(default)]
    pub proof_backend: ProofBackend,
    #[serde(default = "default_baseline_step")]
    pub baseline_step: u64,
    #[serde(default = "default_baseline_rounds")]
    pub baseline_rounds: u64,
}

impl ScenarioConfig {
    /// Minimal valid config for one framework; tests and callers adjust
    /// fields from here.
    pub fn new(framework: FrameworkKind, seed: u64, database: DatabaseSpec) -> Self {
        ScenarioConfig {
            schema: CONFIG_SCHEMA.to_string(),
            framework,
            seed,
            database,
            queries: Vec::new(),
            n: match framework {
                FrameworkKind::Initial => Some(3),
                _ => None,
            },
            block_size: default_block_size(),
            lambda_bits: default_lambda_bits(),
            pricing: PricingConfig::default(),
            miner_count: default_miner_count(),
            initial_balance: default_initial_balance(),
            adversary: AdversaryBehavior::HonestAll,
            cheat_servers: Vec::new(),
            reveal_k2: None,
            proof_backend: ProofBackend::default(),
            baseline_step: default_baseline_step(),
            baseline_rounds: default_baseline_rounds(),
        }
    }

    pub fn lambda(&self) -> Result<SecurityParam, ScenarioError> {
        SecurityParam::new(self.lambda_bits)
            .map_err(|e| ScenarioError::Config(e.to_string()))
    }

    /// Reject inconsistent configs before any execution.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |msg: String| Err(ScenarioError::Config(msg));
        if self.schema != CONFIG_SCHEMA {
            return fail(format!(
                "schema {:?} is not {CONFIG_SCHEMA:?}",
                self.schema
            ));
        }
        self.lambda()?;
        if self.block_size == 0 {
            return fail("block_size must be at least 1".into());
        }
        self.pricing
            .validate()
            .map_err(|e| ScenarioError::Config(e.to_string()))?;
        if !self.adversary.applies_to(self.framework) {
            return fail(format!(
                "adversary {:?} does not apply to framework {:?}",
                self.adversary, self.framework
            ));
        }
        match self.framework {
            FrameworkKind::Initial => {
                let Some(n) = self.n else {
                    return fail("multi-server framework requires n".into());
                };
                if n < 2 {
                    return fail(format!("n must be at least 2, got {n}"));
                }
                if let Some(&bad) = self.cheat_servers.iter().find(|&&i| i >= n) {
                    return fail(format!("cheat server index {bad} out of range for n={n}"));
                }
                if self.reveal_k2.is_some() {
                    return fail("reveal_k2 only applies to the baseline".into());
                }
            }
            FrameworkKind::Improved => {
                if self.n.is_some() {
                    return fail("n only applies to the multi-server framework".into());
                }
                if self.reveal_k2.is_some() {
                    return fail("reveal_k2 only applies to the baseline".into());
                }
            }
            FrameworkKind::BaselineOnChain => {
                if self.n.is_some() {
                    return fail("n only applies to the multi-server framework".into());
                }
                if self.baseline_step == 0 || self.baseline_rounds == 0 {
                    return fail("baseline paging must be positive".into());
                }
            }
        }
        if let DatabaseSpec::Generated {
            keywords,
            max_ids_per_keyword,
        } = &self.database
        {
            if *keywords == 0 || *max_ids_per_keyword == 0 {
                return fail("generated database must be non-empty".into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generated() -> DatabaseSpec {
        DatabaseSpec::Generated {
            keywords: 5,
            max_ids_per_keyword: 8,
        }
    }

    #[test]
    fn defaults_validate_for_every_framework() {
        for framework in [
            FrameworkKind::BaselineOnChain,
            FrameworkKind::Initial,
            FrameworkKind::Improved,
        ] {
            ScenarioConfig::new(framework, 1, generated())
                .validate()
                .unwrap();
        }
    }

    #[test]
    fn initial_requires_n_at_least_two() {
        let mut config = ScenarioConfig::new(FrameworkKind::Initial, 1, generated());
        config.n = Some(1);
        assert!(config.validate().is_err());
        config.n = None;
        assert!(config.validate().is_err());
    }

    #[test]
    fn adversaries_are_framework_scoped() {
        let mut config = ScenarioConfig::new(FrameworkKind::BaselineOnChain, 1, generated());
        config.adversary = AdversaryBehavior::ServerWrongIds;
        assert!(config.validate().is_err());

        let mut config = ScenarioConfig::new(FrameworkKind::Improved, 1, generated());
        config.adversary = AdversaryBehavior::InitialAllCollude;
        assert!(config.validate().is_err());
        config.adversary = AdversaryBehavior::ServerWrongIds;
        config.validate().unwrap();
    }

    #[test]
    fn reveal_k2_is_baseline_only() {
        let mut config = ScenarioConfig::new(FrameworkKind::Improved, 1, generated());
        config.reveal_k2 = Some(false);
        assert!(config.validate().is_err());

        let mut config = ScenarioConfig::new(FrameworkKind::BaselineOnChain, 1, generated());
        config.reveal_k2 = Some(false);
        config.validate().unwrap();
    }

    #[test]
    fn config_round_trips_through_json() {
        let mut config = ScenarioConfig::new(FrameworkKind::Initial, 7, generated());
        config.queries = vec!["apple".into(), "pear".into()];
        config.adversary = AdversaryBehavior::InitialAllCollude;
        let text = serde_json::to_string_pretty(&config).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, config);
    }
}
