//! JSON file formats for instances and policies.
//!
//! Numbers are written in shortest round-trip form, so loading a saved file
//! reproduces every payoff and probability bit for bit. Targets are 1-based
//! in policy files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{best_responses, AttackerType, Coverage, GameInstance, TypeSet, DEFAULT_TIE_TOL};
use crate::gen::GenConfig;
use crate::policy::{Outcome, Policy, QrPolicy, StochasticOutcome};

/// A game together with its attacker type set, and the generator settings
/// when it was produced by [`crate::gen::generate_instance`].
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub game: GameInstance,
    pub types: TypeSet,
    pub meta: Option<GenConfig>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    m: usize,
    def_rewards: Vec<f64>,
    def_penalties: Vec<f64>,
    types: Vec<AttackerType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<GenConfig>,
}

impl Instance {
    pub fn new(game: GameInstance, types: TypeSet) -> Self {
        Self {
            game,
            types,
            meta: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        if file.def_rewards.len() != file.n || file.def_penalties.len() != file.n {
            return Err(Error::InvalidGame(format!(
                "n = {} but {} rewards and {} penalties were given",
                file.n,
                file.def_rewards.len(),
                file.def_penalties.len()
            )));
        }
        let game = GameInstance::new(file.m, file.def_rewards, file.def_penalties)?;
        // re-validates each type through the constructor
        let types = TypeSet::new(
            file.types
                .into_iter()
                .enumerate()
                .map(|(j, t)| {
                    AttackerType::new(t.rewards().to_vec(), t.penalties().to_vec()).map_err(|e| {
                        match e {
                            Error::InvalidType { msg, .. } => {
                                Error::InvalidType { type_index: j, msg }
                            }
                            other => other,
                        }
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        )?;
        types.check_against(&game)?;
        Ok(Self {
            game,
            types,
            meta: file.meta,
        })
    }

    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            n: self.game.num_targets(),
            m: self.game.resources(),
            def_rewards: self.game.def_rewards().to_vec(),
            def_penalties: self.game.def_penalties().to_vec(),
            types: self.types.as_slice().to_vec(),
            meta: self.meta.clone(),
        };
        serde_json::to_string_pretty(&file).expect("instance is always serializable")
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    Instance::from_json(&fs::read_to_string(path)?)
}

pub fn save_instance(path: impl AsRef<Path>, instance: &Instance) -> Result<()> {
    fs::write(path, instance.to_json() + "\n")?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct PolicyEntry {
    type_index: usize,
    coverage: Vec<f64>,
    target: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probs: Option<Vec<f64>>,
}

/// A policy read from a file: deterministic unless any entry carries `probs`.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedPolicy {
    Deterministic(Policy),
    Stochastic(QrPolicy),
}

pub fn policy_to_json(policy: &Policy) -> String {
    let entries: Vec<PolicyEntry> = policy
        .outcomes
        .iter()
        .enumerate()
        .map(|(j, o)| PolicyEntry {
            type_index: j,
            coverage: o.coverage.as_slice().to_vec(),
            target: o.target + 1,
            probs: None,
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("policy is always serializable")
}

/// Stochastic entries store `probs` over all targets (zero off the support)
/// and the most likely target as `target`.
pub fn qr_policy_to_json(policy: &QrPolicy) -> String {
    let entries: Vec<PolicyEntry> = policy
        .outcomes
        .iter()
        .enumerate()
        .map(|(j, o)| {
            let mut probs = vec![0.0; o.coverage.len()];
            for (&i, &p) in o.support.iter().zip(&o.probs) {
                probs[i] = p;
            }
            let mode = o
                .support
                .iter()
                .zip(&o.probs)
                .fold((o.support[0], f64::NEG_INFINITY), |best, (&i, &p)| {
                    if p > best.1 {
                        (i, p)
                    } else {
                        best
                    }
                })
                .0;
            PolicyEntry {
                type_index: j,
                coverage: o.coverage.as_slice().to_vec(),
                target: mode + 1,
                probs: Some(probs),
            }
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("policy is always serializable")
}

/// Parses and validates a policy file against `game` and `types`.
pub fn parse_policy(text: &str, game: &GameInstance, types: &TypeSet) -> Result<LoadedPolicy> {
    let mut entries: Vec<PolicyEntry> = serde_json::from_str(text)?;
    entries.sort_by_key(|e| e.type_index);
    if entries.len() != types.len() {
        return Err(Error::PolicyLength {
            expected: types.len(),
            got: entries.len(),
        });
    }
    for (j, e) in entries.iter().enumerate() {
        if e.type_index != j {
            return Err(Error::InfeasibleOutcome {
                type_index: e.type_index,
                msg: "type indices must cover 0..lambda exactly once".into(),
            });
        }
        if e.target == 0 || e.target > game.num_targets() {
            return Err(Error::InfeasibleOutcome {
                type_index: j,
                msg: format!("target {} outside 1..={}", e.target, game.num_targets()),
            });
        }
    }

    if entries.iter().any(|e| e.probs.is_some()) {
        let mut outcomes = Vec::with_capacity(entries.len());
        for (j, e) in entries.into_iter().enumerate() {
            let fail = |msg: String| Error::InfeasibleOutcome { type_index: j, msg };
            let probs = e
                .probs
                .ok_or_else(|| fail("missing probs in a stochastic policy".into()))?;
            if probs.len() != game.num_targets() {
                return Err(fail(format!(
                    "{} probabilities for {} targets",
                    probs.len(),
                    game.num_targets()
                )));
            }
            let coverage = Coverage::new(e.coverage);
            coverage
                .validate(game)
                .map_err(|err| fail(err.to_string()))?;
            let support = best_responses(&types[j], &coverage, DEFAULT_TIE_TOL);
            if let Some(i) = (0..probs.len()).find(|i| !support.contains(i) && probs[*i] != 0.0) {
                return Err(fail(format!(
                    "positive probability on target {}, not a best response",
                    i + 1
                )));
            }
            if !support.contains(&(e.target - 1)) {
                return Err(fail(format!("target {} is not a best response", e.target)));
            }
            let probs = support.iter().map(|&i| probs[i]).collect();
            outcomes.push(StochasticOutcome {
                coverage,
                support,
                probs,
            });
        }
        let policy = QrPolicy { outcomes };
        policy.validate(game, types)?;
        Ok(LoadedPolicy::Stochastic(policy))
    } else {
        let policy = Policy::new(
            entries
                .into_iter()
                .map(|e| Outcome {
                    coverage: Coverage::new(e.coverage),
                    target: e.target - 1,
                })
                .collect(),
        );
        policy.validate(game, types)?;
        Ok(LoadedPolicy::Deterministic(policy))
    }
}

pub fn load_policy(
    path: impl AsRef<Path>,
    game: &GameInstance,
    types: &TypeSet,
) -> Result<LoadedPolicy> {
    parse_policy(&fs::read_to_string(path)?, game, types)
}
