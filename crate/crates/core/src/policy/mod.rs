//! Defender policies over a finite type set and their evaluation.
//!
//! A policy maps each reportable type to an outcome. The attacker, knowing
//! the policy, reports whichever type serves his true payoffs best; the
//! efficiency of a policy compares what the defender then gets against what
//! she would get if every type reported truthfully.

mod optimal;
mod qr;

pub use optimal::{
    max_eop_policy, threshold_policy, OptimalPolicySolver, DEFAULT_DELTA, EOP_SLACK,
};
pub use qr::{
    qr_eop, qr_outcome, qr_policy, qr_policy_from, QrPolicy, StochasticOutcome, DEFAULT_PHIS,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{
    is_best_response, AttackerType, Coverage, GameInstance, TypeSet, DEFAULT_TIE_TOL,
};
use crate::manipulation::best_report_in_set;
use crate::solvers::{solve_sse, SseResult, DEFAULT_TOL};

/// Smallest SSE value accepted as the denominator of an efficiency ratio.
pub const MIN_SSE_VALUE: f64 = 1e-9;

/// A defender commitment together with the attacker response it induces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub coverage: Coverage,
    pub target: usize,
}

impl Outcome {
    pub fn attacker_value(&self, theta: &AttackerType) -> f64 {
        theta.value_at(self.coverage[self.target], self.target)
    }

    pub fn defender_value(&self, game: &GameInstance) -> f64 {
        game.value_at(self.coverage[self.target], self.target)
    }
}

impl From<SseResult> for Outcome {
    fn from(sse: SseResult) -> Self {
        Outcome {
            coverage: sse.coverage,
            target: sse.target,
        }
    }
}

/// Anything that prescribes an (expected) outcome for every report index.
pub trait ReportTable {
    fn num_reports(&self) -> usize;

    /// Expected attacker utility under `theta` and expected defender
    /// utility when `report` is the reported type.
    fn report_values(&self, game: &GameInstance, theta: &AttackerType, report: usize)
        -> (f64, f64);
}

/// Deterministic policy: one outcome per type, index-aligned with a [`TypeSet`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Policy {
    pub outcomes: Vec<Outcome>,
}

impl Policy {
    pub fn new(outcomes: Vec<Outcome>) -> Self {
        Self { outcomes }
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Checks coverage bounds and that every prescribed target is a best
    /// response of the type that reported it.
    pub fn validate(&self, game: &GameInstance, types: &TypeSet) -> Result<()> {
        if self.len() != types.len() {
            return Err(Error::PolicyLength {
                expected: types.len(),
                got: self.len(),
            });
        }
        for (j, (outcome, theta)) in self.outcomes.iter().zip(types).enumerate() {
            outcome
                .coverage
                .validate(game)
                .map_err(|e| Error::InfeasibleOutcome {
                    type_index: j,
                    msg: e.to_string(),
                })?;
            if !is_best_response(theta, &outcome.coverage, outcome.target, DEFAULT_TIE_TOL) {
                return Err(Error::InfeasibleOutcome {
                    type_index: j,
                    msg: format!(
                        "target {} is not a best response of the reported type",
                        outcome.target + 1
                    ),
                });
            }
        }
        Ok(())
    }
}

impl ReportTable for Policy {
    fn num_reports(&self) -> usize {
        self.outcomes.len()
    }

    fn report_values(
        &self,
        game: &GameInstance,
        theta: &AttackerType,
        report: usize,
    ) -> (f64, f64) {
        let o = &self.outcomes[report];
        (o.attacker_value(theta), o.defender_value(game))
    }
}

/// SSE of every type in a type set, index-aligned with it.
#[derive(Debug, Clone, PartialEq)]
pub struct SseTable {
    results: Vec<SseResult>,
}

impl SseTable {
    pub fn compute(game: &GameInstance, types: &TypeSet) -> Result<Self> {
        types.check_against(game)?;
        let results = types
            .as_slice()
            .par_iter()
            .map(|theta| solve_sse(game, theta, DEFAULT_TOL))
            .collect();
        Ok(Self { results })
    }

    pub fn len(&self) -> usize {
        self.results.len()
    }

    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }

    pub fn get(&self, j: usize) -> &SseResult {
        &self.results[j]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SseResult> {
        self.results.iter()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.results.iter().map(|r| r.def_value)
    }
}

/// Efficiency of a policy on one true type.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeEop {
    pub eop: f64,
    pub best_report: usize,
    pub def_value: f64,
    pub sse_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EopReport {
    pub overall: f64,
    pub per_type: Vec<TypeEop>,
}

/// The naive policy: every report is answered with an SSE on that report.
pub fn sse_policy(game: &GameInstance, types: &TypeSet) -> Result<Policy> {
    Ok(sse_policy_from(&SseTable::compute(game, types)?))
}

pub fn sse_policy_from(sse: &SseTable) -> Policy {
    Policy::new(sse.iter().cloned().map(Outcome::from).collect())
}

/// Efficiency of a deterministic policy. Requires non-negative defender
/// payoffs and a feasible policy.
pub fn eop(policy: &Policy, game: &GameInstance, types: &TypeSet) -> Result<EopReport> {
    check_nonnegative(game)?;
    policy.validate(game, types)?;
    let sse = SseTable::compute(game, types)?;
    eop_with(policy, game, types, &sse)
}

/// Efficiency of any report table given precomputed SSE values. Feasibility
/// of the table is the caller's responsibility.
pub fn eop_with<P: ReportTable + ?Sized>(
    policy: &P,
    game: &GameInstance,
    types: &TypeSet,
    sse: &SseTable,
) -> Result<EopReport> {
    check_nonnegative(game)?;
    if policy.num_reports() != types.len() {
        return Err(Error::PolicyLength {
            expected: types.len(),
            got: policy.num_reports(),
        });
    }
    let mut per_type = Vec::with_capacity(types.len());
    for (j, theta) in types.iter().enumerate() {
        let sse_value = sse.get(j).def_value;
        if sse_value <= MIN_SSE_VALUE {
            return Err(Error::DegenerateSseValue {
                type_index: j,
                value: sse_value,
            });
        }
        let best = best_report_in_set(policy, game, types, theta)?;
        per_type.push(TypeEop {
            eop: best.def_value / sse_value,
            best_report: best.index,
            def_value: best.def_value,
            sse_value,
        });
    }
    let overall = per_type.iter().map(|t| t.eop).fold(f64::INFINITY, f64::min);
    Ok(EopReport { overall, per_type })
}

pub(crate) fn check_nonnegative(game: &GameInstance) -> Result<()> {
    match game.def_penalties().iter().position(|&p| p < 0.0) {
        Some(target) => Err(Error::NegativePayoffs {
            target,
            value: game.def_penalties()[target],
        }),
        None => Ok(()),
    }
}
