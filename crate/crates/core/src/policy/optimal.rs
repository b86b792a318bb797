//! EoP-maximizing policy for a finite type set.
//!
//! The decision procedure processes types in order of decreasing SSE value.
//! Each type gets the SSE coverage of its own report, lowered where possible
//! to the smallest coverage `h` that (a) still guarantees the defender a
//! `xi` fraction of that type's SSE value and (b) leaves every earlier type
//! no better off reporting this type than reporting truthfully.

use crate::error::{Error, Result};
use crate::game::{
    best_responses, defender_favorable, Coverage, GameInstance, TypeSet, DEFAULT_TIE_TOL,
};
use crate::policy::{check_nonnegative, eop_with, Outcome, Policy, SseTable};

/// Slack on the `EoP >= xi` acceptance test.
pub const EOP_SLACK: f64 = 1e-9;

/// Default bisection width on `xi`.
pub const DEFAULT_DELTA: f64 = 1e-6;

/// Reusable solver: SSEs and the processing order are computed once and
/// shared across decision queries.
#[derive(Debug, Clone)]
pub struct OptimalPolicySolver<'a> {
    game: &'a GameInstance,
    types: &'a TypeSet,
    sse: SseTable,
    order: Vec<usize>,
}

impl<'a> OptimalPolicySolver<'a> {
    pub fn new(game: &'a GameInstance, types: &'a TypeSet) -> Result<Self> {
        check_nonnegative(game)?;
        let sse = SseTable::compute(game, types)?;
        Ok(Self::with_sse(game, types, sse))
    }

    /// Uses precomputed SSEs; `sse` must be index-aligned with `types`.
    pub fn with_sse(game: &'a GameInstance, types: &'a TypeSet, sse: SseTable) -> Self {
        let mut order: Vec<usize> = (0..types.len()).collect();
        // stable: equal SSE values keep their original order
        order.sort_by(|&a, &b| sse.get(b).def_value.total_cmp(&sse.get(a).def_value));
        Self {
            game,
            types,
            sse,
            order,
        }
    }

    pub fn sse(&self) -> &SseTable {
        &self.sse
    }

    /// Type indices in processing order (decreasing SSE value).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Returns a policy with EoP at least `xi`, or `None` if there is none.
    pub fn decide(&self, xi: f64) -> Result<Option<Policy>> {
        self.decide_observed(xi, |_, _| {})
    }

    /// [`decide`](Self::decide), calling `observer(step, partial)` after each
    /// type is assigned. `partial` is index-aligned with the type set and
    /// holds the outcomes assigned so far.
    pub fn decide_observed(
        &self,
        xi: f64,
        mut observer: impl FnMut(usize, &[Option<Outcome>]),
    ) -> Result<Option<Policy>> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::InvalidParameter(format!("xi = {xi} outside [0, 1]")));
        }
        let game = self.game;
        let n = game.num_targets();
        // running max over processed types of the coverage that pins their
        // truthful utility, merged with the 0 lower bound
        let mut pinned = vec![0.0f64; n];
        let mut partial: Vec<Option<Outcome>> = vec![None; self.types.len()];

        for (step, &j) in self.order.iter().enumerate() {
            let theta = &self.types[j];
            let sse = self.sse.get(j);
            let guarantee = xi * sse.def_value;
            let h: Vec<f64> = (0..n)
                .map(|i| pinned[i].max(game.coverage_for_value(guarantee, i)))
                .collect();
            let h_clamped = Coverage::new(h.iter().map(|x| x.clamp(0.0, 1.0)).collect());
            let z = Coverage::new((0..n).map(|i| sse.coverage[i].min(h[i])).collect());
            let candidates = best_responses(theta, &h_clamped, DEFAULT_TIE_TOL);
            let target = defender_favorable(game, &z, candidates)
                .expect("best-response sets are never empty");

            let truthful = theta.value_at(z[target], target);
            for (i, p) in pinned.iter_mut().enumerate() {
                *p = p.max(theta.coverage_for_value(truthful, i));
            }
            partial[j] = Some(Outcome {
                coverage: z,
                target,
            });
            observer(step, &partial);
        }

        let policy = Policy::new(
            partial
                .into_iter()
                .map(|o| o.expect("every type assigned"))
                .collect(),
        );
        if policy.validate(game, self.types).is_err() {
            return Ok(None);
        }
        let report = eop_with(&policy, game, self.types, &self.sse)?;
        Ok((report.overall >= xi - EOP_SLACK).then_some(policy))
    }

    /// Bisection on `xi` over `[0, 1]`. Returns the policy from the largest
    /// accepted probe and that probe's value.
    pub fn maximize(&self, delta: f64) -> Result<(Policy, f64)> {
        if delta.is_nan() || delta <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "delta = {delta} must be positive"
            )));
        }
        if let Some(policy) = self.decide(1.0)? {
            return Ok((policy, 1.0));
        }
        let mut best = self.decide(0.0)?.ok_or_else(|| {
            Error::InvalidParameter(
                "no feasible policy found at xi = 0; SSE values are inconsistent".into(),
            )
        })?;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > delta {
            let mid = 0.5 * (lo + hi);
            match self.decide(mid)? {
                Some(policy) => {
                    best = policy;
                    lo = mid;
                }
                None => hi = mid,
            }
        }
        Ok((best, lo))
    }
}

/// Decides whether some policy reaches EoP `xi`, returning one if so.
pub fn threshold_policy(game: &GameInstance, types: &TypeSet, xi: f64) -> Result<Option<Policy>> {
    OptimalPolicySolver::new(game, types)?.decide(xi)
}

/// EoP-maximizing policy up to `delta`, and the best accepted `xi`.
pub fn max_eop_policy(game: &GameInstance, types: &TypeSet, delta: f64) -> Result<(Policy, f64)> {
    OptimalPolicySolver::new(game, types)?.maximize(delta)
}
