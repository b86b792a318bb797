//! Quantal-response policy: play the SSE coverage of the reported type but
//! induce each of its best responses with softmax probability in the
//! defender's utility.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{best_responses, AttackerType, Coverage, GameInstance, TypeSet, DEFAULT_TIE_TOL};
use crate::policy::{check_nonnegative, eop_with, ReportTable, SseTable};
use crate::solvers::{solve_sse, DEFAULT_TOL};

/// Rationality levels used in the experiments.
pub const DEFAULT_PHIS: [f64; 3] = [10.0, 50.0, 100.0];

/// A coverage with a distribution over the reported type's best responses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StochasticOutcome {
    pub coverage: Coverage,
    pub support: Vec<usize>,
    pub probs: Vec<f64>,
}

impl StochasticOutcome {
    /// Softmax over `phi * u^d(c, j)` restricted to the best responses of
    /// `reported` at `coverage`.
    pub fn softmax(
        game: &GameInstance,
        reported: &AttackerType,
        coverage: Coverage,
        phi: f64,
    ) -> Self {
        let support = best_responses(reported, &coverage, DEFAULT_TIE_TOL);
        let scores: Vec<f64> = support
            .iter()
            .map(|&j| phi * game.value_at(coverage[j], j))
            .collect();
        let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = scores.iter().map(|s| (s - top).exp()).collect();
        let total: f64 = weights.iter().sum();
        let probs = weights.into_iter().map(|w| w / total).collect();
        Self {
            coverage,
            support,
            probs,
        }
    }

    pub fn expected_values(&self, game: &GameInstance, theta: &AttackerType) -> (f64, f64) {
        self.support
            .iter()
            .zip(&self.probs)
            .fold((0.0, 0.0), |(a, d), (&j, &p)| {
                let c = self.coverage[j];
                (a + p * theta.value_at(c, j), d + p * game.value_at(c, j))
            })
    }
}

/// One stochastic outcome per type, index-aligned with a [`TypeSet`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QrPolicy {
    pub outcomes: Vec<StochasticOutcome>,
}

impl QrPolicy {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Checks coverage bounds, that each support is the reported type's
    /// best-response set and that each distribution sums to one.
    pub fn validate(&self, game: &GameInstance, types: &TypeSet) -> Result<()> {
        if self.len() != types.len() {
            return Err(Error::PolicyLength {
                expected: types.len(),
                got: self.len(),
            });
        }
        for (j, (o, theta)) in self.outcomes.iter().zip(types).enumerate() {
            let fail = |msg: String| Error::InfeasibleOutcome { type_index: j, msg };
            o.coverage.validate(game).map_err(|e| fail(e.to_string()))?;
            if o.support != best_responses(theta, &o.coverage, DEFAULT_TIE_TOL) {
                return Err(fail(
                    "support differs from the reported type's best responses".into(),
                ));
            }
            if o.probs.len() != o.support.len() || o.probs.iter().any(|&p| p.is_nan() || p < 0.0) {
                return Err(fail(
                    "probabilities must be non-negative, one per support target".into(),
                ));
            }
            let total: f64 = o.probs.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(fail(format!("probabilities sum to {total}")));
            }
        }
        Ok(())
    }
}

impl ReportTable for QrPolicy {
    fn num_reports(&self) -> usize {
        self.outcomes.len()
    }

    fn report_values(
        &self,
        game: &GameInstance,
        theta: &AttackerType,
        report: usize,
    ) -> (f64, f64) {
        self.outcomes[report].expected_values(game, theta)
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if phi > 0.0 && phi.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "phi = {phi} must be positive"
        )))
    }
}

/// QR outcome for a single report.
pub fn qr_outcome(
    game: &GameInstance,
    reported: &AttackerType,
    phi: f64,
) -> Result<StochasticOutcome> {
    check_phi(phi)?;
    let sse = solve_sse(game, reported, DEFAULT_TOL);
    Ok(StochasticOutcome::softmax(
        game,
        reported,
        sse.coverage,
        phi,
    ))
}

/// QR policy over a whole type set.
pub fn qr_policy(game: &GameInstance, types: &TypeSet, phi: f64) -> Result<QrPolicy> {
    qr_policy_from(game, types, &SseTable::compute(game, types)?, phi)
}

pub fn qr_policy_from(
    game: &GameInstance,
    types: &TypeSet,
    sse: &SseTable,
    phi: f64,
) -> Result<QrPolicy> {
    check_phi(phi)?;
    Ok(QrPolicy {
        outcomes: types
            .iter()
            .zip(sse.iter())
            .map(|(theta, s)| StochasticOutcome::softmax(game, theta, s.coverage.clone(), phi))
            .collect(),
    })
}

/// Efficiency of the QR policy, with attackers and defender evaluating
/// expected utilities over the induced response distribution.
pub fn qr_eop(game: &GameInstance, types: &TypeSet, phi: f64) -> Result<super::EopReport> {
    check_nonnegative(game)?;
    let sse = SseTable::compute(game, types)?;
    let policy = qr_policy_from(game, types, &sse, phi)?;
    eop_with(&policy, game, types, &sse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::fixtures::two_type_instance;
    use crate::policy::{eop, sse_policy};

    #[test]
    fn example_softmax() {
        let (game, types) = two_type_instance();
        let o = qr_outcome(&game, &types[0], 1.0).unwrap();
        assert_eq!(o.support, vec![0, 1]);
        let expected_a = 1.0 / (1.0 + (-0.5f64).exp());
        assert!((o.probs[0] - expected_a).abs() < 1e-9);
        assert!((o.probs[0] - 0.622459).abs() < 1e-6);
        assert!((o.probs[1] - 0.377541).abs() < 1e-6);
    }

    #[test]
    fn singleton_support() {
        let game = GameInstance::new(1, vec![1.0, 1.0, 1.0], vec![0.0, 0.0, 0.0]).unwrap();
        let o = StochasticOutcome::softmax(
            &game,
            &AttackerType::new(vec![5.0, 1.0, 1.0], vec![0.0, 0.0, 0.0]).unwrap(),
            Coverage::new(vec![0.0, 0.0, 0.0]),
            10.0,
        );
        assert_eq!(o.support, vec![0]);
        assert_eq!(o.probs, vec![1.0]);
    }

    #[test]
    fn equal_defender_values_are_uniform() {
        let game = GameInstance::new(1, vec![1.0; 4], vec![0.0; 4]).unwrap();
        let theta = AttackerType::new(vec![1.0; 4], vec![0.0; 4]).unwrap();
        let o = qr_outcome(&game, &theta, 50.0).unwrap();
        assert_eq!(o.support.len(), 4);
        assert!(o.probs.iter().all(|&p| (p - 0.25).abs() < 1e-12));
    }

    #[test]
    fn large_phi_approaches_sse_policy() {
        let (game, types) = two_type_instance();
        let qr = qr_eop(&game, &types, 1e4).unwrap();
        let sse = eop(&sse_policy(&game, &types).unwrap(), &game, &types).unwrap();
        for (a, b) in qr.per_type.iter().zip(&sse.per_type) {
            assert!((a.eop - b.eop).abs() < 1e-3);
        }
        assert!((qr.overall - sse.overall).abs() < 1e-3);
    }

    #[test]
    fn tiny_phi_is_uniform() {
        let (game, types) = two_type_instance();
        let policy = qr_policy(&game, &types, 1e-9).unwrap();
        for o in &policy.outcomes {
            let k = o.support.len() as f64;
            assert!(o.probs.iter().all(|&p| (p - 1.0 / k).abs() < 1e-6));
        }
        policy.validate(&game, &types).unwrap();
    }

    #[test]
    fn rejects_non_positive_phi() {
        let (game, types) = two_type_instance();
        assert!(qr_outcome(&game, &types[0], 0.0).is_err());
        assert!(qr_eop(&game, &types, -1.0).is_err());
    }
}
