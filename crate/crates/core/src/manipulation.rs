//! The attacker's side: the best fake type to report against a defender who
//! learns and plays an SSE, and the best report against a committed policy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{
    best_responses, defender_favorable, zero_sum_type, AttackerType, GameInstance, TypeSet,
    DEFAULT_TIE_TOL,
};
use crate::policy::{Outcome, ReportTable};
use crate::solvers::{maximin, solve_sse, DEFAULT_TOL};

/// Attacker utilities closer than this are treated as tied when choosing a
/// report.
pub const REPORT_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManipulationReport {
    pub fake_type: AttackerType,
    pub induced: Outcome,
    /// The attacker's true utility in the induced outcome.
    pub atk_true_value: f64,
    pub truthful_atk_value: f64,
    pub truthful_def_value: f64,
    pub manip_def_value: f64,
}

impl ManipulationReport {
    /// Defender utility lost relative to a truthful attacker.
    pub fn defender_loss(&self) -> f64 {
        self.truthful_def_value - self.manip_def_value
    }
}

/// Optimal fake type against the SSE-playing defender.
///
/// The induced coverage is the defender's maximin coverage `z`; the attacker
/// hits his true best response `t` to `z`, and the fake type is the
/// zero-sum type with its reward on `t` lowered to `-min(p_t^d, u)` where
/// `u` is the maximin value.
pub fn optimal_report(game: &GameInstance, true_type: &AttackerType) -> ManipulationReport {
    let mm = maximin(game, DEFAULT_TOL);
    let z = mm.coverage;
    let target = defender_favorable(game, &z, best_responses(true_type, &z, DEFAULT_TIE_TOL))
        .expect("best-response sets are never empty");

    let rewards = (0..game.num_targets())
        .map(|i| {
            let p = game.def_penalties()[i];
            if i == target {
                -p.min(mm.value)
            } else {
                -p
            }
        })
        .collect();
    let penalties = game.def_rewards().iter().map(|r| -r).collect();
    let fake_type = AttackerType::new(rewards, penalties)
        .expect("r_i >= -p_i^d > -r_i^d = p_i for every target");

    let truthful = solve_sse(game, true_type, DEFAULT_TOL);
    let induced = Outcome {
        coverage: z,
        target,
    };
    ManipulationReport {
        atk_true_value: induced.attacker_value(true_type),
        manip_def_value: induced.defender_value(game),
        truthful_atk_value: truthful.atk_value,
        truthful_def_value: truthful.def_value,
        fake_type,
        induced,
    }
}

/// Reports the zero-sum type. Only valid when the maximin strategy is fully
/// mixed, where it is the unique SSE on that report.
pub fn report_zero_sum(
    game: &GameInstance,
    true_type: &AttackerType,
) -> Result<ManipulationReport> {
    let mm = maximin(game, DEFAULT_TOL);
    if !mm.fully_mixed {
        return Err(Error::NotFullyMixed);
    }
    let fake_type = zero_sum_type(game);
    let c = mm.coverage;
    let candidates = best_responses(&fake_type, &c, DEFAULT_TIE_TOL);
    let best = candidates
        .iter()
        .map(|&i| true_type.value_at(c[i], i))
        .fold(f64::NEG_INFINITY, f64::max);
    let target = defender_favorable(
        game,
        &c,
        candidates
            .into_iter()
            .filter(|&i| true_type.value_at(c[i], i) >= best - REPORT_TIE_TOL),
    )
    .expect("the maximizer is always a candidate");

    let truthful = solve_sse(game, true_type, DEFAULT_TOL);
    let induced = Outcome {
        coverage: c,
        target,
    };
    Ok(ManipulationReport {
        atk_true_value: induced.attacker_value(true_type),
        manip_def_value: induced.defender_value(game),
        truthful_atk_value: truthful.atk_value,
        truthful_def_value: truthful.def_value,
        fake_type,
        induced,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestReport {
    pub index: usize,
    pub atk_value: f64,
    pub def_value: f64,
}

/// Best report of `true_type` among the types of a committed policy: highest
/// attacker utility, then (within [`REPORT_TIE_TOL`]) highest defender
/// utility, then lowest index.
pub fn best_report_in_set<P: ReportTable + ?Sized>(
    policy: &P,
    game: &GameInstance,
    types: &TypeSet,
    true_type: &AttackerType,
) -> Result<BestReport> {
    let k = policy.num_reports();
    if k == 0 {
        return Err(Error::EmptyTypeSet);
    }
    if k != types.len() {
        return Err(Error::PolicyLength {
            expected: types.len(),
            got: k,
        });
    }
    let values: Vec<(f64, f64)> = (0..k)
        .map(|j| policy.report_values(game, true_type, j))
        .collect();
    let top = values.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
    let mut best: Option<BestReport> = None;
    for (index, &(atk_value, def_value)) in values.iter().enumerate() {
        if atk_value < top - REPORT_TIE_TOL {
            continue;
        }
        if best.is_none_or(|b| def_value > b.def_value) {
            best = Some(BestReport {
                index,
                atk_value,
                def_value,
            });
        }
    }
    Ok(best.expect("the maximizer passes the filter"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::*;
    use crate::game::Coverage;
    use crate::policy::fixtures::two_type_instance;
    use crate::policy::{sse_policy, Policy};

    #[test]
    fn example_manipulation() {
        let r = optimal_report(&example_game(), &example_type());
        assert_eq!(r.fake_type.rewards(), &[1.0, 1.0]);
        assert_eq!(r.fake_type.penalties(), &[0.0, 0.0]);
        assert!((r.induced.coverage[0] - 0.5).abs() < 1e-9);
        assert!((r.induced.coverage[1] - 0.5).abs() < 1e-9);
        assert_eq!(r.induced.target, 0);
        assert!((r.atk_true_value - 1.5).abs() < 1e-9);
        assert!((r.manip_def_value + 0.5).abs() < 1e-9);
        assert!((r.truthful_def_value + 0.25).abs() < 1e-9);
        assert!((r.defender_loss() - 0.25).abs() < 1e-9);
    }

    #[test]
    fn zero_sum_truth_gains_nothing() {
        let game =
            GameInstance::new(2, vec![1.0, 3.0, 2.0, 0.5], vec![-1.0, 0.0, -2.0, -0.5]).unwrap();
        let zs = zero_sum_type(&game);
        let r = optimal_report(&game, &zs);
        let mm = maximin(&game, DEFAULT_TOL);
        assert!((r.atk_true_value + mm.value).abs() < 1e-8);
        assert!((r.atk_true_value - r.truthful_atk_value).abs() < 1e-8);
    }

    #[test]
    fn zero_sum_report_on_example() {
        let r = report_zero_sum(&example_game(), &example_type()).unwrap();
        assert_eq!(r.induced.target, 0);
        assert!((r.induced.coverage[0] - 0.5).abs() < 1e-9);
        assert!((r.atk_true_value - 1.5).abs() < 1e-9);
    }

    #[test]
    fn symmetric_game_zero_sum_report() {
        let game = GameInstance::new(2, vec![1.0; 5], vec![-1.0; 5]).unwrap();
        let theta = AttackerType::new(vec![5.0, 4.0, 3.0, 2.0, 1.0], vec![0.0; 5]).unwrap();
        let r = report_zero_sum(&game, &theta).unwrap();
        assert!(r
            .induced
            .coverage
            .as_slice()
            .iter()
            .all(|&c| (c - 0.4).abs() < 1e-9));
        assert_eq!(r.induced.target, 0);
    }

    #[test]
    fn zero_sum_report_needs_fully_mixed_maximin() {
        let game = GameInstance::new(1, vec![1.0, 1.0, 0.4], vec![0.5, 0.5, -100.0]).unwrap();
        let theta = AttackerType::new(vec![1.0; 3], vec![0.0; 3]).unwrap();
        assert!(matches!(
            report_zero_sum(&game, &theta),
            Err(Error::NotFullyMixed)
        ));
    }

    #[test]
    fn best_report_against_sse_policy() {
        let (game, types) = two_type_instance();
        let policy = sse_policy(&game, &types).unwrap();
        let b = best_report_in_set(&policy, &game, &types, &types[0]).unwrap();
        assert_eq!(b.index, 1);
        assert!((b.def_value - 0.5).abs() < 1e-9);
        assert!((b.atk_value - 1.5).abs() < 1e-9);
    }

    #[test]
    fn singleton_and_constant_policies() {
        let (game, types) = two_type_instance();
        let single = TypeSet::new(vec![types[0].clone()]).unwrap();
        let p = sse_policy(&game, &single).unwrap();
        assert_eq!(
            best_report_in_set(&p, &game, &single, &types[1])
                .unwrap()
                .index,
            0
        );

        let same = Outcome {
            coverage: Coverage::new(vec![0.5, 0.5]),
            target: 0,
        };
        let constant = Policy::new(vec![same.clone(), same]);
        assert_eq!(
            best_report_in_set(&constant, &game, &types, &types[0])
                .unwrap()
                .index,
            0
        );
    }

    #[test]
    fn empty_policy_is_an_error() {
        let (game, types) = two_type_instance();
        let empty = Policy::new(vec![]);
        assert!(matches!(
            best_report_in_set(&empty, &game, &types, &types[0]),
            Err(Error::EmptyTypeSet)
        ));
    }
}
