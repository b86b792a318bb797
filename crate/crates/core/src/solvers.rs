//! Exact SSE and maximin computation.
//!
//! In coverage form every SSE subproblem ("make target `t` a best response
//! while covering it as much as possible") is one-dimensional: once `c_t` is
//! fixed, the attacker's value `v` at `t` is fixed and the cheapest way to
//! keep every other target at or below `v` is the closed-form minimal
//! coverage. The total coverage needed grows with `c_t`, so bisection on
//! `c_t` finds the optimum. Maximin is handled the same way by bisecting on
//! the guaranteed defender value.

use serde::Serialize;

use crate::game::{AttackerType, Coverage, GameInstance, COVERAGE_TOL};

/// Default bisection tolerance for both solvers.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_BISECTIONS: usize = 100;

/// A strong Stackelberg equilibrium on one attacker type.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SseResult {
    pub coverage: Coverage,
    pub target: usize,
    pub def_value: f64,
    pub atk_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximinResult {
    pub coverage: Coverage,
    pub value: f64,
    pub fully_mixed: bool,
}

/// Minimal coverage that keeps every target other than `target` at or below
/// attacker value `v`, written into `out`. Returns the coverage spent on
/// those other targets, or `None` when some target cannot be pushed down to
/// `v` even with full coverage.
fn minimal_cover(theta: &AttackerType, target: usize, v: f64, out: &mut [f64]) -> Option<f64> {
    let mut spent = 0.0;
    for (i, slot) in out.iter_mut().enumerate() {
        if i == target {
            continue;
        }
        if v < theta.penalties()[i] {
            return None;
        }
        let c = theta.coverage_for_value(v, i).clamp(0.0, 1.0);
        *slot = c;
        spent += c;
    }
    Some(spent)
}

/// Largest coverage of `target` for which `target` can still be made a best
/// response of `theta` within the budget, together with the cheapest such
/// coverage vector. `None` if `target` cannot be induced at all.
pub fn max_inducing_coverage(
    game: &GameInstance,
    theta: &AttackerType,
    target: usize,
    tol: f64,
) -> Option<Coverage> {
    let n = game.num_targets();
    let m = game.resources() as f64;
    let mut buf = vec![0.0; n];
    let feasible = |ct: f64, buf: &mut [f64]| -> bool {
        let v = theta.value_at(ct, target);
        match minimal_cover(theta, target, v, buf) {
            Some(spent) => ct + spent <= m,
            None => false,
        }
    };

    if !feasible(0.0, &mut buf) {
        return None;
    }
    let ct = if feasible(1.0, &mut buf) {
        1.0
    } else {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..MAX_BISECTIONS {
            if hi - lo <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if feasible(mid, &mut buf) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let v = theta.value_at(ct, target);
    minimal_cover(theta, target, v, &mut buf).expect("bisection keeps the lower end feasible");
    buf[target] = ct;
    Some(Coverage::new(buf))
}

/// Computes an SSE on `theta`: for each candidate target the largest
/// inducible coverage, then the candidate with the best defender value
/// (lowest index on ties).
pub fn solve_sse(game: &GameInstance, theta: &AttackerType, tol: f64) -> SseResult {
    let mut best: Option<SseResult> = None;
    for t in 0..game.num_targets() {
        let Some(coverage) = max_inducing_coverage(game, theta, t, tol) else {
            continue;
        };
        let def_value = game.value_at(coverage[t], t);
        if best.as_ref().is_none_or(|b| def_value > b.def_value) {
            let atk_value = theta.value_at(coverage[t], t);
            best = Some(SseResult {
                coverage,
                target: t,
                def_value,
                atk_value,
            });
        }
    }
    // the target with the largest attacker reward is always inducible at c = 0
    best.expect("some target is always inducible")
}

/// Coverage guaranteeing the defender at least `u` on every target with the
/// least total coverage.
pub fn maximin_coverage_at(game: &GameInstance, u: f64) -> Coverage {
    Coverage::new(
        (0..game.num_targets())
            .map(|i| game.coverage_for_value(u, i).clamp(0.0, 1.0))
            .collect(),
    )
}

/// Whether the defender can guarantee utility `u` on every target.
pub fn maximin_feasible(game: &GameInstance, u: f64) -> bool {
    let min_reward = game
        .def_rewards()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    u <= min_reward && maximin_coverage_at(game, u).total() <= game.resources() as f64
}

/// Maximin strategy by bisection on the guaranteed value over
/// `[min_i p_i^d, max_i r_i^d]`.
pub fn maximin(game: &GameInstance, tol: f64) -> MaximinResult {
    let lo = game
        .def_penalties()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let hi = game
        .def_rewards()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    maximin_bracketed(game, lo, hi, tol)
}

/// [`maximin`] with an explicit initial bracket. A bracket that does not
/// contain the optimum is widened to `[min_i p_i^d, max_i r_i^d]` on the
/// offending side.
pub fn maximin_bracketed(game: &GameInstance, lo: f64, hi: f64, tol: f64) -> MaximinResult {
    let floor = game
        .def_penalties()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    // n > m makes the largest reward infeasible
    let ceil = game
        .def_rewards()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let (mut lo, mut hi) = (lo, hi);
    if !maximin_feasible(game, lo) {
        (lo, hi) = (floor, lo);
    } else if maximin_feasible(game, hi) {
        (lo, hi) = (hi, ceil);
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if maximin_feasible(game, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let coverage = maximin_coverage_at(game, lo);
    let value = (0..game.num_targets())
        .map(|i| game.value_at(coverage[i], i))
        .fold(f64::INFINITY, f64::min);
    let fully_mixed = coverage
        .as_slice()
        .iter()
        .all(|&c| c > COVERAGE_TOL && c < 1.0 - COVERAGE_TOL);
    MaximinResult {
        coverage,
        value,
        fully_mixed,
    }
}
