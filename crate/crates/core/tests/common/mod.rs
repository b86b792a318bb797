//! Independent oracles and random samplers shared by the integration suites.
//! Utilities here are recomputed from raw payoff arrays rather than through
//! the library's own helpers.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ssgmanip::gen::{generate_instance, GenConfig};
use ssgmanip::policy::{Outcome, Policy};
use ssgmanip::{AttackerType, Coverage, GameInstance, TypeSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Defender utility straight from the payoff arrays.
pub fn def_u(game: &GameInstance, c: &[f64], i: usize) -> f64 {
    c[i] * game.def_rewards()[i] + (1.0 - c[i]) * game.def_penalties()[i]
}

pub fn atk_u(theta: &AttackerType, c: &[f64], i: usize) -> f64 {
    (1.0 - c[i]) * theta.rewards()[i] + c[i] * theta.penalties()[i]
}

/// Attacker best responses at tolerance `tol`, defender-favorable target.
pub fn oracle_response(
    game: &GameInstance,
    theta: &AttackerType,
    c: &[f64],
    tol: f64,
) -> (usize, f64, f64) {
    let n = c.len();
    let top = (0..n)
        .map(|i| atk_u(theta, c, i))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut best = (usize::MAX, f64::NEG_INFINITY, top);
    for i in 0..n {
        if atk_u(theta, c, i) >= top - tol && def_u(game, c, i) > best.1 {
            best = (i, def_u(game, c, i), top);
        }
    }
    best
}

/// Payoffs drawn independently of the library generator: rewards in
/// `(0, 1]`, penalties in `[-1, 0)`.
pub fn random_game(rng: &mut ChaCha8Rng, n: usize, m: usize) -> GameInstance {
    let r = (0..n).map(|_| 1.0 - rng.gen::<f64>()).collect();
    let p = (0..n).map(|_| -(1.0 - rng.gen::<f64>())).collect();
    GameInstance::new(m, r, p).unwrap()
}

pub fn random_type(rng: &mut ChaCha8Rng, n: usize) -> AttackerType {
    let r = (0..n).map(|_| 1.0 - rng.gen::<f64>()).collect();
    let p = (0..n).map(|_| -(1.0 - rng.gen::<f64>())).collect();
    AttackerType::new(r, p).unwrap()
}

/// Non-negative instance from the library generator with random settings.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    n_max: usize,
    lambda_max: usize,
) -> (GameInstance, TypeSet) {
    let n = rng.gen_range(2..=n_max);
    let m = rng.gen_range(1..n);
    let lambda = rng.gen_range(1..=lambda_max);
    let mut cfg = GenConfig::new(n, m, lambda, rng.gen::<f64>(), rng.gen());
    cfg.include_zero_sum = rng.gen_bool(0.7);
    generate_instance(&cfg).unwrap()
}

/// Random point of `C = {0 <= c <= 1, sum c <= m}`; about half the draws use
/// the whole budget.
pub fn random_coverage(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<f64> {
    let mut c: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let total: f64 = c.iter().sum();
    let m = m as f64;
    if total > m || rng.gen_bool(0.5) {
        // push toward the budget face while staying in the box
        let mut budget = m.min(n as f64);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        let scale = (m / total).min(1.0);
        for x in c.iter_mut() {
            *x *= scale;
        }
        budget -= c.iter().sum::<f64>();
        for i in idx {
            let add = (1.0 - c[i]).min(budget.max(0.0));
            c[i] += add;
            budget -= add;
        }
    }
    for x in c.iter_mut() {
        *x = x.clamp(0.0, 1.0);
    }
    c
}

/// Random feasible deterministic policy: random coverage per report and a
/// random best response of the reported type.
pub fn random_policy(rng: &mut ChaCha8Rng, game: &GameInstance, types: &TypeSet) -> Policy {
    let n = game.num_targets();
    Policy::new(
        types
            .iter()
            .map(|theta| {
                let c = random_coverage(rng, n, game.resources());
                let top = (0..n)
                    .map(|i| atk_u(theta, &c, i))
                    .fold(f64::NEG_INFINITY, f64::max);
                let br: Vec<usize> = (0..n)
                    .filter(|&i| atk_u(theta, &c, i) >= top - 1e-12)
                    .collect();
                let target = *br.choose(rng).unwrap();
                Outcome {
                    coverage: Coverage::new(c),
                    target,
                }
            })
            .collect(),
    )
}

/// Deterministic-policy EoP recomputed from scratch: each true type picks the
/// report maximizing its utility, ties to the defender.
pub fn oracle_eop(
    policy: &Policy,
    game: &GameInstance,
    types: &TypeSet,
    sse_values: &[f64],
) -> f64 {
    types
        .iter()
        .zip(sse_values)
        .map(|(theta, &u_hat)| {
            let vals: Vec<(f64, f64)> = policy
                .outcomes
                .iter()
                .map(|o| {
                    (
                        atk_u(theta, o.coverage.as_slice(), o.target),
                        def_u(game, o.coverage.as_slice(), o.target),
                    )
                })
                .collect();
            let top = vals.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
            let d = vals
                .iter()
                .filter(|v| v.0 >= top - 1e-9)
                .map(|v| v.1)
                .fold(f64::NEG_INFINITY, f64::max);
            d / u_hat
        })
        .fold(f64::INFINITY, f64::min)
}

/// Best defender SSE value by enumerating coverages on a grid of width
/// `step` along the budget face. Supports n = 2 and n = 3 with m = 1.
pub fn grid_sse_value(game: &GameInstance, theta: &AttackerType, step: f64) -> f64 {
    let n = game.num_targets();
    assert_eq!(game.resources(), 1);
    let k = (1.0 / step).round() as usize;
    let mut best = f64::NEG_INFINITY;
    let mut visit = |c: &[f64]| {
        let (_, d, _) = oracle_response(game, theta, c, 1e-12);
        if d > best {
            best = d;
        }
    };
    match n {
        2 => {
            for a in 0..=k {
                let x = a as f64 * step;
                visit(&[x, 1.0 - x]);
            }
        }
        3 => {
            for a in 0..=k {
                for b in 0..=(k - a) {
                    let x = a as f64 * step;
                    let y = b as f64 * step;
                    visit(&[x, y, (1.0 - x - y).max(0.0)]);
                }
            }
        }
        _ => panic!("grid oracle supports n = 2 or 3"),
    }
    best
}

/// Maximin value for two targets on a fine grid over `c_A + c_B = 1`.
pub fn grid_maximin_two(game: &GameInstance, step: f64) -> f64 {
    let k = (1.0 / step).round() as usize;
    (0..=k)
        .map(|a| {
            let x = a as f64 * step;
            let c = [x, 1.0 - x];
            def_u(game, &c, 0).min(def_u(game, &c, 1))
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Alternative fake types: uniform draws, small and large perturbations of
/// `anchor`, and the zero-sum type of `game` with one reward lowered.
pub fn sample_fake_type(
    rng: &mut ChaCha8Rng,
    game: &GameInstance,
    anchor: &AttackerType,
) -> AttackerType {
    let n = game.num_targets();
    match rng.gen_range(0..4) {
        0 => {
            let r: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let p = r.iter().map(|&x| x - rng.gen_range(1e-3..2.0)).collect();
            AttackerType::new(r, p).unwrap()
        }
        1 | 2 => {
            let scale = if rng.gen_bool(0.5) { 1e-3 } else { 0.3 };
            let r: Vec<f64> = anchor
                .rewards()
                .iter()
                .map(|&x| x + scale * rng.gen_range(-1.0..1.0))
                .collect();
            let p = anchor
                .penalties()
                .iter()
                .zip(&r)
                .map(|(&x, &ri)| (x + scale * rng.gen_range(-1.0..1.0)).min(ri - 1e-6))
                .collect();
            AttackerType::new(r, p).unwrap()
        }
        _ => {
            let mut r: Vec<f64> = game.def_penalties().iter().map(|p| -p).collect();
            let p: Vec<f64> = game.def_rewards().iter().map(|x| -x).collect();
            let t = rng.gen_range(0..n);
            r[t] = p[t] + rng.gen::<f64>() * (r[t] - p[t]) + 1e-9;
            AttackerType::new(r, p).unwrap()
        }
    }
}

/// True-type utility of the best SSE outcome on a reported type: among
/// targets that are best responses of `reported` at `c` and give the
/// defender `def_value`, the one `truth` likes most.
pub fn best_sse_target_value(
    game: &GameInstance,
    reported: &AttackerType,
    truth: &AttackerType,
    c: &[f64],
    def_value: f64,
) -> f64 {
    let n = c.len();
    let top = (0..n)
        .map(|i| atk_u(reported, c, i))
        .fold(f64::NEG_INFINITY, f64::max);
    (0..n)
        .filter(|&i| atk_u(reported, c, i) >= top - 1e-9 && def_u(game, c, i) >= def_value - 1e-9)
        .map(|i| atk_u(truth, c, i))
        .fold(f64::NEG_INFINITY, f64::max)
}
