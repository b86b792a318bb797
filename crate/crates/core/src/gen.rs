//! Random instances from the covariance model: attacker payoffs are drawn
//! uniformly and then pulled toward the zero-sum type by a factor `rho`.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{shift_nonnegative, zero_sum_type, AttackerType, GameInstance, TypeSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n: usize,
    pub m: usize,
    pub lambda: usize,
    pub rho: f64,
    pub seed: u64,
    #[serde(default = "default_true")]
    pub include_zero_sum: bool,
    #[serde(default)]
    pub payoff_low: f64,
    #[serde(default = "default_high")]
    pub payoff_high: f64,
}

fn default_true() -> bool {
    true
}

fn default_high() -> f64 {
    1.0
}

impl GenConfig {
    pub fn new(n: usize, m: usize, lambda: usize, rho: f64, seed: u64) -> Self {
        Self {
            n,
            m,
            lambda,
            rho,
            seed,
            include_zero_sum: true,
            payoff_low: 0.0,
            payoff_high: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.m < 1 || self.n <= self.m {
            return bad(format!("need n > m >= 1 (n = {}, m = {})", self.n, self.m));
        }
        if self.lambda < 1 {
            return bad("lambda must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return bad(format!("rho = {} outside [0, 1]", self.rho));
        }
        if !(self.payoff_low >= 0.0
            && self.payoff_high > self.payoff_low
            && self.payoff_high.is_finite())
        {
            return bad(format!(
                "need payoff_high > payoff_low >= 0 (got {} and {})",
                self.payoff_low, self.payoff_high
            ));
        }
        Ok(())
    }
}

/// Seed for instance `stream` of a batch rooted at `master_seed`. Streams are
/// independent ChaCha substreams, so batch order does not matter.
pub fn substream_seed(master_seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng.next_u64()
}

struct Sampler<'a> {
    rng: ChaCha8Rng,
    cfg: &'a GenConfig,
}

impl Sampler<'_> {
    /// Uniform on `(low, high]`.
    fn reward(&mut self) -> f64 {
        let (lo, hi) = (self.cfg.payoff_low, self.cfg.payoff_high);
        hi - self.rng.gen::<f64>() * (hi - lo)
    }

    /// Uniform on `[-high, -low)`.
    fn penalty(&mut self) -> f64 {
        -self.reward()
    }
}

/// Draws a game and `lambda` attacker types (plus the zero-sum type when
/// configured). The returned game has its defender payoffs shifted to be
/// non-negative; the blend anchor is the zero-sum type of the unshifted game.
pub fn generate_instance(cfg: &GenConfig) -> Result<(GameInstance, TypeSet)> {
    cfg.validate()?;
    let mut s = Sampler {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        cfg,
    };
    let n = cfg.n;
    let def_rewards: Vec<f64> = (0..n).map(|_| s.reward()).collect();
    let def_penalties: Vec<f64> = (0..n).map(|_| s.penalty()).collect();
    let raw_game = GameInstance::new(cfg.m, def_rewards, def_penalties)?;
    let anchor = zero_sum_type(&raw_game);

    let rho = cfg.rho;
    let blend = |x: f64, y: f64| (1.0 - rho) * x + rho * y;
    let mut types = Vec::with_capacity(cfg.lambda + 1);
    for _ in 0..cfg.lambda {
        let rewards: Vec<f64> = (0..n).map(|_| s.reward()).collect();
        let penalties: Vec<f64> = (0..n).map(|_| s.penalty()).collect();
        types.push(AttackerType::new(
            rewards
                .iter()
                .zip(anchor.rewards())
                .map(|(&x, &y)| blend(x, y))
                .collect(),
            penalties
                .iter()
                .zip(anchor.penalties())
                .map(|(&x, &y)| blend(x, y))
                .collect(),
        )?);
    }
    if cfg.include_zero_sum {
        types.push(anchor);
    }
    let (game, _) = shift_nonnegative(&raw_game);
    Ok((game, TypeSet::new(types)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::SseTable;

    #[test]
    fn rho_one_gives_zero_sum_types() {
        let mut cfg = GenConfig::new(6, 2, 5, 1.0, 11);
        cfg.include_zero_sum = true;
        let (_, types) = generate_instance(&cfg).unwrap();
        let zs = types[types.len() - 1].clone();
        assert!(types.iter().all(|t| *t == zs));
    }

    #[test]
    fn rho_zero_keeps_raw_draws() {
        let cfg = GenConfig::new(4, 1, 3, 0.0, 5);
        let (_, types) = generate_instance(&cfg).unwrap();
        for t in types.iter().take(3) {
            assert!(t.rewards().iter().all(|&r| r > 0.0 && r <= 1.0));
            assert!(t.penalties().iter().all(|&p| (-1.0..0.0).contains(&p)));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = GenConfig::new(8, 3, 4, 0.3, 99);
        assert_eq!(
            generate_instance(&cfg).unwrap(),
            generate_instance(&cfg).unwrap()
        );
        let other = GenConfig {
            seed: 100,
            ..cfg.clone()
        };
        assert_ne!(
            generate_instance(&cfg).unwrap(),
            generate_instance(&other).unwrap()
        );
    }

    #[test]
    fn zero_sum_type_is_optional() {
        let mut cfg = GenConfig::new(5, 2, 3, 0.5, 1);
        assert_eq!(generate_instance(&cfg).unwrap().1.len(), 4);
        cfg.include_zero_sum = false;
        assert_eq!(generate_instance(&cfg).unwrap().1.len(), 3);
    }

    #[test]
    fn generated_games_are_shifted_with_positive_sse_values() {
        for seed in 0..20 {
            let cfg = GenConfig::new(7, 2, 6, 0.4, seed);
            let (game, types) = generate_instance(&cfg).unwrap();
            assert!(game.has_nonnegative_payoffs());
            assert!(game.def_penalties().contains(&0.0));
            let sse = SseTable::compute(&game, &types).unwrap();
            assert!(sse.values().all(|v| v > 0.0));
        }
    }

    #[test]
    fn blend_moves_toward_zero_sum() {
        let base = GenConfig::new(6, 2, 4, 0.0, 3);
        let mut last = f64::INFINITY;
        for k in 0..=10 {
            let cfg = GenConfig {
                rho: k as f64 / 10.0,
                ..base.clone()
            };
            let (_, types) = generate_instance(&cfg).unwrap();
            let zs = &types[types.len() - 1];
            let dist = types
                .iter()
                .take(4)
                .flat_map(|t| {
                    t.rewards()
                        .iter()
                        .zip(zs.rewards())
                        .chain(t.penalties().iter().zip(zs.penalties()))
                        .map(|(a, b)| (a - b).abs())
                })
                .fold(0.0f64, f64::max);
            assert!(dist <= last + 1e-15);
            last = dist;
        }
        assert_eq!(last, 0.0);
    }

    #[test]
    fn config_violations() {
        assert!(generate_instance(&GenConfig::new(2, 2, 1, 0.5, 0)).is_err());
        assert!(generate_instance(&GenConfig::new(3, 1, 0, 0.5, 0)).is_err());
        assert!(generate_instance(&GenConfig::new(3, 1, 1, 1.5, 0)).is_err());
        let mut cfg = GenConfig::new(3, 1, 1, 0.5, 0);
        cfg.payoff_high = 0.0;
        assert!(generate_instance(&cfg).is_err());
    }

    #[test]
    fn substreams_differ() {
        assert_ne!(substream_seed(1, 0), substream_seed(1, 1));
        assert_eq!(substream_seed(1, 7), substream_seed(1, 7));
    }
}
