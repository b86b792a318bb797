//! Game model: the public defender side of a security game, attacker types,
//! coverage vectors, utilities and best responses.
//!
//! Targets are 0-indexed throughout the library. Files and CLI output use
//! 1-based target numbers.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used to expand best-response sets.
///
/// Ties are exact in the underlying model; any target whose attacker
/// utility is within this distance of the maximum counts as a best response.
pub const DEFAULT_TIE_TOL: f64 = 1e-9;

/// Slack allowed on the coverage bounds `0 <= c_i <= 1` and `sum c_i <= m`.
pub const COVERAGE_TOL: f64 = 1e-9;

/// Targets, resource budget and defender payoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance {
    resources: usize,
    def_rewards: Vec<f64>,
    def_penalties: Vec<f64>,
}

impl GameInstance {
    pub fn new(resources: usize, def_rewards: Vec<f64>, def_penalties: Vec<f64>) -> Result<Self> {
        let n = def_rewards.len();
        if def_penalties.len() != n {
            return Err(Error::InvalidGame(format!(
                "{n} defender rewards but {} defender penalties",
                def_penalties.len()
            )));
        }
        if resources < 1 {
            return Err(Error::InvalidGame(
                "resource budget m must be at least 1".into(),
            ));
        }
        if n <= resources {
            return Err(Error::InvalidGame(format!(
                "need more targets than resources (n = {n}, m = {resources})"
            )));
        }
        for (i, (&r, &p)) in def_rewards.iter().zip(&def_penalties).enumerate() {
            if !r.is_finite() || !p.is_finite() {
                return Err(Error::InvalidGame(format!(
                    "target {}: non-finite payoff",
                    i + 1
                )));
            }
            if r <= p {
                return Err(Error::InvalidGame(format!(
                    "target {}: defender reward {r} must exceed penalty {p}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            resources,
            def_rewards,
            def_penalties,
        })
    }

    pub fn num_targets(&self) -> usize {
        self.def_rewards.len()
    }

    pub fn resources(&self) -> usize {
        self.resources
    }

    pub fn def_rewards(&self) -> &[f64] {
        &self.def_rewards
    }

    pub fn def_penalties(&self) -> &[f64] {
        &self.def_penalties
    }

    /// Defender utility when target `i` is attacked and covered with
    /// probability `ci`.
    #[inline]
    pub fn value_at(&self, ci: f64, i: usize) -> f64 {
        ci * self.def_rewards[i] + (1.0 - ci) * self.def_penalties[i]
    }

    /// Coverage on target `i` at which the defender's utility equals `u`
    /// (unclamped).
    #[inline]
    pub fn coverage_for_value(&self, u: f64, i: usize) -> f64 {
        (u - self.def_penalties[i]) / (self.def_rewards[i] - self.def_penalties[i])
    }

    pub fn has_nonnegative_payoffs(&self) -> bool {
        self.def_penalties.iter().all(|&p| p >= 0.0)
    }

    fn check_target(&self, i: usize) -> Result<()> {
        if i < self.num_targets() {
            Ok(())
        } else {
            Err(Error::TargetOutOfRange {
                target: i,
                n: self.num_targets(),
            })
        }
    }
}

/// Attacker reward and penalty vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackerType {
    #[serde(rename = "atk_rewards")]
    rewards: Vec<f64>,
    #[serde(rename = "atk_penalties")]
    penalties: Vec<f64>,
}

impl AttackerType {
    pub fn new(rewards: Vec<f64>, penalties: Vec<f64>) -> Result<Self> {
        let ty = Self { rewards, penalties };
        ty.validate(0)?;
        Ok(ty)
    }

    fn validate(&self, type_index: usize) -> Result<()> {
        if self.rewards.len() != self.penalties.len() {
            return Err(Error::InvalidType {
                type_index,
                msg: format!(
                    "{} rewards but {} penalties",
                    self.rewards.len(),
                    self.penalties.len()
                ),
            });
        }
        if self.rewards.is_empty() {
            return Err(Error::InvalidType {
                type_index,
                msg: "no targets".into(),
            });
        }
        for (i, (&r, &p)) in self.rewards.iter().zip(&self.penalties).enumerate() {
            if !r.is_finite() || !p.is_finite() {
                return Err(Error::InvalidType {
                    type_index,
                    msg: format!("target {}: non-finite payoff", i + 1),
                });
            }
            if r <= p {
                return Err(Error::InvalidType {
                    type_index,
                    msg: format!(
                        "target {}: attacker reward {r} must exceed penalty {p}",
                        i + 1
                    ),
                });
            }
        }
        Ok(())
    }

    pub fn num_targets(&self) -> usize {
        self.rewards.len()
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn penalties(&self) -> &[f64] {
        &self.penalties
    }

    /// Attacker utility for attacking target `i` covered with probability `ci`.
    #[inline]
    pub fn value_at(&self, ci: f64, i: usize) -> f64 {
        (1.0 - ci) * self.rewards[i] + ci * self.penalties[i]
    }

    /// Coverage on target `i` at which this type's utility equals `v`
    /// (unclamped).
    #[inline]
    pub fn coverage_for_value(&self, v: f64, i: usize) -> f64 {
        (v - self.rewards[i]) / (self.penalties[i] - self.rewards[i])
    }

    /// Largest attacker utility over all targets.
    pub fn best_value(&self, c: &Coverage) -> f64 {
        (0..self.num_targets())
            .map(|i| self.value_at(c[i], i))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The finite list of attacker types a defender considers.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeSet {
    types: Vec<AttackerType>,
}

impl TypeSet {
    pub fn new(types: Vec<AttackerType>) -> Result<Self> {
        let first = types.first().ok_or(Error::EmptyTypeSet)?;
        let n = first.num_targets();
        for (j, ty) in types.iter().enumerate() {
            ty.validate(j)?;
            if ty.num_targets() != n {
                return Err(Error::InvalidType {
                    type_index: j,
                    msg: format!("has {} targets, expected {n}", ty.num_targets()),
                });
            }
        }
        Ok(Self { types })
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn num_targets(&self) -> usize {
        self.types[0].num_targets()
    }

    pub fn get(&self, j: usize) -> Result<&AttackerType> {
        self.types.get(j).ok_or(Error::TypeOutOfRange {
            index: j,
            len: self.types.len(),
        })
    }

    pub fn iter(&self) -> std::slice::Iter<'_, AttackerType> {
        self.types.iter()
    }

    pub fn as_slice(&self) -> &[AttackerType] {
        &self.types
    }

    /// Checks that every type has one entry per target of `game`.
    pub fn check_against(&self, game: &GameInstance) -> Result<()> {
        if self.num_targets() != game.num_targets() {
            return Err(Error::InvalidType {
                type_index: 0,
                msg: format!(
                    "has {} targets but the game has {}",
                    self.num_targets(),
                    game.num_targets()
                ),
            });
        }
        Ok(())
    }
}

impl Index<usize> for TypeSet {
    type Output = AttackerType;

    fn index(&self, j: usize) -> &AttackerType {
        &self.types[j]
    }
}

impl<'a> IntoIterator for &'a TypeSet {
    type Item = &'a AttackerType;
    type IntoIter = std::slice::Iter<'a, AttackerType>;

    fn into_iter(self) -> Self::IntoIter {
        self.types.iter()
    }
}

/// A defender mixed strategy in coverage form: `c_i` is the probability
/// target `i` is protected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coverage(Vec<f64>);

impl Coverage {
    /// Wraps raw probabilities without checking them; see [`Coverage::validate`].
    pub fn new(probs: Vec<f64>) -> Self {
        Self(probs)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Checks membership in `{0 <= c <= 1, sum c <= m}` up to [`COVERAGE_TOL`].
    pub fn validate(&self, game: &GameInstance) -> Result<()> {
        if self.len() != game.num_targets() {
            return Err(Error::InvalidCoverage(format!(
                "{} entries for a game with {} targets",
                self.len(),
                game.num_targets()
            )));
        }
        for (i, &c) in self.0.iter().enumerate() {
            if !c.is_finite() || !(-COVERAGE_TOL..=1.0 + COVERAGE_TOL).contains(&c) {
                return Err(Error::InvalidCoverage(format!(
                    "target {}: probability {c} outside [0, 1]",
                    i + 1
                )));
            }
        }
        let total = self.total();
        let m = game.resources() as f64;
        if total > m + COVERAGE_TOL {
            return Err(Error::InvalidCoverage(format!(
                "total coverage {total} exceeds the budget of {m} resources"
            )));
        }
        Ok(())
    }
}

impl Index<usize> for Coverage {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// `u^d(c, i) = c_i r_i^d + (1 - c_i) p_i^d`.
pub fn defender_utility(game: &GameInstance, c: &Coverage, i: usize) -> Result<f64> {
    game.check_target(i)?;
    if c.len() != game.num_targets() {
        return Err(Error::InvalidCoverage(format!(
            "{} entries for a game with {} targets",
            c.len(),
            game.num_targets()
        )));
    }
    Ok(game.value_at(c[i], i))
}

/// `u^a(c, i) = (1 - c_i) r_i^a + c_i p_i^a` for attacker type `theta`.
pub fn attacker_utility(theta: &AttackerType, c: &Coverage, i: usize) -> Result<f64> {
    if i >= theta.num_targets() {
        return Err(Error::TargetOutOfRange {
            target: i,
            n: theta.num_targets(),
        });
    }
    if c.len() != theta.num_targets() {
        return Err(Error::InvalidCoverage(format!(
            "{} entries for a type with {} targets",
            c.len(),
            theta.num_targets()
        )));
    }
    Ok(theta.value_at(c[i], i))
}

/// All targets whose attacker utility is within `tie_tol` of the best one,
/// in ascending index order.
pub fn best_responses(theta: &AttackerType, c: &Coverage, tie_tol: f64) -> Vec<usize> {
    let best = theta.best_value(c);
    (0..theta.num_targets())
        .filter(|&i| theta.value_at(c[i], i) >= best - tie_tol)
        .collect()
}

/// Whether `target` is a best response of `theta` to `c` at tolerance `tie_tol`.
pub fn is_best_response(theta: &AttackerType, c: &Coverage, target: usize, tie_tol: f64) -> bool {
    target < theta.num_targets()
        && theta.value_at(c[target], target) >= theta.best_value(c) - tie_tol
}

/// Picks the candidate maximizing the defender's utility at `c`, lowest index
/// among exact ties.
pub(crate) fn defender_favorable(
    game: &GameInstance,
    c: &Coverage,
    candidates: impl IntoIterator<Item = usize>,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for i in candidates {
        let u = game.value_at(c[i], i);
        if best.is_none_or(|(_, b)| u > b) {
            best = Some((i, u));
        }
    }
    best.map(|(i, _)| i)
}

/// The attacker type that makes the game zero-sum: `(-p^d, -r^d)`.
pub fn zero_sum_type(game: &GameInstance) -> AttackerType {
    AttackerType {
        rewards: game.def_penalties.iter().map(|p| -p).collect(),
        penalties: game.def_rewards.iter().map(|r| -r).collect(),
    }
}

/// Shifts every defender payoff by `max(0, -min_i p_i^d)` so that all of
/// them are non-negative. Attacker payoffs are not part of the game and stay
/// untouched.
pub fn shift_nonnegative(game: &GameInstance) -> (GameInstance, f64) {
    let min_penalty = game
        .def_penalties
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let offset = (-min_penalty).max(0.0);
    if offset == 0.0 {
        return (game.clone(), 0.0);
    }
    let shifted = GameInstance {
        resources: game.resources,
        def_rewards: game.def_rewards.iter().map(|r| r + offset).collect(),
        def_penalties: game.def_penalties.iter().map(|p| p + offset).collect(),
    };
    (shifted, offset)
}
