//! Strategic interaction: normal-form games, equilibria and repeated play.
//!
//! - [`nash`]: pure equilibria by deviation checks, two-player mixed
//!   equilibria by support enumeration, and the welfare-maximizing one among
//!   those found.
//! - [`correlated`]: correlated equilibria as the solution of a linear
//!   program over distributions on pure profiles.
//! - [`automata`]: Moore machines playing the iterated prisoner's dilemma,
//!   and a brute-force check of whether a machine can be beaten by any
//!   other machine of bounded size.

pub mod automata;
pub mod correlated;
pub mod nash;

pub use automata::{
    bounded_automata_equilibrium, iterated_play, tournament, AutomataCheck, MooreMachine, Move, PlayRecord,
    TournamentRow,
};
pub use correlated::{ce_max_violation, correlated_equilibrium_lp, CeObjective, CorrelatedDistribution};
pub use nash::{max_welfare_nash, pure_nash, support_enumeration_2p, MixedEquilibrium, PureNash, SupportEnumeration};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, PROBABILITY_TOLERANCE};

/// Finite game in normal form.
///
/// Pure profiles are indexed in row-major order: the first player's
/// strategy is the most significant digit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameDoc", into = "GameDoc")]
pub struct NormalFormGame {
    strategies: Vec<Vec<String>>,
    /// `payoffs[profile][player]`.
    payoffs: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameDoc {
    strategies: Vec<Vec<String>>,
    payoffs: Vec<Vec<f64>>,
}

impl TryFrom<GameDoc> for NormalFormGame {
    type Error = Error;

    fn try_from(doc: GameDoc) -> Result<Self> {
        NormalFormGame::new(doc.strategies, doc.payoffs)
    }
}

impl From<NormalFormGame> for GameDoc {
    fn from(g: NormalFormGame) -> Self {
        GameDoc {
            strategies: g.strategies,
            payoffs: g.payoffs,
        }
    }
}

impl NormalFormGame {
    pub fn new(strategies: Vec<Vec<String>>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        let k = strategies.len();
        if k < 2 {
            return Err(Error::Validation("a game needs at least two players".into()));
        }
        if strategies.iter().any(Vec::is_empty) {
            return Err(Error::Validation("every player needs at least one strategy".into()));
        }
        let profiles = strategies
            .iter()
            .try_fold(1usize, |acc, s| acc.checked_mul(s.len()))
            .ok_or_else(|| Error::Validation("payoff tensor is too large".into()))?;
        if payoffs.len() != profiles {
            return Err(Error::Validation(format!(
                "payoff tensor has {} entries, expected {profiles}",
                payoffs.len()
            )));
        }
        if payoffs.iter().any(|p| p.len() != k) {
            return Err(Error::Validation(format!("every payoff entry needs {k} values")));
        }
        if payoffs.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Validation("payoffs must be finite".into()));
        }
        Ok(NormalFormGame { strategies, payoffs })
    }

    /// Two-player game from row and column payoff matrices.
    pub fn bimatrix(row_labels: &[&str], col_labels: &[&str], row: &[Vec<f64>], col: &[Vec<f64>]) -> Result<Self> {
        let mut payoffs = Vec::with_capacity(row_labels.len() * col_labels.len());
        for i in 0..row_labels.len() {
            for j in 0..col_labels.len() {
                let a = row.get(i).and_then(|r| r.get(j));
                let b = col.get(i).and_then(|r| r.get(j));
                match (a, b) {
                    (Some(a), Some(b)) => payoffs.push(vec![*a, *b]),
                    _ => return Err(Error::Validation("payoff matrix does not match labels".into())),
                }
            }
        }
        let labels = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        NormalFormGame::new(vec![labels(row_labels), labels(col_labels)], payoffs)
    }

    pub fn players(&self) -> usize {
        self.strategies.len()
    }

    pub fn strategy_counts(&self) -> Vec<usize> {
        self.strategies.iter().map(Vec::len).collect()
    }

    pub fn strategy_labels(&self, player: usize) -> &[String] {
        &self.strategies[player]
    }

    pub fn profile_count(&self) -> usize {
        self.payoffs.len()
    }

    pub fn profile_index(&self, profile: &[usize]) -> usize {
        profile
            .iter()
            .zip(&self.strategies)
            .fold(0, |acc, (&s, labels)| acc * labels.len() + s)
    }

    pub fn profile_of(&self, mut index: usize) -> Vec<usize> {
        let mut profile = vec![0; self.players()];
        for (p, labels) in self.strategies.iter().enumerate().rev() {
            profile[p] = index % labels.len();
            index /= labels.len();
        }
        profile
    }

    pub fn payoff(&self, profile: &[usize], player: usize) -> f64 {
        self.payoffs[self.profile_index(profile)][player]
    }

    pub fn payoff_vector(&self, profile: &[usize]) -> &[f64] {
        &self.payoffs[self.profile_index(profile)]
    }

    pub fn profile_label(&self, profile: &[usize]) -> String {
        let parts: Vec<&str> = profile
            .iter()
            .enumerate()
            .map(|(p, &s)| self.strategies[p][s].as_str())
            .collect();
        format!("({})", parts.join(","))
    }

    /// Sum of all players' payoffs at a pure profile.
    pub fn welfare(&self, profile: &[usize]) -> f64 {
        self.payoff_vector(profile).iter().sum()
    }

    pub fn expected_payoffs(&self, mixed: &MixedProfile) -> Vec<f64> {
        let mut totals = vec![0.0; self.players()];
        for idx in 0..self.profile_count() {
            let profile = self.profile_of(idx);
            let weight: f64 = profile.iter().enumerate().map(|(p, &s)| mixed.0[p][s]).product();
            if weight == 0.0 {
                continue;
            }
            for (t, u) in totals.iter_mut().zip(&self.payoffs[idx]) {
                *t += weight * u;
            }
        }
        totals
    }

    /// Expected payoff of `player` for each of their pure strategies when
    /// everyone else follows `mixed`.
    pub fn pure_strategy_payoffs(&self, player: usize, mixed: &MixedProfile) -> Vec<f64> {
        let mut values = vec![0.0; self.strategies[player].len()];
        for idx in 0..self.profile_count() {
            let profile = self.profile_of(idx);
            let weight: f64 = profile
                .iter()
                .enumerate()
                .filter(|(p, _)| *p != player)
                .map(|(p, &s)| mixed.0[p][s])
                .product();
            values[profile[player]] += weight * self.payoffs[idx][player];
        }
        values
    }

    /// Largest gain any player could get by switching to a pure strategy.
    pub fn max_deviation_gain(&self, mixed: &MixedProfile) -> f64 {
        let current = self.expected_payoffs(mixed);
        (0..self.players())
            .map(|p| {
                let best = self
                    .pure_strategy_payoffs(p, mixed)
                    .into_iter()
                    .fold(f64::NEG_INFINITY, f64::max);
                best - current[p]
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// One probability vector per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedProfile(pub Vec<Vec<f64>>);

impl MixedProfile {
    pub fn new(game: &NormalFormGame, probs: Vec<Vec<f64>>) -> Result<Self> {
        if probs.len() != game.players() {
            return Err(Error::Validation("one probability vector per player".into()));
        }
        for (p, v) in probs.iter().enumerate() {
            if v.len() != game.strategies[p].len() {
                return Err(Error::Validation(format!(
                    "player {p} has the wrong number of probabilities"
                )));
            }
            if v.iter().any(|x| x.is_nan() || *x < 0.0) {
                return Err(Error::Validation(format!("player {p} has a negative probability")));
            }
            let total: f64 = v.iter().sum();
            if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
                return Err(Error::Validation(format!("player {p}'s probabilities sum to {total}")));
            }
        }
        Ok(MixedProfile(probs))
    }

    pub fn pure(game: &NormalFormGame, profile: &[usize]) -> Self {
        MixedProfile(
            game.strategy_counts()
                .iter()
                .zip(profile)
                .map(|(&n, &s)| (0..n).map(|i| if i == s { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }
}

/// The prisoner's dilemma with strategies `C` and `D`, requiring
/// `T > R > P > S`.
pub fn prisoners_dilemma(t: f64, r: f64, p: f64, s: f64) -> Result<NormalFormGame> {
    if !(t > r && r > p && p > s) {
        return Err(Error::Validation(format!(
            "prisoner's dilemma needs T > R > P > S, got T={t} R={r} P={p} S={s}"
        )));
    }
    NormalFormGame::new(
        vec![vec!["C".into(), "D".into()], vec!["C".into(), "D".into()]],
        vec![vec![r, r], vec![s, t], vec![t, s], vec![p, p]],
    )
}

/// Pure strategies of `player` that maximize their expected payoff against
/// the others' mixed strategies. This is the one-shot self-interested agent.
pub fn best_response(game: &NormalFormGame, player: usize, mixed: &MixedProfile, tol: f64) -> Vec<usize> {
    let values = game.pure_strategy_payoffs(player, mixed);
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..values.len()).filter(|&s| values[s] >= best - tol).collect()
}
