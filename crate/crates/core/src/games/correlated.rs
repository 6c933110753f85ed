use minilp::{ComparisonOp, OptimizationDirection, Problem};

use super::{MixedProfile, NormalFormGame};
use crate::{Error, Limits, Result};

/// Tolerance for the incentive constraints of a returned distribution.
pub const CE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CeObjective {
    /// Any distribution satisfying the constraints.
    Feasible,
    /// Maximize the expected sum of payoffs.
    MaxWelfare,
}

/// Probability of each pure profile, in the game's row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedDistribution {
    pub probabilities: Vec<f64>,
}

impl CorrelatedDistribution {
    /// Product of independent mixed strategies.
    pub fn from_mixed(game: &NormalFormGame, mixed: &MixedProfile) -> Self {
        let probabilities = (0..game.profile_count())
            .map(|idx| {
                game.profile_of(idx)
                    .iter()
                    .enumerate()
                    .map(|(p, &s)| mixed.0[p][s])
                    .product()
            })
            .collect();
        CorrelatedDistribution { probabilities }
    }

    pub fn expected_welfare(&self, game: &NormalFormGame) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(idx, p)| p * game.welfare(&game.profile_of(idx)))
            .sum()
    }
}

/// Coefficients of the incentive constraint "told `s`, player does not
/// prefer `t`" over all profiles. Profiles where the player is not told `s`
/// get zero.
fn incentive_row(game: &NormalFormGame, player: usize, s: usize, t: usize) -> Vec<f64> {
    (0..game.profile_count())
        .map(|idx| {
            let mut profile = game.profile_of(idx);
            if profile[player] != s {
                return 0.0;
            }
            let obey = game.payoff(&profile, player);
            profile[player] = t;
            obey - game.payoff(&profile, player)
        })
        .collect()
}

/// Largest violation of any incentive constraint (0 when all hold), also
/// counting negative mass and deviation of the total from one.
pub fn ce_max_violation(game: &NormalFormGame, dist: &CorrelatedDistribution) -> f64 {
    let mut worst = (dist.probabilities.iter().sum::<f64>() - 1.0).abs();
    for &p in &dist.probabilities {
        worst = worst.max(-p);
    }
    for player in 0..game.players() {
        let n = game.strategy_labels(player).len();
        for s in 0..n {
            for t in (0..n).filter(|&t| t != s) {
                let gain: f64 = incentive_row(game, player, s, t)
                    .iter()
                    .zip(&dist.probabilities)
                    .map(|(c, p)| c * p)
                    .sum();
                worst = worst.max(-gain);
            }
        }
    }
    worst
}

/// A correlated equilibrium from the linear program over profile
/// probabilities. The returned distribution is checked against every
/// incentive constraint at [`CE_TOLERANCE`].
pub fn correlated_equilibrium_lp(
    game: &NormalFormGame,
    objective: CeObjective,
    limits: &Limits,
) -> Result<CorrelatedDistribution> {
    let size = game.players() * game.profile_count();
    if size > limits.lp_size {
        return Err(Error::cap(
            format!("correlated-equilibrium LP with {} profiles", game.profile_count()),
            Some(size as u128),
            limits.lp_size as u128,
        ));
    }
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..game.profile_count())
        .map(|idx| {
            let c = match objective {
                CeObjective::Feasible => 0.0,
                CeObjective::MaxWelfare => game.welfare(&game.profile_of(idx)),
            };
            problem.add_var(c, (0.0, f64::INFINITY))
        })
        .collect();
    for player in 0..game.players() {
        let n = game.strategy_labels(player).len();
        for s in 0..n {
            for t in (0..n).filter(|&t| t != s) {
                let terms: Vec<_> = incentive_row(game, player, s, t)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| *c != 0.0)
                    .map(|(idx, c)| (vars[idx], c))
                    .collect();
                if !terms.is_empty() {
                    problem.add_constraint(terms.as_slice(), ComparisonOp::Ge, 0.0);
                }
            }
        }
    }
    let total: Vec<_> = vars.iter().map(|&v| (v, 1.0)).collect();
    problem.add_constraint(total.as_slice(), ComparisonOp::Eq, 1.0);

    let solution = problem
        .solve()
        .map_err(|e| Error::Internal(format!("correlated-equilibrium LP failed: {e}")))?;
    let mut probabilities: Vec<f64> = vars.iter().map(|&v| solution[v].max(0.0)).collect();
    let sum: f64 = probabilities.iter().sum();
    probabilities.iter_mut().for_each(|p| *p /= sum);
    let dist = CorrelatedDistribution { probabilities };

    let violation = ce_max_violation(game, &dist);
    if violation > CE_TOLERANCE {
        return Err(Error::Internal(format!(
            "LP solution violates an incentive constraint by {violation}"
        )));
    }
    Ok(dist)
}
