use super::{MixedProfile, NormalFormGame};
use crate::{linalg, Error, Limits, Result};

/// Tolerance for best-response and non-negativity checks.
const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PureNash {
    pub profiles: Vec<Vec<usize>>,
    /// Unilateral deviations compared; always
    /// `profiles * sum_i (n_i - 1)`.
    pub deviation_checks: u64,
}

/// Every pure profile at which no player gains by switching strategy.
pub fn pure_nash(game: &NormalFormGame) -> PureNash {
    let mut profiles = Vec::new();
    let mut deviation_checks = 0;
    for idx in 0..game.profile_count() {
        let profile = game.profile_of(idx);
        let mut stable = true;
        let mut alt = profile.clone();
        for player in 0..game.players() {
            let current = game.payoff(&profile, player);
            for s in 0..game.strategy_labels(player).len() {
                if s == profile[player] {
                    continue;
                }
                deviation_checks += 1;
                alt[player] = s;
                stable &= game.payoff(&alt, player) <= current;
            }
            alt[player] = profile[player];
        }
        if stable {
            profiles.push(profile);
        }
    }
    PureNash {
        profiles,
        deviation_checks,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedEquilibrium {
    pub row: Vec<f64>,
    pub col: Vec<f64>,
    pub payoffs: [f64; 2],
}

impl MixedEquilibrium {
    pub fn welfare(&self) -> f64 {
        self.payoffs[0] + self.payoffs[1]
    }

    pub fn to_profile(&self) -> MixedProfile {
        MixedProfile(vec![self.row.clone(), self.col.clone()])
    }

    pub fn is_pure(&self) -> bool {
        self.row.iter().chain(&self.col).all(|&p| p == 0.0 || p == 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportEnumeration {
    pub equilibria: Vec<MixedEquilibrium>,
    /// Support pairs whose indifference system was singular.
    pub skipped: Vec<(Vec<usize>, Vec<usize>)>,
    /// Set when any support pair had to be skipped.
    pub degenerate: bool,
    pub systems_solved: u64,
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Solve for the opponent mix on `cols` that makes the player indifferent
/// across `rows` of `payoff` (indexed `[row][col]`). Returns the mix over
/// all columns and the common value.
fn indifference(payoff: &[Vec<f64>], rows: &[usize], cols: &[usize], width: usize) -> Option<(Vec<f64>, f64)> {
    let k = cols.len();
    let mut a = Vec::with_capacity(k + 1);
    let mut b = Vec::with_capacity(k + 1);
    for &r in rows {
        let mut eq: Vec<f64> = cols.iter().map(|&c| payoff[r][c]).collect();
        eq.push(-1.0);
        a.push(eq);
        b.push(0.0);
    }
    let mut sum = vec![1.0; k];
    sum.push(0.0);
    a.push(sum);
    b.push(1.0);
    let x = linalg::solve(a, b)?;
    let mut mix = vec![0.0; width];
    for (i, &c) in cols.iter().enumerate() {
        mix[c] = x[i];
    }
    Some((mix, x[k]))
}

/// Accept a candidate mix: support entries strictly positive, the rest
/// zero. Tiny negative noise is clamped and the vector renormalized.
fn clean_mix(mix: &mut [f64], support: &[usize]) -> bool {
    for (i, p) in mix.iter_mut().enumerate() {
        if support.contains(&i) {
            if *p <= TOL {
                return false;
            }
        } else {
            *p = 0.0;
        }
    }
    let total: f64 = mix.iter().sum();
    mix.iter_mut().for_each(|p| *p /= total);
    true
}

/// All Nash equilibria of a two-player game with equal-size supports, by
/// solving the indifference conditions for every support pair and keeping
/// the solutions that are non-negative best responses. Pure equilibria come
/// first. Singular support systems are skipped and reported; in a
/// nondegenerate game this finds every equilibrium.
pub fn support_enumeration_2p(game: &NormalFormGame) -> Result<SupportEnumeration> {
    if game.players() != 2 {
        return Err(Error::Domain("support enumeration needs exactly two players".into()));
    }
    let counts = game.strategy_counts();
    let (m, n) = (counts[0], counts[1]);
    let row_pay: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..n).map(|j| game.payoff(&[i, j], 0)).collect())
        .collect();
    // Column player's payoffs transposed so the indifference helper sees
    // their own strategies as rows.
    let col_pay_t: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..m).map(|i| game.payoff(&[i, j], 1)).collect())
        .collect();

    let mut out = SupportEnumeration {
        equilibria: Vec::new(),
        skipped: Vec::new(),
        degenerate: false,
        systems_solved: 0,
    };
    for k in 1..=m.min(n) {
        let row_sets = combinations(m, k);
        let col_sets = combinations(n, k);
        for rows in &row_sets {
            for cols in &col_sets {
                out.systems_solved += 2;
                let y = indifference(&row_pay, rows, cols, n);
                let x = indifference(&col_pay_t, cols, rows, m);
                let (Some((mut y, u)), Some((mut x, v))) = (y, x) else {
                    out.skipped.push((rows.clone(), cols.clone()));
                    out.degenerate = true;
                    continue;
                };
                if !clean_mix(&mut y, cols) || !clean_mix(&mut x, rows) {
                    continue;
                }
                let row_values: Vec<f64> = row_pay
                    .iter()
                    .map(|r| r.iter().zip(&y).map(|(a, b)| a * b).sum())
                    .collect();
                let col_values: Vec<f64> = col_pay_t
                    .iter()
                    .map(|c| c.iter().zip(&x).map(|(a, b)| a * b).sum())
                    .collect();
                let row_best = row_values.iter().all(|&w| w <= u + TOL);
                let col_best = col_values.iter().all(|&w| w <= v + TOL);
                if row_best && col_best {
                    let u = rows.iter().map(|&i| row_values[i]).sum::<f64>() / k as f64;
                    let v = cols.iter().map(|&j| col_values[j]).sum::<f64>() / k as f64;
                    out.equilibria.push(MixedEquilibrium {
                        row: x,
                        col: y,
                        payoffs: [u, v],
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Equilibrium with the largest payoff sum among those found by support
/// enumeration; ties keep the first found.
pub fn max_welfare_nash(game: &NormalFormGame, limits: &Limits) -> Result<(MixedEquilibrium, f64)> {
    if game.players() != 2 {
        return Err(Error::Domain(
            "welfare-maximizing NE search needs exactly two players".into(),
        ));
    }
    let counts = game.strategy_counts();
    if counts.iter().any(|&c| c > limits.support_strategies) {
        let pairs: u128 = (1..=counts[0].min(counts[1]))
            .map(|k| binomial(counts[0], k) * binomial(counts[1], k))
            .sum();
        return Err(Error::cap(
            format!(
                "support enumeration on a {}x{} game (cap {} strategies)",
                counts[0], counts[1], limits.support_strategies
            ),
            Some(pairs),
            (1..=limits.support_strategies)
                .map(|k| binomial(limits.support_strategies, k).pow(2))
                .sum(),
        ));
    }
    let found = support_enumeration_2p(game)?;
    let mut best: Option<MixedEquilibrium> = None;
    for eq in found.equilibria {
        if best.as_ref().is_none_or(|b| eq.welfare() > b.welfare()) {
            best = Some(eq);
        }
    }
    let best = best.ok_or_else(|| Error::Internal("support enumeration found no equilibrium".into()))?;
    let w = best.welfare();
    Ok((best, w))
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}
