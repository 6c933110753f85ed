use super::{MarkovDecisionProcess, Policy};
use crate::{Error, Result};

/// Sweep limit for undiscounted problems, where no contraction bound applies.
const UNDISCOUNTED_SWEEP_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ValueIteration {
    pub values: Vec<f64>,
    pub policy: Policy,
    /// Number of Bellman sweeps performed.
    pub iterations: u64,
    /// Sup-norm change made by each sweep.
    pub residuals: Vec<f64>,
}

fn check_solvable(mdp: &MarkovDecisionProcess, tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Validation(format!("tolerance must be positive, got {tol}")));
    }
    if mdp.discount() >= 1.0 && !mdp.has_terminal_state() {
        return Err(Error::Domain(
            "discount 1 without a terminal state: values may diverge".into(),
        ));
    }
    Ok(())
}

/// Stop once a sweep changes no value by more than this. With `discount < 1`
/// the values are then within `tol` of the fixed point.
fn stopping_threshold(discount: f64, tol: f64) -> f64 {
    if discount < 1.0 {
        tol * (1.0 - discount)
    } else {
        tol
    }
}

/// Most sweeps [`value_iteration`] can need for a discount below one.
pub fn contraction_bound(discount: f64, tol: f64, max_abs_reward: f64) -> u64 {
    if max_abs_reward <= 0.0 {
        return 1;
    }
    if discount <= 0.0 {
        return 2;
    }
    let exponent = ((tol * (1.0 - discount)) / max_abs_reward).ln() / discount.ln();
    (exponent.ceil().max(0.0) as u64) + 1
}

fn sweep(values: &[f64], mut backup: impl FnMut(usize, &[f64]) -> f64) -> (Vec<f64>, f64) {
    let next: Vec<f64> = (0..values.len()).map(|s| backup(s, values)).collect();
    let change = next.iter().zip(values).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    (next, change)
}

fn greedy(mdp: &MarkovDecisionProcess, values: &[f64]) -> Policy {
    let actions = (0..mdp.states().len())
        .map(|s| {
            let mut best = (0, f64::NEG_INFINITY);
            for a in 0..mdp.actions().len() {
                let q = mdp.q_value(s, a, values);
                if q > best.1 {
                    best = (a, q);
                }
            }
            best.0
        })
        .collect();
    Policy(actions)
}

/// Synchronous value iteration from all-zero values. Ties in the greedy
/// policy go to the lowest action index.
pub fn value_iteration(mdp: &MarkovDecisionProcess, tol: f64) -> Result<ValueIteration> {
    check_solvable(mdp, tol)?;
    let threshold = stopping_threshold(mdp.discount(), tol);
    let n_a = mdp.actions().len();
    let mut values = vec![0.0; mdp.states().len()];
    let mut residuals = Vec::new();
    loop {
        let (next, change) = sweep(&values, |s, v| {
            (0..n_a).map(|a| mdp.q_value(s, a, v)).fold(f64::NEG_INFINITY, f64::max)
        });
        values = next;
        residuals.push(change);
        if change <= threshold {
            break;
        }
        if residuals.len() as u64 >= UNDISCOUNTED_SWEEP_LIMIT {
            return Err(Error::Domain(format!(
                "value iteration did not settle within {UNDISCOUNTED_SWEEP_LIMIT} sweeps"
            )));
        }
    }
    let policy = greedy(mdp, &values);
    Ok(ValueIteration {
        values,
        policy,
        iterations: residuals.len() as u64,
        residuals,
    })
}

/// Values of a fixed policy, by iterating its Bellman operator to the same
/// stopping rule as [`value_iteration`].
pub fn evaluate_policy(mdp: &MarkovDecisionProcess, policy: &Policy, tol: f64) -> Result<Vec<f64>> {
    check_solvable(mdp, tol)?;
    Policy::new(mdp, policy.0.clone())?;
    let threshold = stopping_threshold(mdp.discount(), tol);
    let mut values = vec![0.0; mdp.states().len()];
    for _ in 0..UNDISCOUNTED_SWEEP_LIMIT {
        let (next, change) = sweep(&values, |s, v| mdp.q_value(s, policy.action(s), v));
        values = next;
        if change <= threshold {
            return Ok(values);
        }
    }
    Err(Error::Domain(format!(
        "policy evaluation did not settle within {UNDISCOUNTED_SWEEP_LIMIT} sweeps"
    )))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteHorizon {
    /// Optimal expected discounted reward over `horizon` steps, per start state.
    pub values: Vec<f64>,
    /// Best first action per start state.
    pub first_actions: Policy,
}

/// Exact `horizon`-step optimum by backward induction.
pub fn finite_horizon(mdp: &MarkovDecisionProcess, horizon: usize) -> FiniteHorizon {
    let mut values = vec![0.0; mdp.states().len()];
    let mut first = Policy(vec![0; values.len()]);
    for _ in 0..horizon {
        first = greedy(mdp, &values);
        values = (0..values.len())
            .map(|s| mdp.q_value(s, first.action(s), &values))
            .collect();
    }
    FiniteHorizon {
        values,
        first_actions: first,
    }
}
