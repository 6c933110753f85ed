//! Enumeration caps shared by every brute-force routine.
//!
//! The defaults keep worst-case desk runs well under a minute. Callers can
//! raise individual caps with [`Limits::with_overrides`], which parses the
//! `key=value,key=value` syntax accepted by the `MTL_CAP_OVERRIDE`
//! environment variable of the command-line harness.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` for unordered exhaustive plan search (2^n - 1 calls).
    pub plan_unordered: usize,
    /// Largest `n` for ordered exhaustive plan search (floor(e n!) - 1 calls).
    pub plan_ordered: usize,
    /// Largest network handled by enumeration and brute-force MAP.
    pub bayes_variables: usize,
    /// Largest strategy count per player for welfare-maximizing NE search.
    pub support_strategies: usize,
    /// Largest `players * profiles` product for the correlated-equilibrium LP.
    pub lp_size: usize,
    /// Largest automaton size for bounded-automata equilibrium checks.
    pub automata_states: usize,
    /// Largest number of POMDP policy trees to enumerate.
    pub pomdp_trees: u128,
    /// Largest number of restless-bandit activation sequences to enumerate.
    pub bandit_sequences: u128,
    /// Largest point set for shattering checks (2^m labelings).
    pub shatter_points: usize,
    /// Largest `max_m` for VC-dimension search.
    pub vc_points: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            plan_unordered: 20,
            plan_ordered: 10,
            bayes_variables: 20,
            support_strategies: 6,
            lp_size: 20_000,
            automata_states: 2,
            pomdp_trees: 1_000_000,
            bandit_sequences: 1_000_000,
            shatter_points: 20,
            vc_points: 6,
        }
    }
}

impl Limits {
    /// Apply `key=value` overrides, e.g. `plan_unordered=24,pomdp_trees=5000000`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Validation(format!("cap override `{item}` is not key=value")))?;
            let value: u128 = value
                .trim()
                .parse()
                .map_err(|_| Error::Validation(format!("cap override `{item}` has a non-integer value")))?;
            let small =
                || usize::try_from(value).map_err(|_| Error::Validation(format!("cap override `{item}` is too large")));
            match key.trim() {
                "plan_unordered" => self.plan_unordered = small()?,
                "plan_ordered" => self.plan_ordered = small()?,
                "bayes_variables" => self.bayes_variables = small()?,
                "support_strategies" => self.support_strategies = small()?,
                "lp_size" => self.lp_size = small()?,
                "automata_states" => self.automata_states = small()?,
                "pomdp_trees" => self.pomdp_trees = value,
                "bandit_sequences" => self.bandit_sequences = value,
                "shatter_points" => self.shatter_points = small()?,
                "vc_points" => self.vc_points = small()?,
                other => return Err(Error::Validation(format!("unknown cap `{other}`"))),
            }
        }
        Ok(self)
    }
}
