//! Exact solvers, brute-force oracles and operation counters for formally
//! defined moral decision problems.
//!
//! Every solver reports how much work it did (oracle calls, value
//! inspections, deviation checks, policy trees evaluated) so that the
//! measured counts can be compared against closed-form growth laws.
//!
//! Module map:
//!
//! - [`planner`]: single actions, additive value profiles and action plans
//!   over a metered value oracle.
//! - [`uncertain`]: choosing among lotteries with expected utility or minmax.
//! - [`bayesnet`]: Boolean Bayesian networks with variable elimination,
//!   MPE and partial MAP, plus a full-enumeration oracle.
//! - [`rules`]: golden-rule permissibility and duty screening.
//! - [`games`]: normal-form games, Nash and correlated equilibria, Moore
//!   machines in the iterated prisoner's dilemma.
//! - [`seqdec`]: MDP value iteration, finite-horizon POMDPs by policy-tree
//!   enumeration and restless bandits by brute force.
//! - [`learn`]: No-Free-Lunch weather experiment, PAC bounds and VC
//!   shattering.
//! - [`growth`]: growth tables comparing metered and predicted counts.

pub mod bayesnet;
pub mod builtin;
pub mod error;
pub mod games;
pub mod growth;
pub mod learn;
pub mod limits;
pub mod linalg;
pub mod planner;
pub mod rules;
pub mod seqdec;
pub mod uncertain;

pub use error::{Error, Result};
pub use limits::Limits;

/// Absolute tolerance used when validating that probabilities sum to one.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

/// Decimal rendering rounded to 12 significant digits, with no trailing
/// zeros.
pub fn format_significant(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}")
        .parse()
        .expect("round-trips through scientific notation");
    if rounded == 0.0 {
        return "0".into();
    }
    rounded.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(20.0 / 3.0), "6.66666666667");
        assert_eq!(format_significant(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_significant(1023.0), "1023");
        assert_eq!(format_significant(-0.0), "0");
        assert_eq!(format_significant(2.8000000000000003), "2.8");
        assert_eq!(format_significant(f64::INFINITY), "inf");
    }
}
