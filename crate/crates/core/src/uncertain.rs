//! Choosing among risky actions (lotteries over outcome values).
//!
//! Two decision rules are offered: maximum expected utility and minmax (the
//! best worst case). Both inspect every outcome of every action exactly
//! once, so a decision over `n` actions with `o` outcomes each costs `n * o`
//! inspections.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, PROBABILITY_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub probability: f64,
    pub value: f64,
}

/// An action whose result is one of several outcomes, each with a known
/// probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RiskyActionDoc", into = "RiskyActionDoc")]
pub struct RiskyAction {
    label: String,
    outcomes: Vec<Outcome>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RiskyActionDoc {
    label: String,
    outcomes: Vec<(f64, f64)>,
}

impl TryFrom<RiskyActionDoc> for RiskyAction {
    type Error = Error;

    fn try_from(doc: RiskyActionDoc) -> Result<Self> {
        RiskyAction::new(doc.label, doc.outcomes)
    }
}

impl From<RiskyAction> for RiskyActionDoc {
    fn from(a: RiskyAction) -> Self {
        RiskyActionDoc {
            label: a.label,
            outcomes: a.outcomes.iter().map(|o| (o.probability, o.value)).collect(),
        }
    }
}

impl RiskyAction {
    /// Build from `(probability, value)` pairs. Probabilities must lie in
    /// `[0, 1]` and sum to one within `1e-9`; nothing is renormalized.
    pub fn new(label: impl Into<String>, outcomes: Vec<(f64, f64)>) -> Result<Self> {
        let label = label.into();
        if outcomes.is_empty() {
            return Err(Error::Validation(format!("action `{label}` has no outcomes")));
        }
        for &(p, v) in &outcomes {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Validation(format!(
                    "action `{label}` has probability {p} outside [0, 1]"
                )));
            }
            if !v.is_finite() {
                return Err(Error::Validation(format!("action `{label}` has a non-finite value")));
            }
        }
        let total: f64 = outcomes.iter().map(|o| o.0).sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::Validation(format!(
                "probabilities of `{label}` sum to {total}, not 1"
            )));
        }
        Ok(RiskyAction {
            label,
            outcomes: outcomes
                .into_iter()
                .map(|(probability, value)| Outcome { probability, value })
                .collect(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn worst_case(&self) -> f64 {
        self.outcomes.iter().map(|o| o.value).fold(f64::INFINITY, f64::min)
    }
}

/// `sum p_i v_i`.
pub fn expected_utility(action: &RiskyAction) -> f64 {
    action.outcomes.iter().map(|o| o.probability * o.value).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionRule {
    MaxExpectedUtility,
    Minmax,
}

impl FromStr for DecisionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max_eu" | "max-eu" => Ok(DecisionRule::MaxExpectedUtility),
            "minmax" => Ok(DecisionRule::Minmax),
            other => Err(Error::Domain(format!("unknown decision rule `{other}`"))),
        }
    }
}

impl fmt::Display for DecisionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecisionRule::MaxExpectedUtility => "max_eu",
            DecisionRule::Minmax => "minmax",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub index: usize,
    pub label: String,
    /// Score of every action under the rule (expected utility or worst case).
    pub scores: Vec<f64>,
    /// Outcome values looked at.
    pub inspections: u64,
}

/// Pick an action under `rule`. Ties go to the first action.
pub fn decide(actions: &[RiskyAction], rule: DecisionRule) -> Result<Decision> {
    if actions.is_empty() {
        return Err(Error::Domain("no actions to decide between".into()));
    }
    let mut inspections = 0u64;
    let scores: Vec<f64> = actions
        .iter()
        .map(|a| {
            inspections += a.outcomes.len() as u64;
            match rule {
                DecisionRule::MaxExpectedUtility => expected_utility(a),
                DecisionRule::Minmax => a.worst_case(),
            }
        })
        .collect();
    let mut index = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s > scores[index] {
            index = i;
        }
    }
    Ok(Decision {
        index,
        label: actions[index].label.clone(),
        scores,
        inspections,
    })
}

/// Parse a JSON list of `{"label": ..., "outcomes": [[p, v], ...]}`.
pub fn actions_from_json(text: &str) -> Result<Vec<RiskyAction>> {
    Ok(serde_json::from_str(text)?)
}
