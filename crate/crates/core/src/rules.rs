//! Rule-based permissibility: golden-rule checks over preference profiles
//! and screening of actions against declarative duties.
//!
//! A [`PreferenceProfile`] records, for one agent, how each action would
//! change each of their preferences if it were done to them. An action is
//! acceptable to an agent when none of those changes falls below a
//! threshold (zero by default).
//!
//! - GR1 asks only the acting agent: would I accept this done to me?
//! - GR2 asks every affected agent, using their own profiles.
//!
//! Every check inspects every entry it is responsible for, so counts are
//! exact: `p` per action for GR1, `p * o` for GR2 over `o` agents, and `n`
//! times that when screening `n` actions.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileDoc", into = "ProfileDoc")]
pub struct PreferenceProfile {
    agent: String,
    actions: Vec<String>,
    preferences: Vec<String>,
    /// `effects[a][p]`: change to preference `p` if action `a` were done to
    /// this agent.
    effects: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    agent: String,
    preferences: Vec<String>,
    effects: BTreeMap<String, Vec<f64>>,
}

impl TryFrom<ProfileDoc> for PreferenceProfile {
    type Error = Error;

    fn try_from(doc: ProfileDoc) -> Result<Self> {
        let (actions, effects) = doc.effects.into_iter().unzip();
        PreferenceProfile::new(doc.agent, actions, doc.preferences, effects)
    }
}

impl From<PreferenceProfile> for ProfileDoc {
    fn from(p: PreferenceProfile) -> Self {
        ProfileDoc {
            agent: p.agent,
            preferences: p.preferences,
            effects: p.actions.into_iter().zip(p.effects).collect(),
        }
    }
}

impl PreferenceProfile {
    pub fn new(
        agent: impl Into<String>,
        actions: Vec<String>,
        preferences: Vec<String>,
        effects: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let agent = agent.into();
        if effects.len() != actions.len() {
            return Err(Error::Validation(format!(
                "profile of `{agent}` has {} effect rows for {} actions",
                effects.len(),
                actions.len()
            )));
        }
        if let Some((a, _)) = actions
            .iter()
            .zip(&effects)
            .find(|(_, row)| row.len() != preferences.len())
        {
            return Err(Error::Validation(format!(
                "profile of `{agent}`: action `{a}` does not cover all {} preferences",
                preferences.len()
            )));
        }
        for (i, a) in actions.iter().enumerate() {
            if actions[..i].contains(a) {
                return Err(Error::Validation(format!("profile of `{agent}` lists `{a}` twice")));
            }
        }
        if effects.iter().flatten().any(|d| !d.is_finite()) {
            return Err(Error::Validation(format!(
                "profile of `{agent}` has a non-finite delta"
            )));
        }
        Ok(PreferenceProfile {
            agent,
            actions,
            preferences,
            effects,
        })
    }

    pub fn agent(&self) -> &str {
        &self.agent
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn preferences(&self) -> &[String] {
        &self.preferences
    }

    fn row(&self, action: &str) -> Result<&[f64]> {
        self.actions
            .iter()
            .position(|a| a == action)
            .map(|i| self.effects[i].as_slice())
            .ok_or_else(|| Error::Domain(format!("`{}` has no entry for action `{action}`", self.agent)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub permissible: bool,
    pub inspections: u64,
}

/// Every delta is inspected; no early exit, so the count is exact.
fn accepts(row: &[f64], threshold: f64, inspections: &mut u64) -> bool {
    let mut ok = true;
    for &delta in row {
        *inspections += 1;
        ok &= delta >= threshold;
    }
    ok
}

/// GR1: the action is permissible iff the actor would accept it done to
/// themselves (`p` inspections).
pub fn gr1_permissible(action: &str, own: &PreferenceProfile, threshold: f64) -> Result<Verdict> {
    let mut inspections = 0;
    let permissible = accepts(own.row(action)?, threshold, &mut inspections);
    Ok(Verdict {
        permissible,
        inspections,
    })
}

fn check_homogeneous(others: &[PreferenceProfile]) -> Result<()> {
    let Some(first) = others.first() else {
        return Err(Error::Domain("no agents to consult".into()));
    };
    let p = first.preferences.len();
    if let Some(odd) = others.iter().find(|o| o.preferences.len() != p) {
        return Err(Error::Validation(format!(
            "`{}` has {} preferences, `{}` has {p}",
            odd.agent,
            odd.preferences.len(),
            first.agent
        )));
    }
    Ok(())
}

/// GR2: the action is permissible iff every agent accepts it under their
/// own profile (`p * o` inspections).
pub fn gr2_permissible(action: &str, others: &[PreferenceProfile], threshold: f64) -> Result<Verdict> {
    check_homogeneous(others)?;
    let mut inspections = 0;
    let mut permissible = true;
    for profile in others {
        permissible &= accepts(profile.row(action)?, threshold, &mut inspections);
    }
    Ok(Verdict {
        permissible,
        inspections,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Screening {
    /// `(action, permissible)` in the order of the actor's profile.
    pub verdicts: Vec<(String, bool)>,
    pub inspections: u64,
}

/// GR1 over every action of the profile (`n * p` inspections).
pub fn gr1_screen(own: &PreferenceProfile, threshold: f64) -> Result<Screening> {
    let mut inspections = 0;
    let mut verdicts = Vec::with_capacity(own.actions.len());
    for a in &own.actions {
        let v = gr1_permissible(a, own, threshold)?;
        inspections += v.inspections;
        verdicts.push((a.clone(), v.permissible));
    }
    Ok(Screening { verdicts, inspections })
}

/// GR2 over `actions` (`n * p * o` inspections).
pub fn gr2_screen(actions: &[String], others: &[PreferenceProfile], threshold: f64) -> Result<Screening> {
    let mut inspections = 0;
    let mut verdicts = Vec::with_capacity(actions.len());
    for a in actions {
        let v = gr2_permissible(a, others, threshold)?;
        inspections += v.inspections;
        verdicts.push((a.clone(), v.permissible));
    }
    Ok(Screening { verdicts, inspections })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Comparison {
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Comparison::Lt => lhs < rhs,
            Comparison::Le => lhs <= rhs,
            Comparison::Eq => lhs == rhs,
            Comparison::Ne => lhs != rhs,
            Comparison::Ge => lhs >= rhs,
            Comparison::Gt => lhs > rhs,
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Lt => "<",
            Comparison::Le => "<=",
            Comparison::Eq => "==",
            Comparison::Ne => "!=",
            Comparison::Ge => ">=",
            Comparison::Gt => ">",
        })
    }
}

/// A duty is respected when `attribute <op> value` holds. The attribute is
/// looked up on the action first, then on the state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Duty {
    pub name: String,
    pub attribute: String,
    pub op: Comparison,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DutySet {
    pub duties: Vec<Duty>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Action {
    pub name: String,
    #[serde(default)]
    pub attributes: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct State {
    pub attributes: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DutyReport {
    pub violated: Vec<String>,
    pub evaluations: u64,
}

impl DutyReport {
    pub fn permissible(&self) -> bool {
        self.violated.is_empty()
    }
}

/// Names of the duties `action` would violate in `state`. Each duty is
/// evaluated once; an attribute missing from both action and state is a
/// validation error.
pub fn check_duties(action: &Action, state: &State, duties: &DutySet) -> Result<DutyReport> {
    let mut violated = Vec::new();
    let mut evaluations = 0;
    for duty in &duties.duties {
        let lhs = action
            .attributes
            .get(&duty.attribute)
            .or_else(|| state.attributes.get(&duty.attribute))
            .ok_or_else(|| {
                Error::Validation(format!(
                    "duty `{}` reads `{}`, which neither action `{}` nor the state defines",
                    duty.name, duty.attribute, action.name
                ))
            })?;
        evaluations += 1;
        if !duty.op.holds(*lhs, duty.value) {
            violated.push(duty.name.clone());
        }
    }
    Ok(DutyReport { violated, evaluations })
}

/// [`check_duties`] for every action (`d * n` evaluations).
pub fn screen_duties(actions: &[Action], state: &State, duties: &DutySet) -> Result<(Vec<(String, DutyReport)>, u64)> {
    let mut total = 0;
    let mut reports = Vec::with_capacity(actions.len());
    for a in actions {
        let r = check_duties(a, state, duties)?;
        total += r.evaluations;
        reports.push((a.name.clone(), r));
    }
    Ok((reports, total))
}

/// The judge-and-prison scenario as preference profiles.
///
/// The judge, imagining being imprisoned, loses liberty, so GR1 forbids
/// sentencing. Under GR2 each affected party is consulted in their own role:
/// the victim and the public gain safety, and the convicted citizen's
/// profile reflects their stake in a lawful, fair process rather than a
/// wish to avoid prison at any cost.
pub fn judge_scenario() -> (PreferenceProfile, Vec<PreferenceProfile>) {
    let actions = vec!["imprison".to_string(), "release".to_string()];
    let prefs = vec!["liberty".to_string(), "safety".to_string(), "fair process".to_string()];
    let judge = PreferenceProfile::new(
        "judge",
        actions.clone(),
        prefs.clone(),
        vec![vec![-8.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]],
    )
    .expect("static profile");
    let victim = PreferenceProfile::new(
        "victim",
        actions.clone(),
        prefs.clone(),
        vec![vec![0.0, 6.0, 2.0], vec![0.0, -6.0, -2.0]],
    )
    .expect("static profile");
    let public = PreferenceProfile::new(
        "public",
        actions.clone(),
        prefs.clone(),
        vec![vec![0.0, 3.0, 1.0], vec![0.0, -3.0, -1.0]],
    )
    .expect("static profile");
    let convicted = PreferenceProfile::new(
        "convicted citizen",
        actions,
        prefs,
        vec![vec![0.0, 1.0, 1.0], vec![0.0, 0.0, -1.0]],
    )
    .expect("static profile");
    (judge, vec![victim, public, convicted])
}
