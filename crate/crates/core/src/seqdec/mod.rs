//! Sequential decisions: MDPs, finite-horizon POMDPs and restless bandits.
//!
//! The objective throughout is expected discounted reward. Rewards are
//! transition-dependent, `R(s, a, s')`; files may also give `R(s, a)`,
//! which is expanded to every successor.

mod bandit;
mod mdp;
mod pomdp;

pub use bandit::{restless_bandit_brute, BanditArm, BanditPlan, RestlessBanditInstance};
pub use mdp::{contraction_bound, evaluate_policy, finite_horizon, value_iteration, FiniteHorizon, ValueIteration};
pub use pomdp::{policy_tree_count, pomdp_finite_horizon, PolicyTree, PomdpSolution};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, PROBABILITY_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MdpDoc", into = "MdpDoc")]
pub struct MarkovDecisionProcess {
    states: Vec<String>,
    actions: Vec<String>,
    /// `transition[s][a][s']`.
    transition: Vec<Vec<Vec<f64>>>,
    /// `reward[s][a][s']`.
    reward: Vec<Vec<Vec<f64>>>,
    discount: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RewardDoc {
    Transition(Vec<Vec<Vec<f64>>>),
    StateAction(Vec<Vec<f64>>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MdpDoc {
    states: Vec<String>,
    actions: Vec<String>,
    discount: f64,
    transition: Vec<Vec<Vec<f64>>>,
    reward: RewardDoc,
}

impl TryFrom<MdpDoc> for MarkovDecisionProcess {
    type Error = Error;

    fn try_from(doc: MdpDoc) -> Result<Self> {
        let n = doc.states.len();
        let reward = match doc.reward {
            RewardDoc::Transition(r) => r,
            RewardDoc::StateAction(r) => r
                .into_iter()
                .map(|row| row.into_iter().map(|v| vec![v; n]).collect())
                .collect(),
        };
        MarkovDecisionProcess::new(doc.states, doc.actions, doc.transition, reward, doc.discount)
    }
}

impl From<MarkovDecisionProcess> for MdpDoc {
    fn from(m: MarkovDecisionProcess) -> Self {
        MdpDoc {
            states: m.states,
            actions: m.actions,
            discount: m.discount,
            transition: m.transition,
            reward: RewardDoc::Transition(m.reward),
        }
    }
}

fn check_shape(name: &str, table: &[Vec<Vec<f64>>], n_s: usize, n_a: usize) -> Result<()> {
    let ok = table.len() == n_s
        && table
            .iter()
            .all(|row| row.len() == n_a && row.iter().all(|r| r.len() == n_s));
    if ok {
        Ok(())
    } else {
        Err(Error::Validation(format!("{name} table must be {n_s} x {n_a} x {n_s}")))
    }
}

pub(crate) fn check_distribution(what: &str, row: &[f64]) -> Result<()> {
    if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::Validation(format!("{what} has an entry outside [0, 1]")));
    }
    let total: f64 = row.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(Error::Validation(format!("{what} sums to {total}, not 1")));
    }
    Ok(())
}

impl MarkovDecisionProcess {
    pub fn new(
        states: Vec<String>,
        actions: Vec<String>,
        transition: Vec<Vec<Vec<f64>>>,
        reward: Vec<Vec<Vec<f64>>>,
        discount: f64,
    ) -> Result<Self> {
        let (n_s, n_a) = (states.len(), actions.len());
        if n_s == 0 || n_a == 0 {
            return Err(Error::Validation(
                "an MDP needs at least one state and one action".into(),
            ));
        }
        if !(0.0..=1.0).contains(&discount) {
            return Err(Error::Validation(format!("discount {discount} outside [0, 1]")));
        }
        check_shape("transition", &transition, n_s, n_a)?;
        check_shape("reward", &reward, n_s, n_a)?;
        for (s, rows) in transition.iter().enumerate() {
            for (a, row) in rows.iter().enumerate() {
                check_distribution(&format!("P(. | {}, {})", states[s], actions[a]), row)?;
            }
        }
        if reward.iter().flatten().flatten().any(|r| !r.is_finite()) {
            return Err(Error::Validation("rewards must be finite".into()));
        }
        Ok(MarkovDecisionProcess {
            states,
            actions,
            transition,
            reward,
            discount,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn with_discount(&self, discount: f64) -> Result<Self> {
        MarkovDecisionProcess::new(
            self.states.clone(),
            self.actions.clone(),
            self.transition.clone(),
            self.reward.clone(),
            discount,
        )
    }

    pub fn transition(&self, s: usize, a: usize, next: usize) -> f64 {
        self.transition[s][a][next]
    }

    pub fn reward(&self, s: usize, a: usize, next: usize) -> f64 {
        self.reward[s][a][next]
    }

    pub fn set_reward(&mut self, s: usize, a: usize, next: usize, value: f64) {
        self.reward[s][a][next] = value;
    }

    /// `sum_s' P(s'|s,a) R(s,a,s')`.
    pub fn expected_reward(&self, s: usize, a: usize) -> f64 {
        self.transition[s][a]
            .iter()
            .zip(&self.reward[s][a])
            .map(|(p, r)| p * r)
            .sum()
    }

    /// `sum_s' P(s'|s,a) (R(s,a,s') + discount * values[s'])`.
    pub fn q_value(&self, s: usize, a: usize, values: &[f64]) -> f64 {
        self.transition[s][a]
            .iter()
            .zip(&self.reward[s][a])
            .zip(values)
            .map(|((p, r), v)| p * (r + self.discount * v))
            .sum()
    }

    /// Largest absolute reward entry.
    pub fn max_abs_reward(&self) -> f64 {
        self.reward.iter().flatten().flatten().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Absorbing under every action with zero reward.
    pub fn is_terminal(&self, s: usize) -> bool {
        (0..self.actions.len()).all(|a| self.transition[s][a][s] == 1.0 && self.reward[s][a][s] == 0.0)
    }

    pub fn has_terminal_state(&self) -> bool {
        (0..self.states.len()).any(|s| self.is_terminal(s))
    }
}

/// Stationary deterministic policy: one action index per state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy(pub Vec<usize>);

impl Policy {
    pub fn new(mdp: &MarkovDecisionProcess, actions: Vec<usize>) -> Result<Self> {
        if actions.len() != mdp.states.len() {
            return Err(Error::Validation("a policy needs one action per state".into()));
        }
        if actions.iter().any(|&a| a >= mdp.actions.len()) {
            return Err(Error::Validation("policy names an unknown action".into()));
        }
        Ok(Policy(actions))
    }

    pub fn action(&self, s: usize) -> usize {
        self.0[s]
    }
}

/// An MDP whose state is seen only through noisy observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PomdpDoc", into = "PomdpDoc")]
pub struct PartiallyObservableMdp {
    mdp: MarkovDecisionProcess,
    observations: Vec<String>,
    /// `observation[a][s'][o]` = `O(o | s', a)`.
    observation: Vec<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PomdpDoc {
    #[serde(flatten)]
    mdp: MdpFields,
    observations: Vec<String>,
    observation: Vec<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct MdpFields {
    states: Vec<String>,
    actions: Vec<String>,
    discount: f64,
    transition: Vec<Vec<Vec<f64>>>,
    reward: RewardDoc,
}

impl TryFrom<PomdpDoc> for PartiallyObservableMdp {
    type Error = Error;

    fn try_from(doc: PomdpDoc) -> Result<Self> {
        let m = doc.mdp;
        let mdp = MarkovDecisionProcess::try_from(MdpDoc {
            states: m.states,
            actions: m.actions,
            discount: m.discount,
            transition: m.transition,
            reward: m.reward,
        })?;
        PartiallyObservableMdp::new(mdp, doc.observations, doc.observation)
    }
}

impl From<PartiallyObservableMdp> for PomdpDoc {
    fn from(p: PartiallyObservableMdp) -> Self {
        let m = MdpDoc::from(p.mdp);
        PomdpDoc {
            mdp: MdpFields {
                states: m.states,
                actions: m.actions,
                discount: m.discount,
                transition: m.transition,
                reward: m.reward,
            },
            observations: p.observations,
            observation: p.observation,
        }
    }
}

impl PartiallyObservableMdp {
    pub fn new(mdp: MarkovDecisionProcess, observations: Vec<String>, observation: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let (n_s, n_a, n_o) = (mdp.states.len(), mdp.actions.len(), observations.len());
        if n_o == 0 {
            return Err(Error::Validation("a POMDP needs at least one observation".into()));
        }
        let ok = observation.len() == n_a
            && observation
                .iter()
                .all(|rows| rows.len() == n_s && rows.iter().all(|r| r.len() == n_o));
        if !ok {
            return Err(Error::Validation(format!(
                "observation table must be {n_a} x {n_s} x {n_o}"
            )));
        }
        for (a, rows) in observation.iter().enumerate() {
            for (s, row) in rows.iter().enumerate() {
                check_distribution(&format!("O(. | {}, {})", mdp.states[s], mdp.actions[a]), row)?;
            }
        }
        Ok(PartiallyObservableMdp {
            mdp,
            observations,
            observation,
        })
    }

    /// The MDP with each state announced exactly as its own observation.
    pub fn fully_observable(mdp: MarkovDecisionProcess) -> Self {
        let n_s = mdp.states.len();
        let identity: Vec<Vec<f64>> = (0..n_s)
            .map(|s| (0..n_s).map(|o| if s == o { 1.0 } else { 0.0 }).collect())
            .collect();
        let observation = vec![identity; mdp.actions.len()];
        let observations = mdp.states.clone();
        PartiallyObservableMdp::new(mdp, observations, observation).expect("identity observations are valid")
    }

    pub fn mdp(&self) -> &MarkovDecisionProcess {
        &self.mdp
    }

    pub fn observations(&self) -> &[String] {
        &self.observations
    }

    pub fn observation_probability(&self, a: usize, next: usize, o: usize) -> f64 {
        self.observation[a][next][o]
    }
}

/// Probability distribution over states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefState(Vec<f64>);

impl BeliefState {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Validation("empty belief".into()));
        }
        check_distribution("belief", &probs)?;
        Ok(BeliefState(probs))
    }

    pub fn point(n: usize, s: usize) -> Self {
        BeliefState((0..n).map(|i| if i == s { 1.0 } else { 0.0 }).collect())
    }

    pub fn uniform(n: usize) -> Self {
        BeliefState(vec![1.0 / n as f64; n])
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    /// Belief after taking `a` and seeing `o`, renormalized. `None` when the
    /// observation is impossible from this belief.
    pub fn update(&self, pomdp: &PartiallyObservableMdp, a: usize, o: usize) -> Option<BeliefState> {
        let n = self.0.len();
        let mut next: Vec<f64> = (0..n)
            .map(|s2| {
                let reach: f64 = (0..n).map(|s| self.0[s] * pomdp.mdp.transition(s, a, s2)).sum();
                reach * pomdp.observation_probability(a, s2, o)
            })
            .collect();
        let z: f64 = next.iter().sum();
        if z <= 0.0 {
            return None;
        }
        next.iter_mut().for_each(|p| *p /= z);
        Some(BeliefState(next))
    }
}
