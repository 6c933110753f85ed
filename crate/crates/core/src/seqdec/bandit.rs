use serde::{Deserialize, Serialize};

use crate::games::nash::combinations;
use crate::{Error, Limits, Result};

/// One arm: a deterministic state machine with separate transitions for
/// played and rested steps. Reward is collected from the state an arm is in
/// when played.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BanditArm {
    pub initial: usize,
    pub rewards: Vec<f64>,
    /// 0/1 matrix, one 1 per row.
    pub played: Vec<Vec<u8>>,
    pub rested: Vec<Vec<u8>>,
}

impl BanditArm {
    fn successor(table: &[Vec<u8>], state: usize) -> usize {
        table[state].iter().position(|&x| x == 1).expect("validated row")
    }

    fn validate(&self, index: usize) -> Result<()> {
        let n = self.rewards.len();
        if n == 0 || self.initial >= n {
            return Err(Error::Validation(format!("arm {index}: initial state out of range")));
        }
        for (name, table) in [("played", &self.played), ("rested", &self.rested)] {
            if table.len() != n || table.iter().any(|row| row.len() != n) {
                return Err(Error::Validation(format!(
                    "arm {index}: {name} table must be {n} x {n}"
                )));
            }
            for row in table {
                if row.iter().any(|&x| x > 1) || row.iter().filter(|&&x| x == 1).count() != 1 {
                    return Err(Error::Validation(format!(
                        "arm {index}: {name} rows must hold a single 1 and otherwise 0"
                    )));
                }
            }
        }
        if self.rewards.iter().any(|r| !r.is_finite()) {
            return Err(Error::Validation(format!("arm {index}: rewards must be finite")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BanditDoc", into = "BanditDoc")]
pub struct RestlessBanditInstance {
    arms: Vec<BanditArm>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BanditDoc {
    arms: Vec<BanditArm>,
}

impl TryFrom<BanditDoc> for RestlessBanditInstance {
    type Error = Error;

    fn try_from(doc: BanditDoc) -> Result<Self> {
        RestlessBanditInstance::new(doc.arms)
    }
}

impl From<RestlessBanditInstance> for BanditDoc {
    fn from(i: RestlessBanditInstance) -> Self {
        BanditDoc { arms: i.arms }
    }
}

impl RestlessBanditInstance {
    pub fn new(arms: Vec<BanditArm>) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::Validation("a bandit needs at least one arm".into()));
        }
        for (i, arm) in arms.iter().enumerate() {
            arm.validate(i)?;
        }
        Ok(RestlessBanditInstance { arms })
    }

    pub fn arms(&self) -> &[BanditArm] {
        &self.arms
    }

    /// Two arms that wear out when played and recover when rested.
    pub fn exhaustion_pair() -> Self {
        let arm = BanditArm {
            initial: 0,
            rewards: vec![3.0, 1.0],
            played: vec![vec![0, 1], vec![0, 1]],
            rested: vec![vec![1, 0], vec![1, 0]],
        };
        RestlessBanditInstance::new(vec![arm.clone(), arm]).expect("valid instance")
    }

    /// Total reward of playing the listed arms at each step.
    pub fn simulate(&self, schedule: &[Vec<usize>]) -> Result<f64> {
        let mut states: Vec<usize> = self.arms.iter().map(|a| a.initial).collect();
        let mut total = 0.0;
        let mut active = vec![false; self.arms.len()];
        for (step, chosen) in schedule.iter().enumerate() {
            active.iter_mut().for_each(|x| *x = false);
            for &arm in chosen {
                if arm >= self.arms.len() || active[arm] {
                    return Err(Error::Validation(format!("step {step}: bad or repeated arm {arm}")));
                }
                active[arm] = true;
            }
            total += self.step(&mut states, &active);
        }
        Ok(total)
    }

    fn step(&self, states: &mut [usize], active: &[bool]) -> f64 {
        let mut reward = 0.0;
        for (k, arm) in self.arms.iter().enumerate() {
            if active[k] {
                reward += arm.rewards[states[k]];
                states[k] = BanditArm::successor(&arm.played, states[k]);
            } else {
                states[k] = BanditArm::successor(&arm.rested, states[k]);
            }
        }
        reward
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BanditPlan {
    /// Arms played at each step.
    pub schedule: Vec<Vec<usize>>,
    pub total_reward: f64,
    pub sequences_evaluated: u128,
}

/// Best schedule playing exactly `played_per_step` arms at each of
/// `horizon` steps, by scoring every schedule. Ties keep the
/// lexicographically first.
pub fn restless_bandit_brute(
    instance: &RestlessBanditInstance,
    played_per_step: usize,
    horizon: usize,
    limits: &Limits,
) -> Result<BanditPlan> {
    let k = instance.arms.len();
    if played_per_step == 0 || played_per_step > k {
        return Err(Error::Domain(format!(
            "cannot play {played_per_step} of {k} arms per step"
        )));
    }
    if horizon == 0 {
        return Err(Error::Domain("horizon must be at least 1".into()));
    }
    let choices = combinations(k, played_per_step);
    let predicted = u32::try_from(horizon)
        .ok()
        .and_then(|h| (choices.len() as u128).checked_pow(h));
    if predicted.is_none_or(|c| c > limits.bandit_sequences) {
        return Err(Error::cap(
            format!("activation schedules for {k} arms, {played_per_step} per step, horizon {horizon}"),
            predicted,
            limits.bandit_sequences,
        ));
    }
    let masks: Vec<Vec<bool>> = choices
        .iter()
        .map(|c| (0..k).map(|arm| c.contains(&arm)).collect())
        .collect();

    let mut digits = vec![0usize; horizon];
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut evaluated: u128 = 0;
    let initial: Vec<usize> = instance.arms.iter().map(|a| a.initial).collect();
    loop {
        let mut states = initial.clone();
        let total: f64 = digits.iter().map(|&d| instance.step(&mut states, &masks[d])).sum();
        evaluated += 1;
        if best.as_ref().is_none_or(|(b, _)| total > *b) {
            best = Some((total, digits.clone()));
        }
        if !next(&mut digits, choices.len()) {
            break;
        }
    }
    let (total_reward, picks) = best.expect("at least one schedule");
    Ok(BanditPlan {
        schedule: picks.into_iter().map(|d| choices[d].clone()).collect(),
        total_reward,
        sequences_evaluated: evaluated,
    })
}

fn next(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}
