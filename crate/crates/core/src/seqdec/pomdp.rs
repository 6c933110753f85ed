use super::{BeliefState, PartiallyObservableMdp};
use crate::{Error, Limits, Result};

/// Number of depth-`horizon` policy trees: `actions^nodes`, where a tree has
/// `(observations^horizon - 1) / (observations - 1)` decision nodes. `None`
/// when the count does not fit in a `u128`.
pub fn policy_tree_count(actions: u64, observations: u64, horizon: u32) -> Option<u128> {
    let nodes = tree_nodes(observations, horizon)?;
    let nodes = u32::try_from(nodes).ok();
    match (actions, nodes) {
        (0, _) => Some(if horizon == 0 { 1 } else { 0 }),
        (1, _) => Some(1),
        (_, Some(n)) => (actions as u128).checked_pow(n),
        (_, None) => None,
    }
}

fn tree_nodes(observations: u64, horizon: u32) -> Option<u128> {
    let mut nodes: u128 = 0;
    let mut level: u128 = 1;
    for depth in 0..horizon {
        nodes = nodes.checked_add(level)?;
        if depth + 1 < horizon {
            level = level.checked_mul(observations as u128)?;
        }
    }
    Some(nodes)
}

/// A conditional plan stored level by level: node 0 is the root, and the
/// child of node `i` (within its level) under observation `o` is node
/// `i * |observations| + o` of the next level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyTree {
    pub horizon: usize,
    pub branching: usize,
    pub actions: Vec<usize>,
}

impl PolicyTree {
    fn level_start(&self, depth: usize) -> usize {
        (0..depth).map(|d| self.branching.pow(d as u32)).sum()
    }

    /// Action taken after the given observation history.
    pub fn action_after(&self, history: &[usize]) -> usize {
        let within = history.iter().fold(0, |i, &o| i * self.branching + o);
        self.actions[self.level_start(history.len()) + within]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PomdpSolution {
    pub value: f64,
    pub trees_evaluated: u128,
    pub best_tree: PolicyTree,
}

/// Exact finite-horizon optimum from `initial` by scoring every policy tree.
/// Each tree is scored through its alpha vector, so observations that cannot
/// occur simply carry zero weight.
#[allow(clippy::needless_range_loop)]
pub fn pomdp_finite_horizon(
    pomdp: &PartiallyObservableMdp,
    initial: &BeliefState,
    horizon: usize,
    limits: &Limits,
) -> Result<PomdpSolution> {
    let mdp = pomdp.mdp();
    let (n_s, n_a, n_o) = (mdp.states().len(), mdp.actions().len(), pomdp.observations().len());
    if horizon == 0 {
        return Err(Error::Domain("horizon must be at least 1".into()));
    }
    if initial.probabilities().len() != n_s {
        return Err(Error::Validation(format!(
            "belief has {} entries for {n_s} states",
            initial.probabilities().len()
        )));
    }
    let predicted = u32::try_from(horizon)
        .ok()
        .and_then(|h| policy_tree_count(n_a as u64, n_o as u64, h));
    if predicted.is_none_or(|count| count > limits.pomdp_trees) {
        return Err(Error::cap(
            format!("policy trees for {n_a} actions, {n_o} observations, horizon {horizon}"),
            predicted,
            limits.pomdp_trees,
        ));
    }

    let level_sizes: Vec<usize> = (0..horizon).map(|d| n_o.pow(d as u32)).collect();
    let nodes: usize = level_sizes.iter().sum();
    let mut starts = vec![0; horizon];
    for d in 1..horizon {
        starts[d] = starts[d - 1] + level_sizes[d - 1];
    }

    let gamma = mdp.discount();
    let mut actions = vec![0usize; nodes];
    let mut alpha = vec![vec![0.0; n_s]; nodes];
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut evaluated: u128 = 0;
    loop {
        for depth in (0..horizon).rev() {
            for i in 0..level_sizes[depth] {
                let node = starts[depth] + i;
                let a = actions[node];
                let mut vector = vec![0.0; n_s];
                for (s, slot) in vector.iter_mut().enumerate() {
                    let mut total = 0.0;
                    for s2 in 0..n_s {
                        let p = mdp.transition(s, a, s2);
                        if p == 0.0 {
                            continue;
                        }
                        let mut future = 0.0;
                        if depth + 1 < horizon {
                            for o in 0..n_o {
                                let child = starts[depth + 1] + i * n_o + o;
                                future += pomdp.observation_probability(a, s2, o) * alpha[child][s2];
                            }
                        }
                        total += p * (mdp.reward(s, a, s2) + gamma * future);
                    }
                    *slot = total;
                }
                alpha[node] = vector;
            }
        }
        evaluated += 1;
        let value: f64 = initial.probabilities().iter().zip(&alpha[0]).map(|(b, v)| b * v).sum();
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, actions.clone()));
        }
        if !advance(&mut actions, n_a) {
            break;
        }
    }
    let (value, tree) = best.expect("at least one tree is scored");
    Ok(PomdpSolution {
        value,
        trees_evaluated: evaluated,
        best_tree: PolicyTree {
            horizon,
            branching: n_o,
            actions: tree,
        },
    })
}

/// Mixed-radix increment with the last digit fastest. False on wrap-around.
fn advance(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}
