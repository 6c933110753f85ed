use std::collections::BTreeSet;

use super::factor::{EliminationStats, Factor};
use super::{BayesNet, Evidence};
use crate::{Error, Limits, Result};

/// How variables are picked for elimination.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum EliminationOrder {
    /// Fewest neighbours in the current interaction graph first; ties go to
    /// the lowest variable index.
    #[default]
    MinDegree,
    /// Fixed sequence of variable indices. Variables that do not need
    /// eliminating are skipped; ones left out are eliminated afterwards by
    /// min-degree.
    Fixed(Vec<usize>),
}

/// Exact posterior over a list of target variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub targets: Vec<String>,
    /// Entry `i` is the probability of the assignment where `targets[k]` is
    /// true iff bit `k` of `i` is set.
    pub probabilities: Vec<f64>,
    /// `P(evidence)`.
    pub evidence_probability: f64,
    pub stats: EliminationStats,
}

impl Posterior {
    /// Probability that the first target is true. Handy for single-target
    /// queries.
    pub fn p_true(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(i, _)| i & 1 == 1)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn probability_of(&self, assignment: &[bool]) -> f64 {
        let idx = assignment
            .iter()
            .enumerate()
            .filter(|(_, &v)| v)
            .fold(0usize, |acc, (k, _)| acc | (1 << k));
        self.probabilities[idx]
    }
}

/// A most probable assignment to some variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    /// In network variable order.
    pub assignment: Vec<(String, bool)>,
    /// For [`mpe`]: the joint probability of the evidence together with the
    /// assignment. For [`map_query`]: the probability of the assignment
    /// conditioned on the evidence.
    pub probability: f64,
    pub stats: EliminationStats,
}

#[derive(Clone, Copy)]
enum Combine {
    Sum,
    Max,
}

fn initial_factors(net: &BayesNet, values: &[Option<bool>]) -> Vec<Factor> {
    (0..net.len())
        .map(|v| {
            let mut f = Factor::from_cpt(net, v);
            for (var, value) in values.iter().enumerate() {
                if let Some(value) = value {
                    if f.contains(var) {
                        f = f.reduce(var, *value);
                    }
                }
            }
            f
        })
        .collect()
}

fn min_degree_var(factors: &[Factor], candidates: &BTreeSet<usize>) -> usize {
    let mut best = None;
    for &var in candidates {
        let neighbours: BTreeSet<usize> = factors
            .iter()
            .filter(|f| f.contains(var))
            .flat_map(|f| f.scope().iter().copied())
            .filter(|&v| v != var)
            .collect();
        let degree = neighbours.len();
        if best.is_none_or(|(_, d)| degree < d) {
            best = Some((var, degree));
        }
    }
    best.expect("non-empty candidate set").0
}

/// Eliminate `to_eliminate` from `factors`. When `trace` is given, each
/// eliminated variable is recorded with the product it was eliminated from.
fn eliminate(
    mut factors: Vec<Factor>,
    mut to_eliminate: BTreeSet<usize>,
    order: &EliminationOrder,
    combine: Combine,
    stats: &mut EliminationStats,
    mut trace: Option<&mut Vec<(usize, Factor)>>,
) -> Vec<Factor> {
    let mut fixed = match order {
        EliminationOrder::MinDegree => Vec::new(),
        EliminationOrder::Fixed(seq) => seq.clone(),
    }
    .into_iter();
    while !to_eliminate.is_empty() {
        let var = loop {
            match fixed.next() {
                Some(v) if to_eliminate.contains(&v) => break v,
                Some(_) => continue,
                None => break min_degree_var(&factors, &to_eliminate),
            }
        };
        to_eliminate.remove(&var);
        let (with, without): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.contains(var));
        factors = without;
        let mut iter = with.into_iter();
        let Some(first) = iter.next() else { continue };
        let joint = iter.fold(first, |acc, f| acc.product(&f, stats));
        let reduced = match combine {
            Combine::Sum => joint.sum_out(var),
            Combine::Max => joint.max_out(var),
        };
        if let Some(trace) = trace.as_deref_mut() {
            trace.push((var, joint));
        }
        factors.push(reduced);
    }
    factors
}

fn multiply_all(factors: Vec<Factor>, stats: &mut EliminationStats) -> Factor {
    factors
        .into_iter()
        .reduce(|acc, f| acc.product(&f, stats))
        .unwrap_or_else(|| Factor::constant(1.0))
}

fn resolve_targets(net: &BayesNet, targets: &[&str], values: &[Option<bool>]) -> Result<Vec<usize>> {
    let mut indices = Vec::with_capacity(targets.len());
    for name in targets {
        let i = net.index_of(name)?;
        if indices.contains(&i) {
            return Err(Error::Domain(format!("`{name}` listed twice")));
        }
        if values[i].is_some() {
            return Err(Error::Domain(format!("`{name}` is both a target and evidence")));
        }
        indices.push(i);
    }
    Ok(indices)
}

/// Posterior over `targets` given `evidence` by sum-product variable
/// elimination with the min-degree ordering.
pub fn query(net: &BayesNet, targets: &[&str], evidence: &Evidence) -> Result<Posterior> {
    query_with_order(net, targets, evidence, &EliminationOrder::MinDegree)
}

pub fn query_with_order(
    net: &BayesNet,
    targets: &[&str],
    evidence: &Evidence,
    order: &EliminationOrder,
) -> Result<Posterior> {
    let values = evidence.resolve(net)?;
    let target_idx = resolve_targets(net, targets, &values)?;
    let hidden: BTreeSet<usize> = (0..net.len())
        .filter(|v| values[*v].is_none() && !target_idx.contains(v))
        .collect();

    let mut stats = EliminationStats::default();
    let remaining = eliminate(
        initial_factors(net, &values),
        hidden,
        order,
        Combine::Sum,
        &mut stats,
        None,
    );
    let joint = multiply_all(remaining, &mut stats);

    let z = joint.total();
    if z.is_nan() || z <= 0.0 {
        return Err(Error::ZeroEvidence);
    }
    let mut scratch = vec![false; net.len()];
    let probabilities = (0..1usize << target_idx.len())
        .map(|i| {
            for (k, &v) in target_idx.iter().enumerate() {
                scratch[v] = i & (1 << k) != 0;
            }
            joint.value_at(&scratch) / z
        })
        .collect();
    Ok(Posterior {
        targets: targets.iter().map(|s| s.to_string()).collect(),
        probabilities,
        evidence_probability: z,
        stats,
    })
}

/// Most probable completion of every unobserved variable, by max-product
/// elimination and traceback. Ties prefer `false`.
pub fn mpe(net: &BayesNet, evidence: &Evidence) -> Result<Explanation> {
    let values = evidence.resolve(net)?;
    let free: BTreeSet<usize> = (0..net.len()).filter(|v| values[*v].is_none()).collect();

    let mut stats = EliminationStats::default();
    let mut trace = Vec::with_capacity(free.len());
    let remaining = eliminate(
        initial_factors(net, &values),
        free.clone(),
        &EliminationOrder::MinDegree,
        Combine::Max,
        &mut stats,
        Some(&mut trace),
    );
    let probability = multiply_all(remaining, &mut stats).total();
    if probability.is_nan() || probability <= 0.0 {
        return Err(Error::ZeroEvidence);
    }

    let mut assignment: Vec<bool> = values.iter().map(|v| v.unwrap_or(false)).collect();
    for (var, factor) in trace.iter().rev() {
        assignment[*var] = false;
        let off = factor.value_at(&assignment);
        assignment[*var] = true;
        let on = factor.value_at(&assignment);
        assignment[*var] = on > off;
    }
    Ok(Explanation {
        assignment: free
            .iter()
            .map(|&v| (net.variables()[v].clone(), assignment[v]))
            .collect(),
        probability,
        stats,
    })
}

/// Most probable assignment of `query_vars` given partial `evidence`, with
/// every other variable summed out. The full posterior table over the query
/// set is scanned, so this is exponential in the query size and refuses
/// networks above the configured variable cap. Ties go to the assignment
/// with the smaller index (bit `k` = `query_vars[k]`).
pub fn map_query(net: &BayesNet, query_vars: &[&str], evidence: &Evidence, limits: &Limits) -> Result<Explanation> {
    if net.len() > limits.bayes_variables {
        return Err(Error::cap(
            format!("MAP over a {}-variable network", net.len()),
            1u128.checked_shl(query_vars.len() as u32),
            1u128 << limits.bayes_variables.min(127),
        ));
    }
    let posterior = query(net, query_vars, evidence)?;
    let mut best = 0;
    for (i, &p) in posterior.probabilities.iter().enumerate() {
        if p > posterior.probabilities[best] {
            best = i;
        }
    }
    let mut assignment: Vec<(usize, String, bool)> = query_vars
        .iter()
        .enumerate()
        .map(|(k, name)| Ok((net.index_of(name)?, name.to_string(), best & (1 << k) != 0)))
        .collect::<Result<_>>()?;
    assignment.sort_by_key(|(i, _, _)| *i);
    Ok(Explanation {
        assignment: assignment.into_iter().map(|(_, n, v)| (n, v)).collect(),
        probability: posterior.probabilities[best],
        stats: posterior.stats,
    })
}
