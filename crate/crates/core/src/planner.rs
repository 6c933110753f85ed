//! Consequentialist planning over a metered value oracle.
//!
//! Four problems of increasing size are solved exactly by exhaustive search:
//!
//! | solver      | search space                               | oracle calls          |
//! |-------------|--------------------------------------------|-----------------------|
//! | [`solve_c1`] | single actions                            | `n`                   |
//! | [`solve_c2`] | single actions, `i` additive values       | `n * i`               |
//! | [`solve_c3`] | plans of at most two distinct actions     | `n(n+1)/2` or `n^2`   |
//! | [`solve_c4`] | plans of any size                         | `2^n - 1` or `floor(e n!) - 1` |
//!
//! The second figure in the last two rows applies when the order of actions
//! matters. [`predicted_calls`] returns the exact closed forms, and the
//! counter in [`MeteredOracle`] must agree with them on every run.
//!
//! The running maximum starts at negative infinity, so environments where
//! every action has a negative value still return their best action rather
//! than a default index. Ties keep the first maximizer in enumeration order.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use crate::{Error, Limits, Result};

/// A non-empty set or sequence of distinct action indices.
///
/// Unordered plans are stored in ascending index order, so two unordered
/// plans over the same actions compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Plan {
    steps: Vec<usize>,
    ordered: bool,
}

impl Plan {
    pub fn new(mut steps: Vec<usize>, ordered: bool) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::Domain("a plan needs at least one action".into()));
        }
        let mut seen = HashSet::with_capacity(steps.len());
        if let Some(dup) = steps.iter().find(|s| !seen.insert(**s)) {
            return Err(Error::Domain(format!("action {dup} appears twice in the plan")));
        }
        if !ordered {
            steps.sort_unstable();
        }
        Ok(Plan { steps, ordered })
    }

    pub fn single(index: usize) -> Self {
        Plan {
            steps: vec![index],
            ordered: false,
        }
    }

    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn ordered(&self) -> bool {
        self.ordered
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Comma-joined index sequence, the key format of environment files.
    pub fn key(&self) -> String {
        plan_key(&self.steps)
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.ordered { ">" } else { "+" };
        let parts: Vec<String> = self.steps.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(sep))
    }
}

fn plan_key(steps: &[usize]) -> String {
    let parts: Vec<String> = steps.iter().map(|s| s.to_string()).collect();
    parts.join(",")
}

pub type ValueFn = Box<dyn Fn(&Plan) -> f64 + Send + Sync>;

/// Black-box plan valuation with a call counter.
///
/// The counter increases by exactly one per [`MeteredOracle::evaluate`] and
/// only goes down through [`MeteredOracle::reset`]. It is owned by the
/// instance, so concurrent experiments need one oracle each.
pub struct MeteredOracle {
    value_fn: ValueFn,
    calls: u64,
}

impl fmt::Debug for MeteredOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeteredOracle")
            .field("calls", &self.calls)
            .finish_non_exhaustive()
    }
}

impl MeteredOracle {
    pub fn new(value_fn: impl Fn(&Plan) -> f64 + Send + Sync + 'static) -> Self {
        MeteredOracle {
            value_fn: Box::new(value_fn),
            calls: 0,
        }
    }

    /// Additive oracle: a plan is worth the sum of its actions' values,
    /// regardless of order.
    pub fn additive(values: Vec<f64>) -> Self {
        MeteredOracle::new(move |plan| plan.steps().iter().map(|&i| values[i]).sum())
    }

    /// Pseudo-random integer values in `[-50, 50]` keyed on the step
    /// sequence. Order-sensitive: `0,1` and `1,0` get independent values.
    /// Unordered plans are valued as their ascending sequence.
    pub fn seeded(seed: u64) -> Self {
        MeteredOracle::new(move |plan| hashed_value(seed, plan.steps()))
    }

    /// Like [`MeteredOracle::seeded`] but invariant under permutation of the
    /// plan's steps.
    pub fn seeded_symmetric(seed: u64) -> Self {
        MeteredOracle::new(move |plan| {
            let mut steps = plan.steps().to_vec();
            steps.sort_unstable();
            hashed_value(seed, &steps)
        })
    }

    pub fn evaluate(&mut self, plan: &Plan) -> f64 {
        self.calls += 1;
        (self.value_fn)(plan)
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn reset(&mut self) {
        self.calls = 0;
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn hashed_value(seed: u64, steps: &[usize]) -> f64 {
    let h = steps
        .iter()
        .fold(splitmix64(seed), |acc, &s| splitmix64(acc ^ (s as u64 + 1)));
    (h % 101) as f64 - 50.0
}

/// The actions on offer together with the oracle that values plans of them.
#[derive(Debug)]
pub struct ActionEnvironment {
    actions: Vec<String>,
    pub oracle: MeteredOracle,
}

impl ActionEnvironment {
    pub fn new(actions: Vec<String>, oracle: MeteredOracle) -> Result<Self> {
        if actions.is_empty() {
            return Err(Error::Domain("environment has no actions".into()));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = actions.iter().find(|a| !seen.insert(a.as_str())) {
            return Err(Error::Validation(format!("duplicate action `{dup}`")));
        }
        Ok(ActionEnvironment { actions, oracle })
    }

    /// Environment with actions `a0 .. a{n-1}`.
    pub fn with_indexed_actions(n: usize, oracle: MeteredOracle) -> Result<Self> {
        ActionEnvironment::new((0..n).map(|i| format!("a{i}")).collect(), oracle)
    }

    /// Parse `{"actions": [...], "values": {"0": 1.0, "0,1": 2.5, ...}}`.
    ///
    /// Every singleton must be present. A missing multi-action key is valued
    /// as the sum of its singletons. Keys are looked up as written, so
    /// `"1,0"` only matters for ordered plans; unordered plans use the
    /// ascending key.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            actions: Vec<String>,
            values: BTreeMap<String, f64>,
        }
        let doc: Doc = serde_json::from_str(text)?;
        let n = doc.actions.len();
        let mut table = HashMap::with_capacity(doc.values.len());
        for (key, value) in doc.values {
            let steps = parse_plan_key(&key, n)?;
            if !value.is_finite() {
                return Err(Error::Validation(format!("value for `{key}` is not finite")));
            }
            table.insert(steps, value);
        }
        let mut singles = Vec::with_capacity(n);
        for i in 0..n {
            match table.get(&vec![i]) {
                Some(v) => singles.push(*v),
                None => return Err(Error::Validation(format!("no value given for single action {i}"))),
            }
        }
        let oracle = MeteredOracle::new(move |plan| match table.get(plan.steps()) {
            Some(v) => *v,
            None => plan.steps().iter().map(|&i| singles[i]).sum(),
        });
        ActionEnvironment::new(doc.actions, oracle)
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

fn parse_plan_key(key: &str, n: usize) -> Result<Vec<usize>> {
    let steps = key
        .split(',')
        .map(|part| {
            let i: usize = part
                .trim()
                .parse()
                .map_err(|_| Error::Validation(format!("bad plan key `{key}`")))?;
            if i >= n {
                return Err(Error::Validation(format!(
                    "plan key `{key}` names action {i}, only {n} exist"
                )));
            }
            Ok(i)
        })
        .collect::<Result<Vec<_>>>()?;
    Plan::new(steps.clone(), true).map_err(|e| Error::Validation(format!("plan key `{key}`: {e}")))?;
    Ok(steps)
}

/// One oracle per outcome value; their results are added.
#[derive(Debug)]
pub struct ValueProfile {
    value_fns: Vec<MeteredOracle>,
}

impl ValueProfile {
    pub fn new(value_fns: Vec<MeteredOracle>) -> Result<Self> {
        if value_fns.is_empty() {
            return Err(Error::Domain("value profile is empty".into()));
        }
        Ok(ValueProfile { value_fns })
    }

    /// `table[a][v]` is the value of action `a` under value function `v`.
    pub fn from_table(table: &[Vec<f64>]) -> Result<Self> {
        let width = table.first().map_or(0, Vec::len);
        if width == 0 {
            return Err(Error::Domain("value profile is empty".into()));
        }
        if table.iter().any(|row| row.len() != width) {
            return Err(Error::Validation("ragged value table".into()));
        }
        let fns = (0..width)
            .map(|v| MeteredOracle::additive(table.iter().map(|row| row[v]).collect()))
            .collect();
        ValueProfile::new(fns)
    }

    /// `count` independent seeded oracles.
    pub fn seeded(seed: u64, count: usize) -> Result<Self> {
        ValueProfile::new(
            (0..count as u64)
                .map(|v| MeteredOracle::seeded(splitmix64(seed ^ v.wrapping_mul(0x5851_f42d))))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.value_fns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value_fns.is_empty()
    }

    pub fn calls(&self) -> u64 {
        self.value_fns.iter().map(MeteredOracle::calls).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionChoice {
    pub index: usize,
    pub value: f64,
    pub calls: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanChoice {
    pub plan: Plan,
    pub value: f64,
    pub calls: u64,
}

/// Running argmax with strict improvement, starting from negative infinity.
struct Best<T> {
    item: Option<T>,
    value: f64,
}

impl<T> Best<T> {
    fn new() -> Self {
        Best {
            item: None,
            value: f64::NEG_INFINITY,
        }
    }

    fn offer(&mut self, item: T, value: f64) {
        if self.item.is_none() || value > self.value {
            self.item = Some(item);
            self.value = value;
        }
    }
}

/// Best single action: one oracle call per action.
pub fn solve_c1(env: &mut ActionEnvironment) -> Result<ActionChoice> {
    let start = env.oracle.calls();
    let mut best = Best::new();
    for i in 0..env.len() {
        let value = env.oracle.evaluate(&Plan::single(i));
        best.offer(i, value);
    }
    let index = best
        .item
        .ok_or_else(|| Error::Domain("environment has no actions".into()))?;
    Ok(ActionChoice {
        index,
        value: best.value,
        calls: env.oracle.calls() - start,
    })
}

/// Best single action under the sum of several value functions. Each value
/// function is asked once per action.
pub fn solve_c2(env: &ActionEnvironment, profile: &mut ValueProfile) -> Result<ActionChoice> {
    if profile.is_empty() {
        return Err(Error::Domain("value profile is empty".into()));
    }
    let start = profile.calls();
    let mut best = Best::new();
    for i in 0..env.len() {
        let plan = Plan::single(i);
        let total: f64 = profile.value_fns.iter_mut().map(|v| v.evaluate(&plan)).sum();
        best.offer(i, total);
    }
    let index = best
        .item
        .ok_or_else(|| Error::Domain("environment has no actions".into()))?;
    Ok(ActionChoice {
        index,
        value: best.value,
        calls: profile.calls() - start,
    })
}

/// Best plan of at most two distinct actions.
pub fn solve_c3(env: &mut ActionEnvironment, ordered: bool) -> Result<PlanChoice> {
    search(env, ordered, 2)
}

/// Best plan of any number of distinct actions. Refuses environments above
/// the configured cap, naming the number of calls that would be needed.
pub fn solve_c4(env: &mut ActionEnvironment, ordered: bool, limits: &Limits) -> Result<PlanChoice> {
    let n = env.len();
    let (cap, mode) = if ordered {
        (limits.plan_ordered, CallMode::C4Ordered)
    } else {
        (limits.plan_unordered, CallMode::C4Unordered)
    };
    if n > cap {
        let predicted = predicted_calls(mode, n as u64, 1).ok().map(u128::from);
        let cap_calls = predicted_calls(mode, cap as u64, 1).map_or(u128::MAX, u128::from);
        return Err(Error::cap(
            format!("{mode} plan search over {n} actions (cap n = {cap})"),
            predicted,
            cap_calls,
        ));
    }
    search(env, ordered, n)
}

fn search(env: &mut ActionEnvironment, ordered: bool, max_len: usize) -> Result<PlanChoice> {
    if env.is_empty() {
        return Err(Error::Domain("environment has no actions".into()));
    }
    let n = env.len();
    let start = env.oracle.calls();
    let mut best = Best::new();
    let oracle = &mut env.oracle;
    let mut visit = |steps: &[usize]| {
        let plan = Plan {
            steps: steps.to_vec(),
            ordered,
        };
        let value = oracle.evaluate(&plan);
        best.offer(plan, value);
    };
    if ordered {
        for_each_sequence(n, max_len, &mut visit);
    } else if max_len >= n {
        for_each_subset(n, &mut visit);
    } else {
        for_each_small_subset(n, max_len, &mut visit);
    }
    Ok(PlanChoice {
        plan: best.item.expect("at least one plan enumerated"),
        value: best.value,
        calls: env.oracle.calls() - start,
    })
}

/// Non-empty subsets in binary-counter order over index bitmasks.
pub fn for_each_subset(n: usize, mut visit: impl FnMut(&[usize])) {
    assert!(n < 64, "subset enumeration over {n} items");
    let mut steps = Vec::with_capacity(n);
    for mask in 1u64..(1u64 << n) {
        steps.clear();
        steps.extend((0..n).filter(|&i| mask & (1 << i) != 0));
        visit(&steps);
    }
}

/// Non-empty subsets of size at most `k`, in the same relative order as
/// [`for_each_subset`] but without scanning the masks that are too large.
pub fn for_each_small_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    // Emits `S + high` for every S drawn from 0..limit with |S| <= k, in
    // mask order. `high` holds the already chosen larger elements, largest
    // first.
    fn rec(limit: usize, k: usize, high: &mut Vec<usize>, steps: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        steps.clear();
        steps.extend(high.iter().rev());
        visit(steps);
        if k == 0 {
            return;
        }
        for hi in 0..limit {
            high.push(hi);
            rec(hi, k - 1, high, steps, visit);
            high.pop();
        }
    }
    if k == 0 {
        return;
    }
    let mut high = Vec::with_capacity(k);
    let mut steps = Vec::with_capacity(k);
    for hi in 0..n {
        high.push(hi);
        rec(hi, k - 1, &mut high, &mut steps, &mut visit);
        high.pop();
    }
}

/// Non-empty sequences of distinct indices of length at most `max_len`, in
/// lexicographic order.
pub fn for_each_sequence(n: usize, max_len: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(n: usize, max_len: usize, used: &mut [bool], seq: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        for i in 0..n {
            if used[i] {
                continue;
            }
            used[i] = true;
            seq.push(i);
            visit(seq);
            if seq.len() < max_len {
                rec(n, max_len, used, seq, visit);
            }
            seq.pop();
            used[i] = false;
        }
    }
    if max_len == 0 {
        return;
    }
    let mut used = vec![false; n];
    rec(n, max_len, &mut used, &mut Vec::with_capacity(max_len), &mut visit);
}

/// Solver whose oracle-call count is predicted by [`predicted_calls`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CallMode {
    C1,
    C2,
    C3Unordered,
    C3Ordered,
    C4Unordered,
    C4Ordered,
}

impl CallMode {
    pub const ALL: [CallMode; 6] = [
        CallMode::C1,
        CallMode::C2,
        CallMode::C3Unordered,
        CallMode::C3Ordered,
        CallMode::C4Unordered,
        CallMode::C4Ordered,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CallMode::C1 => "c1",
            CallMode::C2 => "c2",
            CallMode::C3Unordered => "c3u",
            CallMode::C3Ordered => "c3o",
            CallMode::C4Unordered => "c4u",
            CallMode::C4Ordered => "c4o",
        }
    }
}

impl fmt::Display for CallMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CallMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CallMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown mode `{s}` (expected c1, c2, c3u, c3o, c4u, c4o)")))
    }
}

/// Exact oracle-call count of each solver on `n` actions (and `values`
/// value functions for [`CallMode::C2`]; ignored otherwise).
pub fn predicted_calls(mode: CallMode, n: u64, values: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let overflow = || Error::Overflow(format!("{mode} call count for n = {n}"));
    match mode {
        CallMode::C1 => Ok(n),
        CallMode::C2 => n.checked_mul(values).ok_or_else(overflow),
        CallMode::C3Unordered => {
            // n(n+1)/2 without overflowing on the intermediate product.
            let (a, b) = if n.is_multiple_of(2) {
                (n / 2, n + 1)
            } else {
                (n, n.div_ceil(2))
            };
            a.checked_mul(b).ok_or_else(overflow)
        }
        CallMode::C3Ordered => n.checked_mul(n).ok_or_else(overflow),
        CallMode::C4Unordered => {
            if n > 64 {
                Err(overflow())
            } else if n == 64 {
                Ok(u64::MAX)
            } else {
                Ok((1u64 << n) - 1)
            }
        }
        CallMode::C4Ordered => {
            // Sum over k of n!/(n-k)!, which equals floor(e n!) - 1.
            let mut term = 1u64;
            let mut total = 0u64;
            for k in 0..n {
                term = term.checked_mul(n - k).ok_or_else(overflow)?;
                total = total.checked_add(term).ok_or_else(overflow)?;
            }
            Ok(total)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env_from(values: &[f64]) -> ActionEnvironment {
        ActionEnvironment::with_indexed_actions(values.len(), MeteredOracle::additive(values.to_vec())).unwrap()
    }

    #[test]
    fn c1_examples() {
        let r = solve_c1(&mut env_from(&[3.0, 7.0, 2.0])).unwrap();
        assert_eq!((r.index, r.value, r.calls), (1, 7.0, 3));
        let r = solve_c1(&mut env_from(&[5.0])).unwrap();
        assert_eq!((r.index, r.value, r.calls), (0, 5.0, 1));
        // A zero-initialised running maximum would wrongly keep index 0 with
        // value 0 here; the result must be the real maximum.
        let r = solve_c1(&mut env_from(&[-2.0, -9.0])).unwrap();
        assert_eq!((r.index, r.value, r.calls), (0, -2.0, 2));
        let r = solve_c1(&mut env_from(&[-9.0, -2.0])).unwrap();
        assert_eq!((r.index, r.value), (1, -2.0));
    }

    #[test]
    fn c1_ties_go_to_lowest_index() {
        let r = solve_c1(&mut env_from(&[1.0, 4.0, 4.0, 4.0])).unwrap();
        assert_eq!(r.index, 1);
    }

    #[test]
    fn empty_environment_rejected() {
        let err = ActionEnvironment::new(vec![], MeteredOracle::additive(vec![])).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn duplicate_actions_rejected() {
        let err =
            ActionEnvironment::new(vec!["a".into(), "a".into()], MeteredOracle::additive(vec![0.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn c2_examples() {
        let env = ActionEnvironment::with_indexed_actions(2, MeteredOracle::additive(vec![0.0; 2])).unwrap();
        let mut profile = ValueProfile::from_table(&[vec![1.0, 2.0], vec![3.0, -1.0]]).unwrap();
        let r = solve_c2(&env, &mut profile).unwrap();
        assert_eq!((r.index, r.value, r.calls), (0, 3.0, 4));

        let env = ActionEnvironment::with_indexed_actions(1, MeteredOracle::additive(vec![0.0])).unwrap();
        let mut profile = ValueProfile::from_table(&[vec![4.0]]).unwrap();
        let r = solve_c2(&env, &mut profile).unwrap();
        assert_eq!((r.index, r.value, r.calls), (0, 4.0, 1));
    }

    #[test]
    fn c2_with_one_value_matches_c1() {
        let values = [2.0, 9.0, -1.0];
        let c1 = solve_c1(&mut env_from(&values)).unwrap();
        let env = env_from(&values);
        let table: Vec<Vec<f64>> = values.iter().map(|v| vec![*v]).collect();
        let c2 = solve_c2(&env, &mut ValueProfile::from_table(&table).unwrap()).unwrap();
        assert_eq!(c1, c2);
    }

    #[test]
    fn empty_profile_rejected() {
        assert!(matches!(ValueProfile::new(vec![]), Err(Error::Domain(_))));
        assert!(matches!(ValueProfile::from_table(&[vec![]]), Err(Error::Domain(_))));
    }

    #[test]
    fn c3_call_counts() {
        let mut env = ActionEnvironment::with_indexed_actions(4, MeteredOracle::seeded(1)).unwrap();
        assert_eq!(solve_c3(&mut env, false).unwrap().calls, 10);
        assert_eq!(solve_c3(&mut env, true).unwrap().calls, 16);
        let mut env = ActionEnvironment::with_indexed_actions(1, MeteredOracle::seeded(1)).unwrap();
        assert_eq!(solve_c3(&mut env, false).unwrap().calls, 1);
        assert_eq!(solve_c3(&mut env, true).unwrap().calls, 1);
    }

    #[test]
    fn c4_call_counts() {
        let mut env = ActionEnvironment::with_indexed_actions(4, MeteredOracle::seeded(3)).unwrap();
        assert_eq!(solve_c4(&mut env, false, &Limits::default()).unwrap().calls, 15);
        assert_eq!(solve_c4(&mut env, true, &Limits::default()).unwrap().calls, 64);
    }

    #[test]
    fn c4_refuses_above_cap() {
        let mut env = ActionEnvironment::with_indexed_actions(30, MeteredOracle::seeded(3)).unwrap();
        let err = solve_c4(&mut env, false, &Limits::default()).unwrap_err();
        match &err {
            Error::CapExceeded { predicted, .. } => assert_eq!(*predicted, Some(1_073_741_823)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("1073741823"));
        assert_eq!(env.oracle.calls(), 0);

        let mut env = ActionEnvironment::with_indexed_actions(11, MeteredOracle::seeded(3)).unwrap();
        assert!(solve_c4(&mut env, true, &Limits::default())
            .unwrap_err()
            .is_cap_refusal());
    }

    #[test]
    fn predicted_examples() {
        assert_eq!(predicted_calls(CallMode::C4Unordered, 10, 1).unwrap(), 1023);
        assert_eq!(predicted_calls(CallMode::C4Ordered, 2, 1).unwrap(), 4);
        assert_eq!(predicted_calls(CallMode::C3Unordered, 1, 1).unwrap(), 1);
        assert_eq!(predicted_calls(CallMode::C4Unordered, 30, 1).unwrap(), 1_073_741_823);
        assert_eq!(predicted_calls(CallMode::C2, 7, 3).unwrap(), 21);
    }

    #[test]
    fn predicted_overflow_is_explicit() {
        assert_eq!(predicted_calls(CallMode::C4Unordered, 64, 1).unwrap(), u64::MAX);
        assert!(matches!(
            predicted_calls(CallMode::C4Unordered, 65, 1),
            Err(Error::Overflow(_))
        ));
        assert!(predicted_calls(CallMode::C4Ordered, 20, 1).is_ok());
        assert!(matches!(
            predicted_calls(CallMode::C4Ordered, 21, 1),
            Err(Error::Overflow(_))
        ));
        assert!(matches!(
            predicted_calls(CallMode::C3Ordered, u64::MAX, 1),
            Err(Error::Overflow(_))
        ));
        assert!(matches!(predicted_calls(CallMode::C1, 0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn plan_invariants() {
        assert!(Plan::new(vec![], false).is_err());
        assert!(Plan::new(vec![1, 1], true).is_err());
        assert_eq!(Plan::new(vec![2, 0, 1], false).unwrap().steps(), &[0, 1, 2]);
        assert_eq!(Plan::new(vec![2, 0, 1], true).unwrap().steps(), &[2, 0, 1]);
        assert_eq!(Plan::new(vec![2, 0], true).unwrap().key(), "2,0");
    }

    #[test]
    fn small_subsets_follow_mask_order() {
        let mut all = Vec::new();
        for_each_subset(5, |s| {
            if s.len() <= 2 {
                all.push(s.to_vec())
            }
        });
        let mut small = Vec::new();
        for_each_small_subset(5, 2, |s| small.push(s.to_vec()));
        assert_eq!(all, small);

        let mut all3 = Vec::new();
        for_each_subset(6, |s| {
            if s.len() <= 3 {
                all3.push(s.to_vec())
            }
        });
        let mut small3 = Vec::new();
        for_each_small_subset(6, 3, |s| small3.push(s.to_vec()));
        assert_eq!(all3, small3);
    }

    #[test]
    fn sequences_are_lexicographic() {
        let mut seqs = Vec::new();
        for_each_sequence(3, 3, |s| seqs.push(s.to_vec()));
        let mut sorted = seqs.clone();
        sorted.sort();
        assert_eq!(seqs, sorted);
        assert_eq!(seqs.len(), 15);
    }

    #[test]
    fn json_environment() {
        let text = r#"{"actions": ["warn", "help", "wait"],
                       "values": {"0": 1, "1": 2, "2": -1, "0,1": 10, "1,0": -3}}"#;
        let mut env = ActionEnvironment::from_json(text).unwrap();
        assert_eq!(env.len(), 3);
        let r = solve_c3(&mut env, false).unwrap();
        assert_eq!(r.plan.steps(), &[0, 1]);
        assert_eq!(r.value, 10.0);
        // "0,2" missing: falls back to 1 + (-1).
        assert_eq!(env.oracle.evaluate(&Plan::new(vec![0, 2], false).unwrap()), 0.0);
        assert_eq!(env.oracle.evaluate(&Plan::new(vec![1, 0], true).unwrap()), -3.0);
    }

    #[test]
    fn json_environment_errors() {
        assert!(matches!(
            ActionEnvironment::from_json(r#"{"actions": ["a"], "values": {}}"#),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            ActionEnvironment::from_json(r#"{"actions": ["a"], "values": {"0": 1, "0,3": 2}}"#),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            ActionEnvironment::from_json(r#"{"actions": ["a"], "values": {"0": 1, "0,0": 2}}"#),
            Err(Error::Validation(_))
        ));
        assert!(matches!(ActionEnvironment::from_json("{"), Err(Error::Json(_))));
    }

    #[test]
    fn counter_resets() {
        let mut oracle = MeteredOracle::seeded(0);
        oracle.evaluate(&Plan::single(0));
        oracle.evaluate(&Plan::single(0));
        assert_eq!(oracle.calls(), 2);
        oracle.reset();
        assert_eq!(oracle.calls(), 0);
    }
}
