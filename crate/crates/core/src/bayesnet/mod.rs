//! Boolean Bayesian networks and exact inference.
//!
//! A network is a DAG of Boolean variables, each carrying a table of
//! `P(var = true | parents)`. The joint distribution factorizes by the chain
//! rule into one table lookup per variable ([`BayesNet::joint_probability`]).
//!
//! Queries ([`query`]), most probable explanations ([`mpe`]) and partial MAP
//! ([`map_query`]) run variable elimination over [`Factor`]s. The
//! [`enumerate_joint`] table is the brute-force oracle they are tested
//! against.
//!
//! Lever reasoning on the trolley network is plain conditioning on `x6`;
//! there is no do-operator here.

mod factor;
mod inference;

pub use factor::{EliminationStats, Factor};
pub use inference::{map_query, mpe, query, query_with_order, EliminationOrder, Explanation, Posterior};

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Limits, Result, PROBABILITY_TOLERANCE};

/// Bundled default parameterization of the eight-variable trolley network.
pub const TROLLEY_JSON: &str = include_str!("../../data/trolley.json");

#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet {
    variables: Vec<String>,
    parents: Vec<Vec<usize>>,
    /// `cpts[v][row]` is `P(v = true | parents)`, where bit `k` of `row` is
    /// the value of `parents[v][k]`.
    cpts: Vec<Vec<f64>>,
    labels: BTreeMap<String, String>,
}

impl BayesNet {
    pub fn new(variables: Vec<String>, parents: Vec<Vec<usize>>, cpts: Vec<Vec<f64>>) -> Result<Self> {
        let n = variables.len();
        if parents.len() != n || cpts.len() != n {
            return Err(Error::Validation(
                "variables, parents and cpts must have the same length".into(),
            ));
        }
        let mut index = HashMap::new();
        for (i, name) in variables.iter().enumerate() {
            if index.insert(name.as_str(), i).is_some() {
                return Err(Error::Validation(format!("duplicate variable `{name}`")));
            }
        }
        for (v, ps) in parents.iter().enumerate() {
            let name = &variables[v];
            for (k, &p) in ps.iter().enumerate() {
                if p >= n {
                    return Err(Error::Validation(format!("`{name}` has an out-of-range parent")));
                }
                if p == v {
                    return Err(Error::Validation(format!("`{name}` is its own parent")));
                }
                if ps[..k].contains(&p) {
                    return Err(Error::Validation(format!("`{name}` lists a parent twice")));
                }
            }
            if ps.len() >= usize::BITS as usize - 1 {
                return Err(Error::Validation(format!("`{name}` has too many parents")));
            }
            let rows = 1usize << ps.len();
            if cpts[v].len() != rows {
                return Err(Error::Validation(format!(
                    "`{name}` has {} CPT rows, expected {rows}",
                    cpts[v].len()
                )));
            }
            if let Some(p) = cpts[v].iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(Error::Validation(format!("`{name}` has CPT entry {p} outside [0, 1]")));
            }
        }
        let net = BayesNet {
            variables,
            parents,
            cpts,
            labels: BTreeMap::new(),
        };
        net.topological_order()?;
        Ok(net)
    }

    /// Parse `{"variables": [...], "parents": {name: [names]},
    /// "cpt": {name: {bits: p_true}}}`.
    ///
    /// `bits` has one `0`/`1` character per parent, in the order the parents
    /// are listed; root variables use the empty string. Optional `labels`
    /// and `note` fields are accepted.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NetDoc = serde_json::from_str(text)?;
        let index: HashMap<&str, usize> = doc.variables.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::Validation(format!("unknown variable `{name}`")))
        };
        for name in doc.parents.keys().chain(doc.cpt.keys()).chain(doc.labels.keys()) {
            lookup(name)?;
        }
        let mut parents = Vec::with_capacity(doc.variables.len());
        let mut cpts = Vec::with_capacity(doc.variables.len());
        for name in &doc.variables {
            let ps = doc
                .parents
                .get(name)
                .map(|ps| ps.iter().map(|p| lookup(p)).collect::<Result<Vec<_>>>())
                .transpose()?
                .unwrap_or_default();
            let table = doc
                .cpt
                .get(name)
                .ok_or_else(|| Error::Validation(format!("no CPT for `{name}`")))?;
            let m = ps.len();
            if m >= 30 {
                return Err(Error::Validation(format!("`{name}` has too many parents")));
            }
            let mut rows = vec![f64::NAN; 1 << m];
            for (bits, &p) in table {
                if bits.len() != m || !bits.bytes().all(|b| b == b'0' || b == b'1') {
                    return Err(Error::Validation(format!(
                        "CPT key `{bits}` of `{name}` must be {m} characters of 0/1"
                    )));
                }
                let row = bits
                    .bytes()
                    .enumerate()
                    .filter(|(_, b)| *b == b'1')
                    .fold(0usize, |acc, (k, _)| acc | (1 << k));
                rows[row] = p;
            }
            if table.len() != rows.len() {
                return Err(Error::Validation(format!(
                    "`{name}` has {} CPT rows, expected {}",
                    table.len(),
                    rows.len()
                )));
            }
            parents.push(ps);
            cpts.push(rows);
        }
        let mut net = BayesNet::new(doc.variables, parents, cpts)?;
        net.labels = doc.labels;
        Ok(net)
    }

    pub fn to_json(&self) -> String {
        let mut parents = BTreeMap::new();
        let mut cpt = BTreeMap::new();
        for (v, name) in self.variables.iter().enumerate() {
            let ps = &self.parents[v];
            if !ps.is_empty() {
                parents.insert(name.clone(), ps.iter().map(|&p| self.variables[p].clone()).collect());
            }
            let rows = self.cpts[v]
                .iter()
                .enumerate()
                .map(|(row, &p)| {
                    let bits: String = (0..ps.len())
                        .map(|k| if row & (1 << k) != 0 { '1' } else { '0' })
                        .collect();
                    (bits, p)
                })
                .collect();
            cpt.insert(name.clone(), rows);
        }
        let doc = NetDoc {
            note: None,
            variables: self.variables.clone(),
            labels: self.labels.clone(),
            parents,
            cpt,
        };
        serde_json::to_string_pretty(&doc).expect("network serializes")
    }

    /// Chain `x1 -> x2 -> ... -> xn` where each variable copies its parent
    /// with probability `p_same`.
    pub fn chain(n: usize, p_root: f64, p_same: f64) -> Result<Self> {
        let variables = (1..=n).map(|i| format!("x{i}")).collect();
        let parents = (0..n).map(|i| if i == 0 { vec![] } else { vec![i - 1] }).collect();
        let cpts = (0..n)
            .map(|i| {
                if i == 0 {
                    vec![p_root]
                } else {
                    vec![1.0 - p_same, p_same]
                }
            })
            .collect();
        BayesNet::new(variables, parents, cpts)
    }

    /// Random network on `n` variables. Each variable draws up to
    /// `max_parents` parents among the variables before it, and CPT entries
    /// uniformly from `[0, 1]`.
    pub fn random(n: usize, max_parents: usize, rng: &mut impl Rng) -> Self {
        let variables = (1..=n).map(|i| format!("x{i}")).collect();
        let mut parents = Vec::with_capacity(n);
        let mut cpts = Vec::with_capacity(n);
        for v in 0..n {
            let k = rng.gen_range(0..=max_parents.min(v));
            let mut pool: Vec<usize> = (0..v).collect();
            let mut ps = Vec::with_capacity(k);
            for _ in 0..k {
                let j = rng.gen_range(0..pool.len());
                ps.push(pool.swap_remove(j));
            }
            cpts.push((0..1usize << k).map(|_| rng.gen::<f64>()).collect());
            parents.push(ps);
        }
        BayesNet::new(variables, parents, cpts).expect("random network is valid")
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn parents(&self, var: usize) -> &[usize] {
        &self.parents[var]
    }

    pub fn cpt(&self, var: usize) -> &[f64] {
        &self.cpts[var]
    }

    pub fn label(&self, name: &str) -> Option<&str> {
        self.labels.get(name).map(String::as_str)
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::Domain(format!("unknown variable `{name}`")))
    }

    /// Variables in an order where parents precede children. Fails on cycles.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut children = vec![Vec::new(); n];
        for (v, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                children[p].push(v);
            }
        }
        let mut ready: Vec<usize> = (0..n).rev().filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            order.push(v);
            for &c in children[v].iter().rev() {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push(c);
                }
            }
        }
        if order.len() != n {
            return Err(Error::Validation("parent graph has a cycle".into()));
        }
        Ok(order)
    }

    /// `P(var = value | parents)` under a full assignment (bit `i` of
    /// `state` is variable `i`).
    fn local_probability(&self, var: usize, state: u64) -> f64 {
        let row = self.parents[var]
            .iter()
            .enumerate()
            .filter(|(_, &p)| state & (1 << p) != 0)
            .fold(0usize, |acc, (k, _)| acc | (1 << k));
        let p_true = self.cpts[var][row];
        if state & (1 << var) != 0 {
            p_true
        } else {
            1.0 - p_true
        }
    }

    fn joint_of_state(&self, state: u64) -> f64 {
        (0..self.len()).map(|v| self.local_probability(v, state)).product()
    }

    /// Chain-rule product of one CPT entry per variable. The evidence must
    /// assign every variable.
    pub fn joint_probability(&self, full: &Evidence) -> Result<f64> {
        let values = full.resolve(self)?;
        if self.len() > 64 {
            return Err(Error::Domain("joint lookup supports at most 64 variables".into()));
        }
        let mut state = 0u64;
        for (v, value) in values.iter().enumerate() {
            match value {
                Some(true) => state |= 1 << v,
                Some(false) => {}
                None => {
                    return Err(Error::Domain(format!(
                        "joint probability needs a value for `{}`",
                        self.variables[v]
                    )))
                }
            }
        }
        Ok(self.joint_of_state(state))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    variables: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    labels: BTreeMap<String, String>,
    #[serde(default)]
    parents: BTreeMap<String, Vec<String>>,
    cpt: BTreeMap<String, BTreeMap<String, f64>>,
}

/// The eight-variable trolley network with its bundled default CPTs.
pub fn trolley_network() -> BayesNet {
    BayesNet::from_json(TROLLEY_JSON).expect("bundled trolley network is valid")
}

/// Partial assignment of variable names to Boolean values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Evidence {
    assignments: BTreeMap<String, bool>,
}

impl Evidence {
    pub fn new() -> Self {
        Evidence::default()
    }

    /// Build from pairs; a name given twice is an error.
    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, bool)>) -> Result<Self> {
        let mut e = Evidence::new();
        for (name, value) in pairs {
            let name = name.into();
            if e.assignments.insert(name.clone(), value).is_some() {
                return Err(Error::Validation(format!("`{name}` given twice in evidence")));
            }
        }
        Ok(e)
    }

    /// Parse `x1=true,x2=false` (also accepts `1`/`0`, `t`/`f`).
    pub fn parse(text: &str) -> Result<Self> {
        let pairs = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|item| {
                let (name, value) = item
                    .split_once('=')
                    .ok_or_else(|| Error::Validation(format!("evidence `{item}` is not name=value")))?;
                let value = match value.trim() {
                    "true" | "t" | "1" => true,
                    "false" | "f" | "0" => false,
                    other => return Err(Error::Validation(format!("`{other}` is not a Boolean"))),
                };
                Ok((name.trim().to_string(), value))
            })
            .collect::<Result<Vec<_>>>()?;
        Evidence::from_pairs(pairs)
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.assignments.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.assignments.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Per-variable values in network order; unknown names are an error.
    pub fn resolve(&self, net: &BayesNet) -> Result<Vec<Option<bool>>> {
        let mut values = vec![None; net.len()];
        for (name, &value) in &self.assignments {
            values[net.index_of(name)?] = Some(value);
        }
        Ok(values)
    }
}

/// Probability of every full assignment; entry `s` has variable `i` true
/// iff bit `i` of `s` is set.
pub fn enumerate_joint(net: &BayesNet, limits: &Limits) -> Result<Vec<f64>> {
    let n = net.len();
    if n > limits.bayes_variables || n >= 64 {
        return Err(Error::cap(
            format!("joint enumeration over {n} variables"),
            1u128.checked_shl(n as u32),
            1u128 << limits.bayes_variables.min(127),
        ));
    }
    let table: Vec<f64> = (0..1u64 << n).map(|s| net.joint_of_state(s)).collect();
    let total: f64 = table.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(Error::Internal(format!("joint table sums to {total}")));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trolley_structure() {
        let net = trolley_network();
        assert_eq!(net.len(), 8);
        assert_eq!(net.edge_count(), 9);
        assert!(net.topological_order().is_ok());
        let edge = |a: &str, b: &str| {
            let (a, b) = (net.index_of(a).unwrap(), net.index_of(b).unwrap());
            net.parents(b).contains(&a)
        };
        for (a, b) in [
            ("x1", "x3"),
            ("x1", "x4"),
            ("x2", "x4"),
            ("x3", "x5"),
            ("x3", "x4"),
            ("x4", "x5"),
            ("x5", "x6"),
            ("x6", "x7"),
            ("x6", "x8"),
        ] {
            assert!(edge(a, b), "missing {a} -> {b}");
        }
        assert_eq!(net.label("x1"), Some("Holiday"));
    }

    #[test]
    fn independent_pair() {
        let net = BayesNet::new(
            vec!["a".into(), "b".into()],
            vec![vec![], vec![]],
            vec![vec![0.5], vec![0.5]],
        )
        .unwrap();
        for (a, b) in [(false, false), (true, false), (false, true), (true, true)] {
            let e = Evidence::from_pairs([("a", a), ("b", b)]).unwrap();
            assert_eq!(net.joint_probability(&e).unwrap(), 0.25);
        }
        let partial = Evidence::from_pairs([("a", true)]).unwrap();
        assert!(matches!(net.joint_probability(&partial), Err(Error::Domain(_))));
    }

    #[test]
    fn trolley_joint_all_false_is_product() {
        let net = trolley_network();
        let all_false = Evidence::from_pairs(net.variables().iter().map(|v| (v.clone(), false))).unwrap();
        let expected = 0.9 * 0.7 * 0.1 * 0.65 * 0.98 * 0.99 * 0.1 * 0.9;
        let joint = net.joint_probability(&all_false).unwrap();
        assert!((joint - expected).abs() < 1e-15);
        let table = enumerate_joint(&net, &Limits::default()).unwrap();
        assert_eq!(table.len(), 256);
        assert!((table[0] - joint).abs() < 1e-15);
        assert!((table.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn enumeration_examples() {
        let one = BayesNet::new(vec!["a".into()], vec![vec![]], vec![vec![0.3]]).unwrap();
        let t = enumerate_joint(&one, &Limits::default()).unwrap();
        assert!((t[0] - 0.7).abs() < 1e-15 && (t[1] - 0.3).abs() < 1e-15);

        let coins = BayesNet::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![], vec![], vec![]],
            vec![vec![0.5]; 3],
        )
        .unwrap();
        assert!(enumerate_joint(&coins, &Limits::default())
            .unwrap()
            .iter()
            .all(|&p| p == 0.125));

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let big = BayesNet::random(21, 2, &mut rng);
        assert!(enumerate_joint(&big, &Limits::default()).unwrap_err().is_cap_refusal());
    }

    #[test]
    fn validation_errors() {
        let cyclic = BayesNet::new(
            vec!["a".into(), "b".into()],
            vec![vec![1], vec![0]],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        );
        assert!(matches!(cyclic, Err(Error::Validation(_))));
        let short_cpt = BayesNet::new(
            vec!["a".into(), "b".into()],
            vec![vec![], vec![0]],
            vec![vec![0.5], vec![0.5]],
        );
        assert!(matches!(short_cpt, Err(Error::Validation(_))));
        let out_of_range = BayesNet::new(vec!["a".into()], vec![vec![]], vec![vec![1.5]]);
        assert!(matches!(out_of_range, Err(Error::Validation(_))));
        let missing_row = r#"{"variables": ["a", "b"], "parents": {"b": ["a"]},
                              "cpt": {"a": {"": 0.5}, "b": {"0": 0.1}}}"#;
        assert!(matches!(BayesNet::from_json(missing_row), Err(Error::Validation(_))));
        let unknown = r#"{"variables": ["a"], "parents": {"z": ["a"]}, "cpt": {"a": {"": 0.5}}}"#;
        assert!(matches!(BayesNet::from_json(unknown), Err(Error::Validation(_))));
    }

    #[test]
    fn json_round_trip() {
        let net = trolley_network();
        let back = BayesNet::from_json(&net.to_json()).unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn evidence_parsing() {
        let e = Evidence::parse("x1=true, x6=0").unwrap();
        assert_eq!(e.get("x1"), Some(true));
        assert_eq!(e.get("x6"), Some(false));
        assert!(Evidence::parse("x1=true,x1=false").is_err());
        assert!(Evidence::parse("x1").is_err());
        assert!(Evidence::parse("x1=maybe").is_err());
        assert!(Evidence::parse("").unwrap().is_empty());
        let net = trolley_network();
        assert!(Evidence::parse("x9=true").unwrap().resolve(&net).is_err());
    }
}
