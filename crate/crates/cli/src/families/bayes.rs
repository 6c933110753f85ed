//! Exact Bayesian-network queries, each checked against full enumeration
//! when the network is small enough to enumerate.

use clap::Args;
use mtl_core::bayesnet::{enumerate_joint, map_query, mpe, query, BayesNet, Evidence, Explanation};
use mtl_core::{builtin, Limits};

use crate::{Cell, Context, Failure, Report, Table};

#[derive(Debug, Args)]
pub struct BayesArgs {
    /// Bundled network.
    name: Option<String>,
    /// Comma-separated variables whose posterior is wanted.
    #[arg(long)]
    query: Option<String>,
    /// Observations such as `x1=true,x3=false`.
    #[arg(long, default_value = "")]
    evidence: String,
    /// Most probable completion of every unobserved variable.
    #[arg(long)]
    mpe: bool,
    /// Comma-separated variables for a maximum a posteriori assignment.
    #[arg(long)]
    map: Option<String>,
}

fn names(list: &str) -> Vec<&str> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn assignment_label(pairs: impl IntoIterator<Item = (String, bool)>) -> String {
    pairs
        .into_iter()
        .map(|(n, v)| format!("{n}={v}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Full joint with bit `v` of the index holding variable `v`.
struct Oracle {
    joint: Vec<f64>,
    evidence: Vec<Option<bool>>,
}

impl Oracle {
    fn new(net: &BayesNet, evidence: &Evidence, limits: &Limits) -> Option<Oracle> {
        let joint = enumerate_joint(net, limits).ok()?;
        Some(Oracle {
            joint,
            evidence: evidence.resolve(net).ok()?,
        })
    }

    fn consistent(&self, s: usize) -> bool {
        self.evidence
            .iter()
            .enumerate()
            .all(|(v, e)| e.is_none_or(|val| (s >> v & 1 == 1) == val))
    }

    /// `P(targets = bits | evidence)`, bit `k` for `targets[k]`.
    fn posterior(&self, targets: &[usize]) -> Vec<f64> {
        let mut table = vec![0.0; 1 << targets.len()];
        let mut z = 0.0;
        for (s, p) in self.joint.iter().enumerate().filter(|(s, _)| self.consistent(*s)) {
            z += p;
            let idx = targets
                .iter()
                .enumerate()
                .fold(0, |acc, (k, &t)| acc | ((s >> t & 1) << k));
            table[idx] += p;
        }
        table.iter().map(|p| p / z).collect()
    }

    fn best_completion(&self) -> f64 {
        self.joint
            .iter()
            .enumerate()
            .filter(|(s, _)| self.consistent(*s))
            .map(|(_, p)| *p)
            .fold(0.0, f64::max)
    }
}

pub fn run(args: BayesArgs, ctx: &Context) -> Result<Report, Failure> {
    let net = ctx.load(args.name.as_deref(), "trolley", BayesNet::from_json, builtin::network)?;
    if args.query.is_none() && args.map.is_none() && !args.mpe {
        return Err(Failure::Usage("give at least one of --query, --mpe or --map".into()));
    }
    let evidence = Evidence::parse(&args.evidence)?;
    let oracle = Oracle::new(&net, &evidence, &ctx.limits);
    let mut table = Table::new(&["kind", "assignment", "probability", "oracle", "multiplications"]);
    let explained = |table: &mut Table, kind: &str, found: Explanation, oracle: Option<f64>| {
        table.push(vec![
            kind.into(),
            assignment_label(found.assignment).into(),
            found.probability.into(),
            oracle.into(),
            found.stats.multiplications.into(),
        ]);
    };

    if let Some(list) = &args.query {
        let targets = names(list);
        let posterior = query(&net, &targets, &evidence)?;
        let indices: Vec<usize> = targets.iter().map(|t| net.index_of(t)).collect::<Result<_, _>>()?;
        let expected = oracle.as_ref().map(|o| o.posterior(&indices));
        for (bits, p) in posterior.probabilities.iter().enumerate() {
            let label = assignment_label(
                targets
                    .iter()
                    .enumerate()
                    .map(|(k, t)| (t.to_string(), bits >> k & 1 == 1)),
            );
            table.push(vec![
                "query".into(),
                label.into(),
                (*p).into(),
                expected.as_ref().map(|e| e[bits]).into(),
                posterior.stats.multiplications.into(),
            ]);
        }
    }
    if args.mpe {
        let found = mpe(&net, &evidence)?;
        let expected = oracle.as_ref().map(Oracle::best_completion);
        explained(&mut table, "mpe", found, expected);
    }
    if let Some(list) = &args.map {
        let vars = names(list);
        let found = map_query(&net, &vars, &evidence, &ctx.limits)?;
        let indices: Vec<usize> = vars.iter().map(|t| net.index_of(t)).collect::<Result<_, _>>()?;
        let expected = oracle
            .as_ref()
            .map(|o| o.posterior(&indices).into_iter().fold(0.0, f64::max));
        explained(&mut table, "map", found, expected);
    }
    if oracle.is_none() {
        table.push(vec![
            "oracle".into(),
            Cell::Text("skipped: network exceeds the enumeration cap".into()),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    Ok(table.into())
}
