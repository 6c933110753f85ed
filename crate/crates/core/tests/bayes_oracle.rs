//! Variable elimination against brute-force sums over the full joint table.

use mtl_core::bayesnet::{
    enumerate_joint, map_query, mpe, query, query_with_order, trolley_network, BayesNet, EliminationOrder, Evidence,
};
use mtl_core::Limits;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

/// Whether joint state `s` agrees with the evidence (by variable index).
fn consistent(s: usize, evidence: &[(usize, bool)]) -> bool {
    evidence.iter().all(|&(v, val)| (s >> v & 1 == 1) == val)
}

fn indexed(net: &BayesNet, evidence: &Evidence) -> Vec<(usize, bool)> {
    evidence
        .iter()
        .map(|(name, v)| (net.index_of(name).unwrap(), v))
        .collect()
}

/// P(targets = bits | evidence) for every target assignment.
fn oracle_posterior(joint: &[f64], targets: &[usize], evidence: &[(usize, bool)]) -> Vec<f64> {
    let mut table = vec![0.0; 1 << targets.len()];
    let mut z = 0.0;
    for (s, p) in joint.iter().enumerate() {
        if !consistent(s, evidence) {
            continue;
        }
        z += p;
        let idx = targets
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &t)| acc | ((s >> t & 1) << k));
        table[idx] += p;
    }
    table.iter().map(|p| p / z).collect()
}

fn random_evidence(net: &BayesNet, rng: &mut ChaCha8Rng, count: usize) -> (Evidence, Vec<usize>) {
    let mut order: Vec<usize> = (0..net.len()).collect();
    order.shuffle(rng);
    let observed = &order[..count];
    let evidence = Evidence::from_pairs(
        observed
            .iter()
            .map(|&v| (net.variables()[v].clone(), rng.gen_bool(0.5))),
    )
    .unwrap();
    (evidence, order[count..].to_vec())
}

fn check_network(net: &BayesNet, rng: &mut ChaCha8Rng) {
    let limits = Limits::default();
    let joint = enumerate_joint(net, &limits).unwrap();
    assert!((joint.iter().sum::<f64>() - 1.0).abs() < TOL);

    for _ in 0..3 {
        let n_obs = rng.gen_range(0..net.len().min(4));
        let (evidence, hidden) = random_evidence(net, rng, n_obs);
        let ev = indexed(net, &evidence);
        let z: f64 = joint
            .iter()
            .enumerate()
            .filter(|(s, _)| consistent(*s, &ev))
            .map(|(_, p)| p)
            .sum();
        if z < 1e-12 {
            continue;
        }

        // Posterior over one or two hidden variables.
        let k = rng.gen_range(1..=hidden.len().min(2));
        let targets: Vec<usize> = hidden[..k].to_vec();
        let names: Vec<&str> = targets.iter().map(|&t| net.variables()[t].as_str()).collect();
        let post = query(net, &names, &evidence).unwrap();
        let expected = oracle_posterior(&joint, &targets, &ev);
        for (a, b) in post.probabilities.iter().zip(&expected) {
            assert!((a - b).abs() < TOL, "posterior {a} vs {b}");
        }
        assert!((post.evidence_probability - z).abs() < TOL);

        // MPE: the best full completion, as a joint probability.
        let best = joint
            .iter()
            .enumerate()
            .filter(|(s, _)| consistent(*s, &ev))
            .map(|(_, p)| *p)
            .fold(0.0, f64::max);
        let explanation = mpe(net, &evidence).unwrap();
        assert!((explanation.probability - best).abs() < TOL);
        let completion = explanation.assignment.iter().filter(|(n, _)| evidence.get(n).is_none());
        let full = Evidence::from_pairs(
            completion
                .map(|(n, v)| (n.clone(), *v))
                .chain(evidence.iter().map(|(n, v)| (n.to_string(), v))),
        )
        .unwrap();
        assert!((net.joint_probability(&full).unwrap() - best).abs() < TOL);

        // Partial MAP over up to three hidden variables.
        let m = hidden.len().min(3);
        let map_vars: Vec<usize> = hidden[..m].to_vec();
        let map_names: Vec<&str> = map_vars.iter().map(|&t| net.variables()[t].as_str()).collect();
        let table = oracle_posterior(&joint, &map_vars, &ev);
        let top = table.iter().copied().fold(0.0, f64::max);
        let found = map_query(net, &map_names, &evidence, &limits).unwrap();
        assert!(
            (found.probability - top).abs() < TOL,
            "map {} vs {top}",
            found.probability
        );
    }
}

#[test]
fn trolley_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7201);
    check_network(&trolley_network(), &mut rng);
    let net = trolley_network();
    let evidence = Evidence::parse("x1=true").unwrap();
    let post = query(&net, &["x7"], &evidence).unwrap();
    let joint = enumerate_joint(&net, &Limits::default()).unwrap();
    let expected = oracle_posterior(&joint, &[6], &indexed(&net, &evidence));
    assert!((post.p_true() - expected[1]).abs() < TOL);
}

#[test]
fn fifty_random_networks() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let n = rng.gen_range(2..=12);
        let net = BayesNet::random(n, 3, &mut rng);
        check_network(&net, &mut rng);
    }
}

#[test]
fn elimination_order_does_not_change_answers() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let net = BayesNet::random(8, 3, &mut rng);
        let (evidence, hidden) = random_evidence(&net, &mut rng, 2);
        let target = net.variables()[hidden[0]].clone();
        let base = query(&net, &[&target], &evidence).unwrap();
        let mut order: Vec<usize> = (0..net.len()).collect();
        for _ in 0..3 {
            order.shuffle(&mut rng);
            let other = query_with_order(&net, &[&target], &evidence, &EliminationOrder::Fixed(order.clone())).unwrap();
            for (a, b) in base.probabilities.iter().zip(&other.probabilities) {
                assert!((a - b).abs() < TOL);
            }
        }
    }
}

#[test]
fn chain_cost_grows_linearly() {
    let cost = |n: usize| {
        let net = BayesNet::chain(n, 0.3, 0.8).unwrap();
        let target = format!("x{n}");
        query(&net, &[&target], &Evidence::new()).unwrap().stats.multiplications
    };
    let (c10, c20, c40) = (cost(10), cost(20), cost(40));
    // Constant work per link: doubling the chain adds the same amount again.
    assert_eq!(c40 - c20, 2 * (c20 - c10));
    // A 40-variable chain is far beyond enumeration but trivial here.
    assert!(c40 < 40 * 16);
}
