//! Value iteration, policy evaluation and POMDP trees against closed forms
//! and direct linear solves.

use mtl_core::seqdec::{
    contraction_bound, evaluate_policy, finite_horizon, policy_tree_count, pomdp_finite_horizon, restless_bandit_brute,
    value_iteration, BanditArm, BeliefState, MarkovDecisionProcess, PartiallyObservableMdp, Policy,
    RestlessBanditInstance,
};
use mtl_core::Limits;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_rows(rng: &mut ChaCha8Rng, rows: usize, width: usize) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| {
            let raw: Vec<f64> = (0..width).map(|_| rng.gen::<f64>() + 0.01).collect();
            let total: f64 = raw.iter().sum();
            let mut row: Vec<f64> = raw.iter().map(|x| x / total).collect();
            // Put the rounding residue on the last entry so the row sums to 1.
            let head: f64 = row[..width - 1].iter().sum();
            row[width - 1] = 1.0 - head;
            row
        })
        .collect()
}

fn random_mdp(rng: &mut ChaCha8Rng, n_s: usize, n_a: usize, discount: f64, nonnegative: bool) -> MarkovDecisionProcess {
    let transition = (0..n_s).map(|_| random_rows(rng, n_a, n_s)).collect();
    let low = if nonnegative { 0.0 } else { -5.0 };
    let reward = (0..n_s)
        .map(|_| {
            (0..n_a)
                .map(|_| (0..n_s).map(|_| rng.gen_range(low..5.0)).collect())
                .collect()
        })
        .collect();
    MarkovDecisionProcess::new(
        (0..n_s).map(|s| format!("s{s}")).collect(),
        (0..n_a).map(|a| format!("a{a}")).collect(),
        transition,
        reward,
        discount,
    )
    .unwrap()
}

/// `(I - discount P_pi)^-1 r_pi` via nalgebra's LU.
fn exact_policy_values(mdp: &MarkovDecisionProcess, policy: &Policy) -> Vec<f64> {
    let n = mdp.states().len();
    let m = DMatrix::from_fn(n, n, |s, t| {
        let eye = if s == t { 1.0 } else { 0.0 };
        eye - mdp.discount() * mdp.transition(s, policy.action(s), t)
    });
    let r = DVector::from_fn(n, |s, _| mdp.expected_reward(s, policy.action(s)));
    m.lu().solve(&r).unwrap().iter().copied().collect()
}

fn single_action(discount: f64) -> MarkovDecisionProcess {
    MarkovDecisionProcess::new(
        vec!["s".into()],
        vec!["a".into()],
        vec![vec![vec![1.0]]],
        vec![vec![vec![1.0]]],
        discount,
    )
    .unwrap()
}

#[test]
fn geometric_values_and_bound() {
    for gamma in [0.5, 0.9, 0.99] {
        let vi = value_iteration(&single_action(gamma), 1e-6).unwrap();
        assert!((vi.values[0] - 1.0 / (1.0 - gamma)).abs() < 1e-6);
        let bound = ((1e-6 * (1.0 - gamma)).ln() / gamma.ln()).ceil() as u64 + 1;
        assert_eq!(contraction_bound(gamma, 1e-6, 1.0), bound);
        assert!(vi.iterations <= bound);
    }
}

#[test]
fn random_mdps_match_linear_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..30 {
        let discount = rng.gen_range(0.0..0.95);
        let mdp = random_mdp(&mut rng, 4, 3, discount, false);
        let tol = 1e-8;
        let vi = value_iteration(&mdp, tol).unwrap();
        assert!(vi.iterations <= contraction_bound(discount, tol, mdp.max_abs_reward()));
        let exact = exact_policy_values(&mdp, &vi.policy);
        for (v, e) in vi.values.iter().zip(&exact) {
            assert!((v - e).abs() < tol, "{v} vs {e}");
        }
        // Any fixed policy's evaluation matches its own linear system.
        let policy = Policy((0..4).map(|_| rng.gen_range(0..3)).collect());
        let evaluated = evaluate_policy(&mdp, &policy, tol).unwrap();
        for (v, e) in evaluated.iter().zip(exact_policy_values(&mdp, &policy)) {
            assert!((v - e).abs() < tol);
        }
        // No policy beats the greedy one.
        for (v, e) in vi.values.iter().zip(&exact_policy_values(&mdp, &policy)) {
            assert!(*v >= e - 2.0 * tol);
        }
    }
}

#[test]
fn tree_counts_match_closed_form() {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for n_a in 1..=3usize {
        for n_o in 1..=3usize {
            for horizon in 1..=4usize {
                let nodes: u32 = if n_o == 1 {
                    horizon as u32
                } else {
                    ((n_o.pow(horizon as u32) - 1) / (n_o - 1)) as u32
                };
                let closed = (n_a as u128).pow(nodes);
                assert_eq!(policy_tree_count(n_a as u64, n_o as u64, horizon as u32), Some(closed));
                if closed > 20_000 {
                    continue;
                }
                let mdp = random_mdp(&mut rng, 2, n_a, 0.9, false);
                let observation = (0..n_a).map(|_| random_rows(&mut rng, 2, n_o)).collect();
                let pomdp =
                    PartiallyObservableMdp::new(mdp, (0..n_o).map(|o| format!("o{o}")).collect(), observation).unwrap();
                let sol = pomdp_finite_horizon(&pomdp, &BeliefState::uniform(2), horizon, &limits).unwrap();
                assert_eq!(sol.trees_evaluated, closed);
            }
        }
    }
}

#[test]
fn fully_observable_pomdp_equals_mdp_horizon_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    let limits = Limits::default();
    for _ in 0..5 {
        let mdp = random_mdp(&mut rng, 2, 2, 0.8, false);
        let pomdp = PartiallyObservableMdp::fully_observable(mdp.clone());
        for horizon in 1..=3 {
            let oracle = finite_horizon(&mdp, horizon);
            for s in 0..2 {
                let sol = pomdp_finite_horizon(&pomdp, &BeliefState::point(2, s), horizon, &limits).unwrap();
                assert!((sol.value - oracle.values[s]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn bandit_hand_check() {
    let limits = Limits::default();
    let inst = RestlessBanditInstance::exhaustion_pair();
    let best = restless_bandit_brute(&inst, 1, 4, &limits).unwrap();
    assert_eq!(best.sequences_evaluated, 16);
    for arm in 0..2 {
        assert!(best.total_reward > inst.simulate(&vec![vec![arm]; 4]).unwrap());
    }
    let solo = RestlessBanditInstance::new(vec![BanditArm {
        initial: 1,
        rewards: vec![2.0, 7.0],
        played: vec![vec![0, 1], vec![1, 0]],
        rested: vec![vec![1, 0], vec![0, 1]],
    }])
    .unwrap();
    assert_eq!(
        restless_bandit_brute(&solo, 1, 3, &limits).unwrap().total_reward,
        7.0 + 2.0 + 7.0
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn raising_a_reward_never_lowers_values(seed in any::<u64>(), bump in 0.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mdp = random_mdp(&mut rng, 3, 2, 0.85, false);
        let (s, a, t) = (rng.gen_range(0..3), rng.gen_range(0..2), rng.gen_range(0..3));
        let mut raised = mdp.clone();
        raised.set_reward(s, a, t, mdp.reward(s, a, t) + bump);
        let tol = 1e-9;
        let before = value_iteration(&mdp, tol).unwrap();
        let after = value_iteration(&raised, tol).unwrap();
        for (b, a) in before.values.iter().zip(&after.values) {
            prop_assert!(*a >= b - 2.0 * tol);
        }
    }

    #[test]
    fn bellman_residual_below_tolerance(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mdp = random_mdp(&mut rng, 4, 2, 0.9, false);
        let tol = 1e-6;
        let vi = value_iteration(&mdp, tol).unwrap();
        for s in 0..4 {
            let backup = (0..2).map(|a| mdp.q_value(s, a, &vi.values)).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!((backup - vi.values[s]).abs() < tol);
        }
    }

    #[test]
    fn pomdp_value_grows_with_horizon(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mdp = random_mdp(&mut rng, 2, 2, 0.9, true);
        let observation = (0..2).map(|_| random_rows(&mut rng, 2, 2)).collect();
        let pomdp = PartiallyObservableMdp::new(mdp, vec!["o0".into(), "o1".into()], observation).unwrap();
        let belief = BeliefState::new(random_rows(&mut rng, 1, 2).remove(0)).unwrap();
        let mut last = f64::NEG_INFINITY;
        for horizon in 1..=3 {
            let v = pomdp_finite_horizon(&pomdp, &belief, horizon, &Limits::default()).unwrap().value;
            prop_assert!(v >= last - 1e-12);
            last = v;
        }
    }
}
