//! Planner call counts and search-space dominance.

use mtl_core::planner::{
    predicted_calls, solve_c1, solve_c2, solve_c3, solve_c4, ActionEnvironment, CallMode, MeteredOracle, Plan,
    ValueProfile,
};
use mtl_core::Limits;
use proptest::prelude::*;

fn env(n: usize, oracle: MeteredOracle) -> ActionEnvironment {
    ActionEnvironment::with_indexed_actions(n, oracle).unwrap()
}

fn factorial(k: u64) -> u64 {
    (1..=k).product()
}

/// Ordered plans of distinct actions: sum over lengths of n!/(n-k)!.
fn sequences(n: u64) -> u64 {
    (1..=n).map(|k| factorial(n) / factorial(n - k)).sum()
}

/// Best value over all non-empty subsets, scanned independently of the
/// solver's enumerators.
fn best_subset(n: usize, seed: u64) -> f64 {
    let oracle = MeteredOracle::seeded(seed);
    let mut probe = env(n, oracle);
    let mut best = f64::NEG_INFINITY;
    for mask in 1u32..1 << n {
        let steps: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        best = best.max(probe.oracle.evaluate(&Plan::new(steps, false).unwrap()));
    }
    best
}

#[test]
fn closed_form_counts() {
    let limits = Limits::default();
    for n in 1..=12usize {
        let nu = n as u64;
        assert_eq!(solve_c1(&mut env(n, MeteredOracle::seeded(1))).unwrap().calls, nu);
        assert_eq!(
            solve_c3(&mut env(n, MeteredOracle::seeded(1)), false).unwrap().calls,
            nu * (nu + 1) / 2
        );
        assert_eq!(
            solve_c3(&mut env(n, MeteredOracle::seeded(1)), true).unwrap().calls,
            nu * nu
        );
        assert_eq!(
            solve_c4(&mut env(n, MeteredOracle::seeded(1)), false, &limits)
                .unwrap()
                .calls,
            (1 << n) - 1
        );
        assert_eq!(predicted_calls(CallMode::C4Unordered, nu, 1).unwrap(), (1 << n) - 1);
    }
    for n in 1..=7u64 {
        let calls = solve_c4(&mut env(n as usize, MeteredOracle::seeded(1)), true, &limits)
            .unwrap()
            .calls;
        assert_eq!(calls, sequences(n));
        // floor(e * n!) - 1 for n >= 1.
        assert_eq!(calls, (std::f64::consts::E * factorial(n) as f64).floor() as u64 - 1);
    }
    assert_eq!(predicted_calls(CallMode::C4Unordered, 4, 1).unwrap(), 15);
    assert_eq!(predicted_calls(CallMode::C4Ordered, 4, 1).unwrap(), 64);
    assert_eq!(predicted_calls(CallMode::C4Unordered, 30, 1).unwrap(), 1_073_741_823);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn larger_spaces_dominate(n in 1usize..=8, seed in any::<u64>()) {
        let limits = Limits::default();
        let c1 = solve_c1(&mut env(n, MeteredOracle::seeded(seed))).unwrap();
        let c3 = solve_c3(&mut env(n, MeteredOracle::seeded(seed)), false).unwrap();
        let c4 = solve_c4(&mut env(n, MeteredOracle::seeded(seed)), false, &limits).unwrap();
        let c4o = solve_c4(&mut env(n, MeteredOracle::seeded(seed)), true, &limits).unwrap();
        prop_assert!(c4.value >= c3.value);
        prop_assert!(c3.value >= c1.value);
        prop_assert!(c4o.value >= c4.value);
        prop_assert!(c4o.calls >= c4.calls);
        prop_assert_eq!(c4.value, best_subset(n, seed));
    }

    #[test]
    fn order_blind_oracle_gains_nothing_from_order(n in 1usize..=6, seed in any::<u64>()) {
        let limits = Limits::default();
        let unordered = solve_c4(&mut env(n, MeteredOracle::seeded_symmetric(seed)), false, &limits).unwrap();
        let ordered = solve_c4(&mut env(n, MeteredOracle::seeded_symmetric(seed)), true, &limits).unwrap();
        prop_assert_eq!(unordered.value, ordered.value);
        let pair_u = solve_c3(&mut env(n, MeteredOracle::seeded_symmetric(seed)), false).unwrap();
        let pair_o = solve_c3(&mut env(n, MeteredOracle::seeded_symmetric(seed)), true).unwrap();
        prop_assert_eq!(pair_u.value, pair_o.value);
    }

    #[test]
    fn deterministic(n in 1usize..=7, seed in any::<u64>(), ordered in any::<bool>()) {
        let limits = Limits::default();
        let a = solve_c4(&mut env(n, MeteredOracle::seeded(seed)), ordered, &limits).unwrap();
        let b = solve_c4(&mut env(n, MeteredOracle::seeded(seed)), ordered, &limits).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn additive_values_pick_all_positive(values in prop::collection::vec(-20i32..20, 1..10)) {
        let values: Vec<f64> = values.into_iter().map(f64::from).collect();
        let n = values.len();
        let r = solve_c4(&mut env(n, MeteredOracle::additive(values.clone())), false, &Limits::default()).unwrap();
        let positive: f64 = values.iter().filter(|v| **v > 0.0).sum();
        let expected = if positive > 0.0 { positive } else { values.iter().copied().fold(f64::NEG_INFINITY, f64::max) };
        prop_assert_eq!(r.value, expected);
    }

    #[test]
    fn c2_calls_are_n_times_values(n in 1usize..=20, k in 1usize..=5, seed in any::<u64>()) {
        let e = env(n, MeteredOracle::seeded(seed));
        let mut profile = ValueProfile::seeded(seed, k).unwrap();
        let r = solve_c2(&e, &mut profile).unwrap();
        prop_assert_eq!(r.calls, (n * k) as u64);
        prop_assert_eq!(predicted_calls(CallMode::C2, n as u64, k as u64).unwrap(), (n * k) as u64);
    }
}

#[test]
fn caps_refuse_before_calling() {
    let limits = Limits::default();
    let mut e = env(21, MeteredOracle::seeded(0));
    let err = solve_c4(&mut e, false, &limits).unwrap_err();
    assert!(err.is_cap_refusal());
    assert_eq!(e.oracle.calls(), 0);
    let mut e = env(11, MeteredOracle::seeded(0));
    assert!(solve_c4(&mut e, true, &limits).unwrap_err().is_cap_refusal());
    assert_eq!(e.oracle.calls(), 0);
}
