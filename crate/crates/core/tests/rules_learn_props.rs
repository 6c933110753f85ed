//! Golden-rule and learning-theory invariants.

use mtl_core::learn::{
    nfl_weather, pac_sample_bound, realized_labelings, shatters, vc_dimension, vc_sample_bound, Halfspaces2d,
    PacRequest, Thresholds, WeatherPredictor,
};
use mtl_core::rules::{gr1_permissible, gr1_screen, gr2_permissible, gr2_screen, judge_scenario, PreferenceProfile};
use mtl_core::Limits;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_profile(rng: &mut ChaCha8Rng, agent: &str, actions: usize, prefs: usize) -> PreferenceProfile {
    PreferenceProfile::new(
        agent,
        (0..actions).map(|a| format!("act{a}")).collect(),
        (0..prefs).map(|p| format!("pref{p}")).collect(),
        (0..actions)
            .map(|_| (0..prefs).map(|_| f64::from(rng.gen_range(-3i32..=3))).collect())
            .collect(),
    )
    .unwrap()
}

#[test]
fn gr2_with_only_self_is_gr1() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let (n, p) = (rng.gen_range(1..=4), rng.gen_range(1..=6));
        let own = random_profile(&mut rng, "me", n, p);
        let threshold = f64::from(rng.gen_range(-1i32..=0));
        let one = gr1_screen(&own, threshold).unwrap();
        let two = gr2_screen(own.actions(), std::slice::from_ref(&own), threshold).unwrap();
        assert_eq!(one, two);
    }
}

#[test]
fn gr2_inspection_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let agents: Vec<PreferenceProfile> = (0..3)
        .map(|i| random_profile(&mut rng, &format!("agent{i}"), 2, 5))
        .collect();
    let screening = gr2_screen(agents[0].actions(), &agents, 0.0).unwrap();
    assert_eq!(screening.inspections, 30);
    let single = gr2_permissible("act0", &agents, 0.0).unwrap();
    assert_eq!(single.inspections, 15);
}

#[test]
fn judge_verdicts() {
    let (judge, affected) = judge_scenario();
    assert!(!gr1_permissible("imprison", &judge, 0.0).unwrap().permissible);
    assert!(gr2_permissible("imprison", &affected, 0.0).unwrap().permissible);
}

#[test]
fn nfl_for_random_predictors() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let p = WeatherPredictor::random(&mut rng);
        let r = nfl_weather(&p);
        assert_eq!(r.mean_error, 0.5);
        assert_eq!(r.error_histogram(), [1, 3, 3, 1]);
    }
}

fn random_points(rng: &mut ChaCha8Rng, m: usize) -> Vec<[f64; 2]> {
    (0..m).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect()
}

#[test]
fn four_points_never_shattered() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let limits = Limits::default();
    for _ in 0..100 {
        assert!(!shatters(&Halfspaces2d, &random_points(&mut rng, 4), &limits).unwrap());
    }
}

#[test]
fn random_triangles_shattered() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let limits = Limits::default();
    for _ in 0..100 {
        assert!(shatters(&Halfspaces2d, &random_points(&mut rng, 3), &limits).unwrap());
    }
}

/// Brute-force check of one labeling: scan a fine grid of directions and
/// every threshold between projected points. Independent of the candidate
/// construction used by the class.
fn separable_by_scan(points: &[[f64; 2]], labels: u32) -> bool {
    let m = points.len();
    if labels == 0 || labels == (1 << m) - 1 {
        return true;
    }
    for k in 0..3600 {
        let t = std::f64::consts::TAU * k as f64 / 3600.0;
        let w = [t.cos(), t.sin()];
        let proj: Vec<f64> = points.iter().map(|p| w[0] * p[0] + w[1] * p[1]).collect();
        let min_pos = (0..m)
            .filter(|i| labels >> i & 1 == 1)
            .map(|i| proj[i])
            .fold(f64::INFINITY, f64::min);
        let max_neg = (0..m)
            .filter(|i| labels >> i & 1 == 0)
            .map(|i| proj[i])
            .fold(f64::NEG_INFINITY, f64::max);
        if min_pos > max_neg {
            return true;
        }
    }
    false
}

#[test]
fn halfspace_candidates_match_direction_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..40 {
        let m = rng.gen_range(2..=5);
        let pts = random_points(&mut rng, m);
        let seen = realized_labelings(&Halfspaces2d, &pts);
        for labels in 0..1u32 << m {
            // A direction grid can miss very thin separations, so it only
            // bounds the realized set from below.
            if separable_by_scan(&pts, labels) {
                assert!(seen.contains(&labels), "{pts:?} labeling {labels:b}");
            }
        }
    }
}

#[test]
fn vc_dimensions() {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let sets = move |m: usize| (0..10).map(|_| random_points(&mut rng, m)).collect::<Vec<_>>();
    assert_eq!(vc_dimension(&Halfspaces2d, sets, 6, &limits).unwrap(), 3);
    let line = |m: usize| vec![(0..m).map(|i| i as f64 * 0.5).collect::<Vec<f64>>()];
    assert_eq!(vc_dimension(&Thresholds, line, 5, &limits).unwrap(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subsets_of_shattered_sets_are_shattered(seed in any::<u64>(), m in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = random_points(&mut rng, m);
        let limits = Limits::default();
        if shatters(&Halfspaces2d, &pts, &limits).unwrap() {
            for skip in 0..m {
                let sub: Vec<[f64; 2]> = pts.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, p)| *p).collect();
                prop_assert!(shatters(&Halfspaces2d, &sub, &limits).unwrap());
            }
        }
    }

    #[test]
    fn pac_bound_monotone(eps in 0.01f64..0.9, d1 in 0.001f64..0.9, d2 in 0.001f64..0.9, h1 in 1u64..100_000, h2 in 1u64..100_000) {
        let (dlo, dhi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let (hlo, hhi) = if h1 <= h2 { (h1, h2) } else { (h2, h1) };
        let at = |d: f64, h: u64| pac_sample_bound(&PacRequest::new(eps, d).unwrap(), h).unwrap();
        prop_assert!(at(dlo, hlo) >= at(dhi, hlo));
        prop_assert!(at(dlo, hhi) >= at(dlo, hlo));
    }

    #[test]
    fn vc_bound_monotone(e1 in 0.01f64..0.9, e2 in 0.01f64..0.9, delta in 0.01f64..0.9, v1 in 1u64..50, v2 in 1u64..50) {
        let (elo, ehi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let (vlo, vhi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
        let at = |e: f64, v: u64| vc_sample_bound(&PacRequest::new(e, delta).unwrap(), v, 1.0).unwrap();
        prop_assert!(at(elo, vlo) >= at(ehi, vlo));
        prop_assert!(at(elo, vhi) >= at(elo, vlo));
    }
}
