//! Growth tables: metered oracle calls next to their closed-form prediction.

use std::ops::RangeInclusive;
use std::time::Instant;

use crate::planner::{
    predicted_calls, solve_c1, solve_c2, solve_c3, solve_c4, ActionEnvironment, CallMode, MeteredOracle, ValueProfile,
};
use crate::{format_significant, Error, Limits, Result};

/// Number of value functions used for [`CallMode::C2`] rows.
pub const GROWTH_VALUE_FUNCTIONS: u64 = 3;

pub const GROWTH_HEADER: &str = "n,predicted,metered,seconds";

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub n: u64,
    pub predicted: u64,
    pub metered: u64,
    /// Wall time of the solver run, when timing was requested.
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthTable {
    pub mode: CallMode,
    pub rows: Vec<GrowthRow>,
    /// First `n` the solver refused, with the refusal message.
    pub refused: Option<(u64, String)>,
}

impl GrowthTable {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.metered == r.predicted)
    }

    /// CSV with header `n,predicted,metered,seconds`. Untimed rows print 0
    /// seconds so repeated runs are byte-identical. A refusal adds one final
    /// row whose metered column reads `refused`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(GROWTH_HEADER);
        out.push('\n');
        for r in &self.rows {
            let secs = r.seconds.map_or_else(|| "0".to_string(), format_significant);
            out.push_str(&format!("{},{},{},{}\n", r.n, r.predicted, r.metered, secs));
        }
        if let Some((n, _)) = &self.refused {
            let predicted = predicted_calls(self.mode, *n, GROWTH_VALUE_FUNCTIONS)
                .map_or_else(|_| "overflow".to_string(), |p| p.to_string());
            out.push_str(&format!("{n},{predicted},refused,0\n"));
        }
        out
    }
}

fn metered_calls(mode: CallMode, n: usize, seed: u64, limits: &Limits) -> Result<u64> {
    let mut env = ActionEnvironment::with_indexed_actions(n, MeteredOracle::seeded(seed))?;
    Ok(match mode {
        CallMode::C1 => solve_c1(&mut env)?.calls,
        CallMode::C2 => {
            let mut profile = ValueProfile::seeded(seed, GROWTH_VALUE_FUNCTIONS as usize)?;
            solve_c2(&env, &mut profile)?.calls
        }
        CallMode::C3Unordered => solve_c3(&mut env, false)?.calls,
        CallMode::C3Ordered => solve_c3(&mut env, true)?.calls,
        CallMode::C4Unordered => solve_c4(&mut env, false, limits)?.calls,
        CallMode::C4Ordered => solve_c4(&mut env, true, limits)?.calls,
    })
}

/// Runs the solver for `mode` at every `n` in the range against a seeded
/// oracle. Stops at the first cap refusal and records it.
pub fn growth_table(
    mode: CallMode,
    ns: RangeInclusive<u64>,
    seed: u64,
    limits: &Limits,
    timing: bool,
) -> Result<GrowthTable> {
    if ns.is_empty() {
        return Err(Error::Validation(format!("empty range {}..{}", ns.start(), ns.end())));
    }
    if *ns.start() == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let mut rows = Vec::new();
    let mut refused = None;
    for n in ns {
        let size = usize::try_from(n).map_err(|_| Error::Overflow(format!("n = {n}")))?;
        let started = Instant::now();
        match metered_calls(mode, size, seed, limits) {
            Ok(metered) => {
                let seconds = timing.then(|| started.elapsed().as_secs_f64());
                rows.push(GrowthRow {
                    n,
                    predicted: predicted_calls(mode, n, GROWTH_VALUE_FUNCTIONS)?,
                    metered,
                    seconds,
                });
            }
            Err(e) if e.is_cap_refusal() => {
                refused = Some((n, e.to_string()));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(GrowthTable { mode, rows, refused })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn predicted_column(mode: CallMode, hi: u64) -> Vec<u64> {
        growth_table(mode, 1..=hi, 1, &Limits::default(), false)
            .unwrap()
            .rows
            .iter()
            .map(|r| r.predicted)
            .collect()
    }

    #[test]
    fn closed_forms() {
        assert_eq!(
            predicted_column(CallMode::C4Unordered, 10),
            (1..=10).map(|n| (1 << n) - 1).collect::<Vec<u64>>()
        );
        assert_eq!(predicted_column(CallMode::C4Ordered, 6), vec![1, 4, 15, 64, 325, 1956]);
        assert_eq!(predicted_column(CallMode::C3Unordered, 5), vec![1, 3, 6, 10, 15]);
    }

    #[test]
    fn metered_equals_predicted() {
        for mode in CallMode::ALL {
            let t = growth_table(mode, 1..=6, 9, &Limits::default(), false).unwrap();
            assert!(t.all_match(), "{mode}");
            assert!(t.refused.is_none());
        }
    }

    #[test]
    fn deterministic_csv() {
        let a = growth_table(CallMode::C4Ordered, 1..=5, 3, &Limits::default(), false).unwrap();
        let b = growth_table(CallMode::C4Ordered, 1..=5, 3, &Limits::default(), false).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a.to_csv().starts_with("n,predicted,metered,seconds\n1,1,1,0\n"));
    }

    #[test]
    fn refusal_mid_range() {
        let limits = Limits::default().with_overrides("plan_ordered=3").unwrap();
        let t = growth_table(CallMode::C4Ordered, 2..=6, 0, &limits, false).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.refused.as_ref().unwrap().0, 4);
        assert!(t.to_csv().ends_with("4,64,refused,0\n"));
    }

    #[test]
    fn bad_ranges() {
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 5..=2;
        assert!(growth_table(CallMode::C1, empty, 0, &Limits::default(), false).is_err());
        assert!(growth_table(CallMode::C1, 0..=2, 0, &Limits::default(), false).is_err());
    }
}
