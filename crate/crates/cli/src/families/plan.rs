//! Plan search and growth tables.

use std::ops::RangeInclusive;
use std::time::Instant;

use clap::{ArgAction, Args, ValueEnum};
use mtl_core::growth::{growth_table, GROWTH_VALUE_FUNCTIONS};
use mtl_core::planner::{
    predicted_calls, solve_c1, solve_c2, solve_c3, solve_c4, ActionEnvironment, CallMode, MeteredOracle, Plan,
    ValueProfile,
};
use mtl_core::{Error, Limits};
use serde::Deserialize;

use crate::{parse_range, Cell, Context, Failure, Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    /// Best single action.
    C1,
    /// Best single action under several additive value functions.
    C2,
    /// Best plan of at most two actions.
    C3,
    /// Best plan of any length.
    C4,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(value_enum)]
    solver: Solver,
    /// Action counts to sweep, `a..b` inclusive. Defaults to 1..8 for
    /// generated oracles; an instance fixes n to its own size.
    #[arg(long, value_parser = parse_range)]
    n: Option<RangeInclusive<u64>>,
    /// Treat plans as sequences.
    #[arg(long, action = ArgAction::Set, num_args = 0..=1, default_value_t = false, default_missing_value = "true")]
    ordered: bool,
    /// Value functions for c2 on generated oracles.
    #[arg(long, default_value_t = 3)]
    values: u64,
    /// Record wall time per row; otherwise the seconds column reads 0.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    /// One of c1, c2, c3u, c3o, c4u, c4o.
    #[arg(value_parser = parse_mode)]
    mode: CallMode,
    #[arg(long, value_parser = parse_range)]
    n: RangeInclusive<u64>,
    #[arg(long)]
    timing: bool,
}

fn parse_mode(text: &str) -> Result<CallMode, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

/// `{"actions": [...], "values": [[v per value function], ...]}` with one
/// row per action.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    actions: Vec<String>,
    values: Vec<Vec<f64>>,
}

fn call_mode(solver: Solver, ordered: bool) -> CallMode {
    match (solver, ordered) {
        (Solver::C1, _) => CallMode::C1,
        (Solver::C2, _) => CallMode::C2,
        (Solver::C3, false) => CallMode::C3Unordered,
        (Solver::C3, true) => CallMode::C3Ordered,
        (Solver::C4, false) => CallMode::C4Unordered,
        (Solver::C4, true) => CallMode::C4Ordered,
    }
}

/// Where the actions and their values come from.
enum Source {
    Generated { seed: u64, values: u64 },
    Plans(String),
    Profile(Vec<String>, Vec<Vec<f64>>),
}

struct Solved {
    label: String,
    value: f64,
    calls: u64,
    values: u64,
}

fn plan_label(env: &ActionEnvironment, plan: &Plan) -> String {
    let sep = if plan.ordered() { ">" } else { "+" };
    plan.steps()
        .iter()
        .map(|&i| env.actions()[i].as_str())
        .collect::<Vec<_>>()
        .join(sep)
}

fn solve(mode: CallMode, n: usize, source: &Source, limits: &Limits) -> mtl_core::Result<Solved> {
    if let Source::Profile(actions, table) = source {
        let env = ActionEnvironment::new(actions.clone(), MeteredOracle::additive(vec![0.0; actions.len()]))?;
        let mut profile = ValueProfile::from_table(table)?;
        let choice = solve_c2(&env, &mut profile)?;
        return Ok(Solved {
            label: env.actions()[choice.index].clone(),
            value: choice.value,
            calls: choice.calls,
            values: profile.len() as u64,
        });
    }
    let mut env = match source {
        Source::Generated { seed, .. } => ActionEnvironment::with_indexed_actions(n, MeteredOracle::seeded(*seed))?,
        Source::Plans(text) => ActionEnvironment::from_json(text)?,
        Source::Profile(..) => unreachable!("handled above"),
    };
    let single = |env: &ActionEnvironment, index: usize, value: f64, calls: u64| Solved {
        label: env.actions()[index].clone(),
        value,
        calls,
        values: 1,
    };
    let planned = |env: &ActionEnvironment, plan: &Plan, value: f64, calls: u64| Solved {
        label: plan_label(env, plan),
        value,
        calls,
        values: 1,
    };
    Ok(match mode {
        CallMode::C1 => {
            let c = solve_c1(&mut env)?;
            single(&env, c.index, c.value, c.calls)
        }
        CallMode::C2 => {
            let Source::Generated { seed, values } = source else {
                return Err(Error::Validation("c2 instances list per-action value rows".into()));
            };
            let mut profile = ValueProfile::seeded(*seed, *values as usize)?;
            let c = solve_c2(&env, &mut profile)?;
            Solved {
                values: *values,
                ..single(&env, c.index, c.value, c.calls)
            }
        }
        CallMode::C3Unordered | CallMode::C3Ordered => {
            let c = solve_c3(&mut env, mode == CallMode::C3Ordered)?;
            planned(&env, &c.plan, c.value, c.calls)
        }
        CallMode::C4Unordered | CallMode::C4Ordered => {
            let c = solve_c4(&mut env, mode == CallMode::C4Ordered, limits)?;
            planned(&env, &c.plan, c.value, c.calls)
        }
    })
}

fn predicted_cell(mode: CallMode, n: u64, values: u64) -> Cell {
    predicted_calls(mode, n, values).map_or_else(|_| Cell::Text("overflow".into()), Cell::from)
}

pub fn run(args: PlanArgs, ctx: &Context) -> Result<Report, Failure> {
    let mode = call_mode(args.solver, args.ordered);
    let (source, range) = match ctx.instance_text()? {
        Some((path, text)) => {
            if args.n.is_some() {
                return Err(Failure::Usage(
                    "--n applies to generated oracles, not --instance".into(),
                ));
            }
            let invalid = |source: Error| Failure::Input {
                path: path.clone(),
                source,
            };
            let (source, n) = if mode == CallMode::C2 {
                let doc: ProfileDoc = serde_json::from_str(&text).map_err(|e| invalid(e.into()))?;
                if doc.values.len() != doc.actions.len() {
                    return Err(invalid(Error::Validation("one value row per action".into())));
                }
                let n = doc.actions.len();
                (Source::Profile(doc.actions, doc.values), n)
            } else {
                let n = ActionEnvironment::from_json(&text).map_err(invalid)?.len();
                (Source::Plans(text), n)
            };
            (source, n as u64..=n as u64)
        }
        None => (
            Source::Generated {
                seed: ctx.seed,
                values: args.values,
            },
            args.n.unwrap_or(1..=8),
        ),
    };

    let mut table = Table::new(&["n", "plan", "value", "metered", "predicted", "seconds"]);
    let mut refusal = None;
    for n in range {
        let size = usize::try_from(n).map_err(|_| Error::Overflow(format!("n = {n}")))?;
        let started = Instant::now();
        match solve(mode, size, &source, &ctx.limits) {
            Ok(solved) => {
                let seconds = if args.timing {
                    started.elapsed().as_secs_f64()
                } else {
                    0.0
                };
                let predicted = predicted_calls(mode, n, solved.values)?;
                if predicted != solved.calls {
                    return Err(Error::Internal(format!(
                        "{mode} at n = {n} made {} calls, predicted {predicted}",
                        solved.calls
                    ))
                    .into());
                }
                table.push(vec![
                    n.into(),
                    solved.label.into(),
                    solved.value.into(),
                    solved.calls.into(),
                    predicted.into(),
                    seconds.into(),
                ]);
            }
            Err(e) if e.is_cap_refusal() => {
                let values = if mode == CallMode::C2 { args.values } else { 1 };
                table.push(vec![
                    n.into(),
                    "refused".into(),
                    Cell::Empty,
                    "refused".into(),
                    predicted_cell(mode, n, values),
                    0.0.into(),
                ]);
                refusal = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Report { table, refusal })
}

pub fn growth(args: GrowthArgs, ctx: &Context) -> Result<Report, Failure> {
    if ctx.instance.is_some() {
        return Err(Failure::Usage("growth runs on generated oracles only".into()));
    }
    let result = growth_table(args.mode, args.n, ctx.seed, &ctx.limits, args.timing)?;
    if !result.all_match() {
        return Err(Error::Internal(format!("{} metered count differs from its closed form", args.mode)).into());
    }
    let mut table = Table::new(&["n", "predicted", "metered", "seconds"]);
    for row in &result.rows {
        table.push(vec![
            row.n.into(),
            row.predicted.into(),
            row.metered.into(),
            row.seconds.unwrap_or(0.0).into(),
        ]);
    }
    let refusal = result.refused.map(|(n, reason)| {
        table.push(vec![
            n.into(),
            predicted_cell(args.mode, n, GROWTH_VALUE_FUNCTIONS),
            "refused".into(),
            0u64.into(),
        ]);
        reason
    });
    Ok(Report { table, refusal })
}
