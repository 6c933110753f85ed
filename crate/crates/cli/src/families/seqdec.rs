//! Value iteration, finite-horizon POMDP search and restless bandits.

use clap::{Args, ValueEnum};
use mtl_core::builtin;
use mtl_core::seqdec::{
    contraction_bound, evaluate_policy, finite_horizon, policy_tree_count, pomdp_finite_horizon, restless_bandit_brute,
    value_iteration, BeliefState, MarkovDecisionProcess, PartiallyObservableMdp, Policy, RestlessBanditInstance,
};
use mtl_core::Error;

use super::parse_numbers;
use crate::{Cell, Context, Failure, Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeqOp {
    /// Infinite-horizon value iteration.
    Vi,
    /// Value of a fixed policy.
    Evaluate,
    /// Finite-horizon MDP values by backward induction.
    Horizon,
    /// Exhaustive policy-tree search from a belief.
    Pomdp,
    /// Best activation schedule of a restless bandit.
    Bandit,
}

#[derive(Debug, Args)]
pub struct SeqdecArgs {
    #[arg(value_enum)]
    op: SeqOp,
    /// Bundled instance.
    name: Option<String>,
    /// Value-iteration tolerance on the returned values.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Replace the instance's discount factor.
    #[arg(long)]
    discount: Option<f64>,
    #[arg(long)]
    horizon: Option<usize>,
    /// Starting belief as comma-separated probabilities; uniform by default.
    #[arg(long, value_parser = parse_numbers)]
    belief: Option<Vec<f64>>,
    /// One action per state, by name or index, comma-separated.
    #[arg(long)]
    policy: Option<String>,
    /// Arms activated at each bandit step.
    #[arg(long, default_value_t = 1)]
    arms_per_step: usize,
    /// Report the per-sweep residuals of value iteration instead of values.
    #[arg(long)]
    trace: bool,
}

fn parse_mdp(text: &str) -> mtl_core::Result<MarkovDecisionProcess> {
    Ok(serde_json::from_str(text)?)
}

fn parse_pomdp(text: &str) -> mtl_core::Result<PartiallyObservableMdp> {
    Ok(serde_json::from_str(text)?)
}

fn parse_bandit(text: &str) -> mtl_core::Result<RestlessBanditInstance> {
    Ok(serde_json::from_str(text)?)
}

fn parse_policy(mdp: &MarkovDecisionProcess, text: &str) -> mtl_core::Result<Policy> {
    let actions = text
        .split(',')
        .map(str::trim)
        .map(|item| {
            mdp.actions()
                .iter()
                .position(|a| a == item)
                .or_else(|| item.parse().ok())
                .ok_or_else(|| Error::Validation(format!("`{item}` is not an action")))
        })
        .collect::<mtl_core::Result<Vec<usize>>>()?;
    Policy::new(mdp, actions)
}

fn load_mdp(args: &SeqdecArgs, ctx: &Context) -> Result<MarkovDecisionProcess, Failure> {
    let mdp = ctx.load(args.name.as_deref(), "maintenance", parse_mdp, builtin::mdp)?;
    Ok(match args.discount {
        Some(d) => mdp.with_discount(d)?,
        None => mdp,
    })
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn run(args: SeqdecArgs, ctx: &Context) -> Result<Report, Failure> {
    let table = match args.op {
        SeqOp::Vi => {
            let mdp = load_mdp(&args, ctx)?;
            let vi = value_iteration(&mdp, args.tol)?;
            if args.trace {
                let mut table = Table::new(&["sweep", "residual"]);
                for (i, r) in vi.residuals.iter().enumerate() {
                    table.push(vec![(i + 1).into(), (*r).into()]);
                }
                table
            } else {
                let bound =
                    (mdp.discount() < 1.0).then(|| contraction_bound(mdp.discount(), args.tol, mdp.max_abs_reward()));
                let mut table = Table::new(&["state", "value", "action", "iterations", "bound"]);
                for (s, name) in mdp.states().iter().enumerate() {
                    table.push(vec![
                        name.as_str().into(),
                        vi.values[s].into(),
                        mdp.actions()[vi.policy.action(s)].as_str().into(),
                        vi.iterations.into(),
                        bound.into(),
                    ]);
                }
                table
            }
        }
        SeqOp::Evaluate => {
            let mdp = load_mdp(&args, ctx)?;
            let Some(spec) = &args.policy else {
                return Err(Failure::Usage("evaluate needs --policy".into()));
            };
            let policy = parse_policy(&mdp, spec)?;
            let values = evaluate_policy(&mdp, &policy, args.tol)?;
            let mut table = Table::new(&["state", "action", "value"]);
            for (s, name) in mdp.states().iter().enumerate() {
                table.push(vec![
                    name.as_str().into(),
                    mdp.actions()[policy.action(s)].as_str().into(),
                    values[s].into(),
                ]);
            }
            table
        }
        SeqOp::Horizon => {
            let mdp = load_mdp(&args, ctx)?;
            let horizon = args.horizon.unwrap_or(3);
            let result = finite_horizon(&mdp, horizon);
            let mut table = Table::new(&["state", "horizon", "value", "first_action"]);
            for (s, name) in mdp.states().iter().enumerate() {
                table.push(vec![
                    name.as_str().into(),
                    horizon.into(),
                    result.values[s].into(),
                    mdp.actions()[result.first_actions.action(s)].as_str().into(),
                ]);
            }
            table
        }
        SeqOp::Pomdp => {
            let pomdp = ctx.load(args.name.as_deref(), "tiger", parse_pomdp, builtin::pomdp)?;
            let pomdp = match args.discount {
                Some(d) => PartiallyObservableMdp::new(
                    pomdp.mdp().with_discount(d)?,
                    pomdp.observations().to_vec(),
                    observation_table(&pomdp),
                )?,
                None => pomdp,
            };
            let n = pomdp.mdp().states().len();
            let belief = match &args.belief {
                Some(p) => BeliefState::new(p.clone())?,
                None => BeliefState::uniform(n),
            };
            let horizon = args.horizon.unwrap_or(2);
            let predicted = u32::try_from(horizon).ok().and_then(|h| {
                policy_tree_count(pomdp.mdp().actions().len() as u64, pomdp.observations().len() as u64, h)
            });
            let solution = pomdp_finite_horizon(&pomdp, &belief, horizon, &ctx.limits)?;
            let mut table = Table::new(&["horizon", "value", "trees_evaluated", "predicted", "first_action"]);
            table.push(vec![
                horizon.into(),
                solution.value.into(),
                solution.trees_evaluated.into(),
                predicted.map_or(Cell::Text("overflow".into()), Cell::from),
                pomdp.mdp().actions()[solution.best_tree.actions[0]].as_str().into(),
            ]);
            table
        }
        SeqOp::Bandit => {
            let inst = ctx.load(args.name.as_deref(), "exhaustion", parse_bandit, builtin::bandit)?;
            let horizon = args.horizon.unwrap_or(4);
            let plan = restless_bandit_brute(&inst, args.arms_per_step, horizon, &ctx.limits)?;
            let per_step = binomial(inst.arms().len() as u128, args.arms_per_step as u128);
            let predicted = u32::try_from(horizon).ok().and_then(|h| per_step.checked_pow(h));
            let schedule: Vec<String> = plan
                .schedule
                .iter()
                .map(|step| step.iter().map(usize::to_string).collect::<Vec<_>>().join("+"))
                .collect();
            let mut table = Table::new(&[
                "horizon",
                "total_reward",
                "sequences_evaluated",
                "predicted",
                "schedule",
            ]);
            table.push(vec![
                horizon.into(),
                plan.total_reward.into(),
                plan.sequences_evaluated.into(),
                predicted.map_or(Cell::Text("overflow".into()), Cell::from),
                schedule.join(" ").into(),
            ]);
            table
        }
    };
    Ok(table.into())
}

fn observation_table(pomdp: &PartiallyObservableMdp) -> Vec<Vec<Vec<f64>>> {
    let (n_a, n_s, n_o) = (
        pomdp.mdp().actions().len(),
        pomdp.mdp().states().len(),
        pomdp.observations().len(),
    );
    (0..n_a)
        .map(|a| {
            (0..n_s)
                .map(|s| (0..n_o).map(|o| pomdp.observation_probability(a, s, o)).collect())
                .collect()
        })
        .collect()
}
