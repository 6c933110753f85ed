//! Decision rules over risky actions.

use clap::{Args, ValueEnum};
use mtl_core::builtin;
use mtl_core::uncertain::{actions_from_json, decide, DecisionRule};

use crate::{Context, Failure, Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleChoice {
    MaxEu,
    Minmax,
    Both,
}

#[derive(Debug, Args)]
pub struct UncertainArgs {
    /// Bundled lottery set.
    name: Option<String>,
    #[arg(long, value_enum, default_value_t = RuleChoice::Both)]
    rule: RuleChoice,
}

pub fn run(args: UncertainArgs, ctx: &Context) -> Result<Report, Failure> {
    let actions = ctx.load(args.name.as_deref(), "lotteries", actions_from_json, builtin::lotteries)?;
    let rules = match args.rule {
        RuleChoice::MaxEu => vec![DecisionRule::MaxExpectedUtility],
        RuleChoice::Minmax => vec![DecisionRule::Minmax],
        RuleChoice::Both => vec![DecisionRule::MaxExpectedUtility, DecisionRule::Minmax],
    };
    let mut table = Table::new(&["rule", "action", "score", "chosen", "inspections"]);
    for rule in rules {
        let decision = decide(&actions, rule)?;
        for (i, (action, score)) in actions.iter().zip(&decision.scores).enumerate() {
            table.push(vec![
                rule.to_string().into(),
                action.label().into(),
                (*score).into(),
                (i == decision.index).into(),
                decision.inspections.into(),
            ]);
        }
    }
    Ok(table.into())
}
