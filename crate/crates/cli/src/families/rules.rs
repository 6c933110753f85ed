//! Golden-rule verdicts and duty screening.

use clap::{Args, ValueEnum};
use mtl_core::builtin::{self, ProfileSet};
use mtl_core::rules::{check_duties, gr1_permissible, gr2_permissible, Action, DutySet, State};
use serde::Deserialize;

use crate::{Cell, Context, Failure, Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleOp {
    Gr1,
    Gr2,
    Both,
    Duties,
}

#[derive(Debug, Args)]
pub struct RulesArgs {
    #[arg(value_enum)]
    op: RuleOp,
    /// Bundled profile set for gr1/gr2.
    name: Option<String>,
    /// Smallest acceptable change to any preference.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    threshold: f64,
    /// Check one action instead of screening all of them.
    #[arg(long)]
    action: Option<String>,
}

/// `{"duties": [...], "state": {...}, "actions": [...]}`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DutyDoc {
    duties: DutySet,
    #[serde(default)]
    state: State,
    actions: Vec<Action>,
}

const COLUMNS: [&str; 5] = ["rule", "action", "permissible", "inspections", "violated"];

pub fn run(args: RulesArgs, ctx: &Context) -> Result<Report, Failure> {
    if args.op == RuleOp::Duties {
        return duties(args, ctx);
    }
    let set = ctx.load(args.name.as_deref(), "judge", ProfileSet::from_json, builtin::profiles)?;
    let actions: Vec<String> = match &args.action {
        Some(a) => vec![a.clone()],
        None => set.actor.actions().to_vec(),
    };
    let mut table = Table::new(&COLUMNS);
    let mut push = |rule: &str, action: &str, permissible: bool, inspections: u64| {
        table.push(vec![
            rule.into(),
            action.into(),
            permissible.into(),
            inspections.into(),
            Cell::Empty,
        ]);
    };
    for action in &actions {
        if matches!(args.op, RuleOp::Gr1 | RuleOp::Both) {
            let v = gr1_permissible(action, &set.actor, args.threshold)?;
            push("gr1", action, v.permissible, v.inspections);
        }
        if matches!(args.op, RuleOp::Gr2 | RuleOp::Both) {
            let v = gr2_permissible(action, &set.affected, args.threshold)?;
            push("gr2", action, v.permissible, v.inspections);
        }
    }
    Ok(table.into())
}

fn duties(args: RulesArgs, ctx: &Context) -> Result<Report, Failure> {
    if args.name.is_some() {
        return Err(Failure::Usage("duty screening reads --instance only".into()));
    }
    let Some((path, text)) = ctx.instance_text()? else {
        return Err(Failure::Usage("duty screening needs --instance".into()));
    };
    let doc: DutyDoc = serde_json::from_str(&text).map_err(|e| Failure::Input { path, source: e.into() })?;
    let mut table = Table::new(&COLUMNS);
    for action in doc
        .actions
        .iter()
        .filter(|a| args.action.as_ref().is_none_or(|n| *n == a.name))
    {
        let report = check_duties(action, &doc.state, &doc.duties)?;
        table.push(vec![
            "duties".into(),
            action.name.as_str().into(),
            report.permissible().into(),
            report.evaluations.into(),
            report.violated.join(";").into(),
        ]);
    }
    if let (Some(name), true) = (&args.action, table.rows().is_empty()) {
        return Err(mtl_core::Error::Domain(format!("no action named `{name}`")).into());
    }
    Ok(table.into())
}
