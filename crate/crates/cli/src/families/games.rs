//! Equilibria of the bundled or supplied games.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use mtl_core::builtin;
use mtl_core::games::{
    bounded_automata_equilibrium, ce_max_violation, correlated_equilibrium_lp, max_welfare_nash, pure_nash,
    support_enumeration_2p, tournament, CeObjective, MixedEquilibrium, MixedProfile, MooreMachine, NormalFormGame,
};

use super::join_numbers;
use crate::{Context, Failure, Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GameOp {
    /// Pure-strategy Nash equilibria.
    Pure,
    /// All equilibria found by support enumeration.
    Mixed,
    /// Best Nash welfare next to best correlated welfare.
    Welfare,
    /// Welfare-maximizing correlated equilibrium.
    Ce,
    /// Bounded-automata equilibrium check of a repeated-game machine.
    Automata,
    /// Round robin among the bundled machines.
    Tournament,
}

#[derive(Debug, Args)]
pub struct GamesArgs {
    #[arg(value_enum)]
    op: GameOp,
    /// Bundled game.
    name: Option<String>,
    /// Rounds of repeated play.
    #[arg(long, default_value_t = 10)]
    rounds: usize,
    /// Largest machine size a deviator may use.
    #[arg(long, default_value_t = 2)]
    states: usize,
    /// Machine under test: a bundled name or a JSON file.
    #[arg(long, default_value = "tit-for-tat")]
    candidate: String,
}

fn load_machine(spec: &str) -> Result<MooreMachine, Failure> {
    if builtin::machine_names().contains(&spec) {
        return Ok(builtin::machine(spec)?);
    }
    let path = PathBuf::from(spec);
    if !path.is_file() {
        return Err(mtl_core::Error::Validation(format!(
            "`{spec}` is neither a bundled machine ({}) nor a file",
            builtin::machine_names().join(", ")
        ))
        .into());
    }
    let text = std::fs::read_to_string(&path).map_err(|source| Failure::Io {
        path: path.clone(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| Failure::Input { path, source: e.into() })
}

fn parse_game(text: &str) -> mtl_core::Result<NormalFormGame> {
    Ok(serde_json::from_str(text)?)
}

const MIXED_COLUMNS: [&str; 7] = [
    "equilibrium",
    "row",
    "col",
    "row_payoff",
    "col_payoff",
    "welfare",
    "deviation_gain",
];

fn mixed_row(game: &NormalFormGame, index: usize, eq: &MixedEquilibrium) -> Result<Vec<crate::Cell>, Failure> {
    let profile = MixedProfile::new(game, vec![eq.row.clone(), eq.col.clone()])?;
    Ok(vec![
        index.into(),
        join_numbers(&eq.row).into(),
        join_numbers(&eq.col).into(),
        eq.payoffs[0].into(),
        eq.payoffs[1].into(),
        eq.welfare().into(),
        game.max_deviation_gain(&profile).into(),
    ])
}

pub fn run(args: GamesArgs, ctx: &Context) -> Result<Report, Failure> {
    let game = ctx.load(args.name.as_deref(), "prisoners-dilemma", parse_game, builtin::game)?;
    let table = match args.op {
        GameOp::Pure => {
            let found = pure_nash(&game);
            let mut table = Table::new(&["profile", "payoffs", "welfare", "deviation_checks"]);
            for p in &found.profiles {
                table.push(vec![
                    game.profile_label(p).into(),
                    join_numbers(game.payoff_vector(p)).into(),
                    game.welfare(p).into(),
                    found.deviation_checks.into(),
                ]);
            }
            table
        }
        GameOp::Mixed => {
            let found = support_enumeration_2p(&game)?;
            let mut table = Table::new(&MIXED_COLUMNS);
            for (i, eq) in found.equilibria.iter().enumerate() {
                table.push(mixed_row(&game, i, eq)?);
            }
            table
        }
        GameOp::Welfare => {
            let (_, ne) = max_welfare_nash(&game, &ctx.limits)?;
            let ce = correlated_equilibrium_lp(&game, CeObjective::MaxWelfare, &ctx.limits)?;
            let mut table = Table::new(&["concept", "welfare"]);
            table.push(vec!["nash".into(), ne.into()]);
            table.push(vec!["correlated".into(), ce.expected_welfare(&game).into()]);
            table
        }
        GameOp::Ce => {
            let ce = correlated_equilibrium_lp(&game, CeObjective::MaxWelfare, &ctx.limits)?;
            let (welfare, violation) = (ce.expected_welfare(&game), ce_max_violation(&game, &ce));
            let mut table = Table::new(&["profile", "probability", "welfare", "max_violation"]);
            for (idx, p) in ce.probabilities.iter().enumerate() {
                table.push(vec![
                    game.profile_label(&game.profile_of(idx)).into(),
                    (*p).into(),
                    welfare.into(),
                    violation.into(),
                ]);
            }
            table
        }
        GameOp::Automata => {
            let candidate = load_machine(&args.candidate)?;
            let check = bounded_automata_equilibrium(&game, args.states, args.rounds, &candidate, &ctx.limits)?;
            let mut table = Table::new(&[
                "seat",
                "candidate_payoff",
                "best_deviation_payoff",
                "is_equilibrium",
                "machines_checked",
            ]);
            for seat in 0..2 {
                table.push(vec![
                    seat.into(),
                    check.candidate_payoff[seat].into(),
                    check.best_deviation_payoff[seat].into(),
                    check.is_equilibrium.into(),
                    check.machines_checked.into(),
                ]);
            }
            table
        }
        GameOp::Tournament => {
            let entrants = builtin::machine_names()
                .into_iter()
                .map(|n| Ok((n.to_string(), builtin::machine(n)?)))
                .collect::<mtl_core::Result<Vec<_>>>()?;
            let mut table = Table::new(&["a", "b", "rounds", "payoff_a", "payoff_b"]);
            for row in tournament(&entrants, args.rounds, &game)? {
                table.push(vec![
                    row.pair.0.into(),
                    row.pair.1.into(),
                    row.rounds.into(),
                    row.payoffs.0.into(),
                    row.payoffs.1.into(),
                ]);
            }
            table
        }
    };
    Ok(table.into())
}
