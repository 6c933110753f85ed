//! Moore machines in the iterated prisoner's dilemma.
//!
//! A machine's move depends only on its current state; after each round it
//! moves to the state selected by the opponent's last move. Strategy 0 of
//! the stage game is cooperation and strategy 1 is defection.
//!
//! [`bounded_automata_equilibrium`] asks a narrower question than the full
//! theory of repeated games with bounded automata: with the opponent fixed
//! to the candidate, can any machine of at most `s` states earn strictly
//! more than the candidate earns against itself? Every such machine is
//! enumerated.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::NormalFormGame;
use crate::{Error, Limits, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    C,
    D,
}

impl Move {
    pub fn index(self) -> usize {
        match self {
            Move::C => 0,
            Move::D => 1,
        }
    }

    fn from_bit(bit: bool) -> Move {
        if bit {
            Move::D
        } else {
            Move::C
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::C => "C",
            Move::D => "D",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MachineDoc", into = "MachineDoc")]
pub struct MooreMachine {
    initial: usize,
    output: Vec<Move>,
    /// `transition[state][opponent move]`.
    transition: Vec<[usize; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MachineDoc {
    states: usize,
    initial: usize,
    output: Vec<Move>,
    transition: Vec<[usize; 2]>,
}

impl TryFrom<MachineDoc> for MooreMachine {
    type Error = Error;

    fn try_from(doc: MachineDoc) -> Result<Self> {
        if doc.output.len() != doc.states || doc.transition.len() != doc.states {
            return Err(Error::Validation(format!(
                "machine declares {} states but has {} outputs and {} transition rows",
                doc.states,
                doc.output.len(),
                doc.transition.len()
            )));
        }
        MooreMachine::new(doc.initial, doc.output, doc.transition)
    }
}

impl From<MooreMachine> for MachineDoc {
    fn from(m: MooreMachine) -> Self {
        MachineDoc {
            states: m.output.len(),
            initial: m.initial,
            output: m.output,
            transition: m.transition,
        }
    }
}

impl MooreMachine {
    pub fn new(initial: usize, output: Vec<Move>, transition: Vec<[usize; 2]>) -> Result<Self> {
        let s = output.len();
        if s == 0 {
            return Err(Error::Validation("a machine needs at least one state".into()));
        }
        if transition.len() != s {
            return Err(Error::Validation("one transition row per state".into()));
        }
        if initial >= s || transition.iter().flatten().any(|&t| t >= s) {
            return Err(Error::Validation("state index out of range".into()));
        }
        Ok(MooreMachine {
            initial,
            output,
            transition,
        })
    }

    pub fn states(&self) -> usize {
        self.output.len()
    }

    /// Always cooperate.
    pub fn all_c() -> Self {
        MooreMachine::new(0, vec![Move::C], vec![[0, 0]]).unwrap()
    }

    /// Always defect.
    pub fn all_d() -> Self {
        MooreMachine::new(0, vec![Move::D], vec![[0, 0]]).unwrap()
    }

    /// Cooperate first, then copy the opponent's last move.
    pub fn tit_for_tat() -> Self {
        MooreMachine::new(0, vec![Move::C, Move::D], vec![[0, 1], [0, 1]]).unwrap()
    }

    /// Cooperate until the opponent defects once, then defect forever.
    pub fn grim_trigger() -> Self {
        MooreMachine::new(0, vec![Move::C, Move::D], vec![[0, 1], [1, 1]]).unwrap()
    }

    /// Every machine with exactly `s` states and initial state 0. Any
    /// machine is equivalent to one of these up to relabelling states.
    pub fn all_with_states(s: usize) -> Vec<MooreMachine> {
        let rows = 2 * s;
        let transitions = (s as u64).pow(rows as u32);
        let mut out = Vec::new();
        for outputs in 0u64..1 << s {
            for mut code in 0..transitions {
                let mut transition = vec![[0usize; 2]; s];
                for row in transition.iter_mut() {
                    for t in row.iter_mut() {
                        *t = (code % s as u64) as usize;
                        code /= s as u64;
                    }
                }
                let output = (0..s).map(|i| Move::from_bit(outputs & (1 << i) != 0)).collect();
                out.push(MooreMachine {
                    initial: 0,
                    output,
                    transition,
                });
            }
        }
        out
    }

    /// Machines with between 1 and `s` states (2 + 64 = 66 for `s = 2`).
    pub fn all_up_to(s: usize) -> Vec<MooreMachine> {
        (1..=s).flat_map(MooreMachine::all_with_states).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayRecord {
    pub payoff_a: f64,
    pub payoff_b: f64,
    pub trace: Vec<(Move, Move)>,
}

fn check_dilemma_shape(game: &NormalFormGame) -> Result<()> {
    if game.players() != 2 || game.strategy_counts() != [2, 2] {
        return Err(Error::Domain("machines play 2x2 two-player games only".into()));
    }
    Ok(())
}

/// Play `rounds` rounds between two machines and sum the payoffs.
pub fn iterated_play(a: &MooreMachine, b: &MooreMachine, rounds: usize, game: &NormalFormGame) -> Result<PlayRecord> {
    check_dilemma_shape(game)?;
    if rounds == 0 {
        return Err(Error::Domain("at least one round is needed".into()));
    }
    let (mut sa, mut sb) = (a.initial, b.initial);
    let mut record = PlayRecord {
        payoff_a: 0.0,
        payoff_b: 0.0,
        trace: Vec::with_capacity(rounds),
    };
    for _ in 0..rounds {
        let (ma, mb) = (a.output[sa], b.output[sb]);
        let pay = game.payoff_vector(&[ma.index(), mb.index()]);
        record.payoff_a += pay[0];
        record.payoff_b += pay[1];
        record.trace.push((ma, mb));
        sa = a.transition[sa][mb.index()];
        sb = b.transition[sb][ma.index()];
    }
    Ok(record)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutomataCheck {
    pub is_equilibrium: bool,
    /// What each side earns when both play the candidate.
    pub candidate_payoff: [f64; 2],
    /// Best payoff a single side can reach by swapping in another machine
    /// while the other side keeps the candidate.
    pub best_deviation_payoff: [f64; 2],
    pub best_deviation: [MooreMachine; 2],
    pub machines_checked: usize,
}

/// Can any machine with at most `max_states` states earn strictly more
/// against `candidate` than `candidate` earns against itself over `rounds`
/// rounds? Both seats are checked.
pub fn bounded_automata_equilibrium(
    game: &NormalFormGame,
    max_states: usize,
    rounds: usize,
    candidate: &MooreMachine,
    limits: &Limits,
) -> Result<AutomataCheck> {
    check_dilemma_shape(game)?;
    if max_states == 0 {
        return Err(Error::Domain("machine size must be at least 1".into()));
    }
    if max_states > limits.automata_states {
        let count = |s: usize| -> Option<u128> {
            (1..=s).try_fold(0u128, |acc, k| {
                let outputs = 1u128.checked_shl(k as u32)?;
                let transitions = (k as u128).checked_pow(2 * k as u32)?;
                acc.checked_add(outputs.checked_mul(transitions)?)
            })
        };
        return Err(Error::cap(
            format!("enumeration of machines with up to {max_states} states"),
            count(max_states),
            count(limits.automata_states).unwrap_or(u128::MAX),
        ));
    }
    let baseline = iterated_play(candidate, candidate, rounds, game)?;
    let candidate_payoff = [baseline.payoff_a, baseline.payoff_b];
    let mut best_payoff = candidate_payoff;
    let mut best_machine = [candidate.clone(), candidate.clone()];
    let machines = MooreMachine::all_up_to(max_states);
    for m in &machines {
        let as_a = iterated_play(m, candidate, rounds, game)?.payoff_a;
        if as_a > best_payoff[0] {
            best_payoff[0] = as_a;
            best_machine[0] = m.clone();
        }
        let as_b = iterated_play(candidate, m, rounds, game)?.payoff_b;
        if as_b > best_payoff[1] {
            best_payoff[1] = as_b;
            best_machine[1] = m.clone();
        }
    }
    Ok(AutomataCheck {
        is_equilibrium: best_payoff == candidate_payoff,
        candidate_payoff,
        best_deviation_payoff: best_payoff,
        best_deviation: best_machine,
        machines_checked: machines.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TournamentRow {
    pub pair: (String, String),
    pub rounds: usize,
    pub payoffs: (f64, f64),
}

/// Round robin over every unordered pair, including self-play.
pub fn tournament(
    entrants: &[(String, MooreMachine)],
    rounds: usize,
    game: &NormalFormGame,
) -> Result<Vec<TournamentRow>> {
    let mut rows = Vec::new();
    for (i, (name_a, a)) in entrants.iter().enumerate() {
        for (name_b, b) in &entrants[i..] {
            let r = iterated_play(a, b, rounds, game)?;
            rows.push(TournamentRow {
                pair: (name_a.clone(), name_b.clone()),
                rounds,
                payoffs: (r.payoff_a, r.payoff_b),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::prisoners_dilemma;

    fn pd() -> NormalFormGame {
        prisoners_dilemma(5.0, 3.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn tft_mirror() {
        let t = MooreMachine::tit_for_tat();
        let r = iterated_play(&t, &t, 10, &pd()).unwrap();
        assert_eq!((r.payoff_a, r.payoff_b), (30.0, 30.0));
        assert!(r.trace.iter().all(|&m| m == (Move::C, Move::C)));
        assert_eq!(r.trace.len(), 10);
    }

    #[test]
    fn exploitation() {
        let r = iterated_play(&MooreMachine::all_d(), &MooreMachine::all_c(), 10, &pd()).unwrap();
        assert_eq!((r.payoff_a, r.payoff_b), (50.0, 0.0));
    }

    #[test]
    fn tft_against_defector() {
        let r = iterated_play(&MooreMachine::tit_for_tat(), &MooreMachine::all_d(), 4, &pd()).unwrap();
        assert_eq!(
            r.trace,
            vec![
                (Move::C, Move::D),
                (Move::D, Move::D),
                (Move::D, Move::D),
                (Move::D, Move::D)
            ]
        );
        assert_eq!((r.payoff_a, r.payoff_b), (3.0, 8.0));
    }

    #[test]
    fn one_round_is_one_shot() {
        let r = iterated_play(&MooreMachine::all_c(), &MooreMachine::all_d(), 1, &pd()).unwrap();
        assert_eq!((r.payoff_a, r.payoff_b), (0.0, 5.0));
        assert!(iterated_play(&MooreMachine::all_c(), &MooreMachine::all_d(), 0, &pd()).is_err());
    }

    #[test]
    fn machine_counts() {
        assert_eq!(MooreMachine::all_with_states(1).len(), 2);
        assert_eq!(MooreMachine::all_with_states(2).len(), 64);
        assert_eq!(MooreMachine::all_up_to(2).len(), 66);
        assert!(MooreMachine::all_up_to(2).contains(&MooreMachine::tit_for_tat()));
    }

    #[test]
    fn all_c_is_exploitable() {
        let r = bounded_automata_equilibrium(&pd(), 2, 10, &MooreMachine::all_c(), &Limits::default()).unwrap();
        assert!(!r.is_equilibrium);
        assert_eq!(r.candidate_payoff, [30.0, 30.0]);
        assert_eq!(r.best_deviation_payoff, [50.0, 50.0]);
    }

    #[test]
    fn one_state_one_round_is_best_response() {
        let r = bounded_automata_equilibrium(&pd(), 1, 1, &MooreMachine::all_c(), &Limits::default()).unwrap();
        assert_eq!(r.machines_checked, 2);
        assert_eq!(r.best_deviation[0], MooreMachine::all_d());
        assert_eq!(r.best_deviation_payoff[0], 5.0);
        let r = bounded_automata_equilibrium(&pd(), 1, 1, &MooreMachine::all_d(), &Limits::default()).unwrap();
        assert!(r.is_equilibrium);
    }

    #[test]
    fn cap_refusal() {
        let err =
            bounded_automata_equilibrium(&pd(), 3, 10, &MooreMachine::tit_for_tat(), &Limits::default()).unwrap_err();
        assert!(err.is_cap_refusal());
    }

    #[test]
    fn machine_json() {
        let m: MooreMachine = serde_json::from_str(
            r#"{"states": 2, "initial": 0, "output": ["C", "D"], "transition": [[0, 1], [0, 1]]}"#,
        )
        .unwrap();
        assert_eq!(m, MooreMachine::tit_for_tat());
        let bad = r#"{"states": 2, "initial": 0, "output": ["C"], "transition": [[0, 0]]}"#;
        assert!(serde_json::from_str::<MooreMachine>(bad).is_err());
        let bad = r#"{"states": 1, "initial": 0, "output": ["C"], "transition": [[0, 3]]}"#;
        assert!(serde_json::from_str::<MooreMachine>(bad).is_err());
    }

    #[test]
    fn round_robin() {
        let entrants = vec![
            ("tft".to_string(), MooreMachine::tit_for_tat()),
            ("alld".to_string(), MooreMachine::all_d()),
        ];
        let rows = tournament(&entrants, 5, &pd()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].payoffs, (4.0, 9.0));
    }
}
