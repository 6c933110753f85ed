//! Bundled instances, loaded by name.

use serde::Deserialize;

use crate::bayesnet::{BayesNet, TROLLEY_JSON};
use crate::games::{MooreMachine, NormalFormGame};
use crate::rules::PreferenceProfile;
use crate::seqdec::{MarkovDecisionProcess, PartiallyObservableMdp, RestlessBanditInstance};
use crate::uncertain::{actions_from_json, RiskyAction};
use crate::{Error, Result};

const GAMES: &[(&str, &str)] = &[
    ("prisoners-dilemma", include_str!("../data/prisoners_dilemma.json")),
    ("matching-pennies", include_str!("../data/matching_pennies.json")),
    ("stag-hunt", include_str!("../data/stag_hunt.json")),
    ("chicken", include_str!("../data/chicken.json")),
];

const MACHINES: &[(&str, &str)] = &[
    ("tit-for-tat", include_str!("../data/tit_for_tat.json")),
    ("all-c", include_str!("../data/all_c.json")),
    ("all-d", include_str!("../data/all_d.json")),
    ("grim-trigger", include_str!("../data/grim_trigger.json")),
];

const NETWORKS: &[(&str, &str)] = &[("trolley", TROLLEY_JSON)];
const LOTTERIES: &[(&str, &str)] = &[("lotteries", include_str!("../data/lotteries.json"))];
const PROFILES: &[(&str, &str)] = &[("judge", include_str!("../data/judge.json"))];
const MDPS: &[(&str, &str)] = &[("maintenance", include_str!("../data/maintenance.json"))];
const POMDPS: &[(&str, &str)] = &[("tiger", include_str!("../data/tiger.json"))];
const BANDITS: &[(&str, &str)] = &[("exhaustion", include_str!("../data/exhaustion_bandit.json"))];

fn lookup(kind: &str, table: &[(&str, &'static str)], name: &str) -> Result<&'static str> {
    table
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let known: Vec<&str> = table.iter().map(|(n, _)| *n).collect();
            Error::Validation(format!("no builtin {kind} `{name}` (known: {})", known.join(", ")))
        })
}

/// `(kind, name)` for every bundled instance.
pub fn catalog() -> Vec<(&'static str, &'static str)> {
    let kinds: [(&str, &[(&str, &str)]); 8] = [
        ("game", GAMES),
        ("machine", MACHINES),
        ("network", NETWORKS),
        ("lotteries", LOTTERIES),
        ("profiles", PROFILES),
        ("mdp", MDPS),
        ("pomdp", POMDPS),
        ("bandit", BANDITS),
    ];
    kinds
        .iter()
        .flat_map(|(kind, table)| table.iter().map(move |(name, _)| (*kind, *name)))
        .collect()
}

/// Raw JSON of a bundled instance.
pub fn source(kind: &str, name: &str) -> Result<&'static str> {
    let table = match kind {
        "game" => GAMES,
        "machine" => MACHINES,
        "network" => NETWORKS,
        "lotteries" => LOTTERIES,
        "profiles" => PROFILES,
        "mdp" => MDPS,
        "pomdp" => POMDPS,
        "bandit" => BANDITS,
        other => return Err(Error::Validation(format!("unknown builtin kind `{other}`"))),
    };
    lookup(kind, table, name)
}

pub fn game(name: &str) -> Result<NormalFormGame> {
    Ok(serde_json::from_str(lookup("game", GAMES, name)?)?)
}

pub fn game_names() -> Vec<&'static str> {
    GAMES.iter().map(|(n, _)| *n).collect()
}

pub fn machine(name: &str) -> Result<MooreMachine> {
    Ok(serde_json::from_str(lookup("machine", MACHINES, name)?)?)
}

pub fn machine_names() -> Vec<&'static str> {
    MACHINES.iter().map(|(n, _)| *n).collect()
}

pub fn network(name: &str) -> Result<BayesNet> {
    BayesNet::from_json(lookup("network", NETWORKS, name)?)
}

pub fn lotteries(name: &str) -> Result<Vec<RiskyAction>> {
    actions_from_json(lookup("lotteries", LOTTERIES, name)?)
}

/// An acting agent's own profile and the profiles of those affected.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSet {
    pub actor: PreferenceProfile,
    pub affected: Vec<PreferenceProfile>,
}

impl ProfileSet {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn profiles(name: &str) -> Result<ProfileSet> {
    ProfileSet::from_json(lookup("profiles", PROFILES, name)?)
}

pub fn mdp(name: &str) -> Result<MarkovDecisionProcess> {
    Ok(serde_json::from_str(lookup("mdp", MDPS, name)?)?)
}

pub fn pomdp(name: &str) -> Result<PartiallyObservableMdp> {
    Ok(serde_json::from_str(lookup("pomdp", POMDPS, name)?)?)
}

pub fn bandit(name: &str) -> Result<RestlessBanditInstance> {
    Ok(serde_json::from_str(lookup("bandit", BANDITS, name)?)?)
}
