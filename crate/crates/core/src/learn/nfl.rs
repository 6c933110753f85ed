use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DAYS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Weather {
    #[serde(rename = "S")]
    Sun,
    #[serde(rename = "R")]
    Rain,
}

impl Weather {
    pub fn flip(self) -> Weather {
        match self {
            Weather::Sun => Weather::Rain,
            Weather::Rain => Weather::Sun,
        }
    }

    fn from_bit(bit: bool) -> Weather {
        if bit {
            Weather::Rain
        } else {
            Weather::Sun
        }
    }

    fn letter(self) -> char {
        match self {
            Weather::Sun => 'S',
            Weather::Rain => 'R',
        }
    }
}

fn history_string(days: &[Weather]) -> String {
    days.iter().map(|w| w.letter()).collect()
}

/// Deterministic forecast for each of the 7 prefixes of a 3-day history
/// (lengths 0, 1 and 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeatherPredictor {
    name: String,
    forecasts: BTreeMap<String, Weather>,
}

fn all_prefixes() -> Vec<Vec<Weather>> {
    (0..DAYS)
        .flat_map(|len| {
            (0..1usize << len).map(move |bits| {
                (0..len)
                    .map(|i| Weather::from_bit(bits >> (len - 1 - i) & 1 == 1))
                    .collect()
            })
        })
        .collect()
}

impl WeatherPredictor {
    pub fn from_fn(name: &str, f: impl Fn(&[Weather]) -> Weather) -> Self {
        let forecasts = all_prefixes().iter().map(|p| (history_string(p), f(p))).collect();
        WeatherPredictor {
            name: name.to_string(),
            forecasts,
        }
    }

    /// From a table keyed by prefix strings such as `""`, `"S"`, `"RS"`.
    pub fn from_table(name: &str, table: BTreeMap<String, Weather>) -> Result<Self> {
        for prefix in all_prefixes() {
            let key = history_string(&prefix);
            if !table.contains_key(&key) {
                return Err(Error::Validation(format!(
                    "predictor has no forecast for prefix {key:?}"
                )));
            }
        }
        if table.len() != 7 {
            return Err(Error::Validation(
                "predictor keys must be S/R prefixes of length 0 to 2".into(),
            ));
        }
        Ok(WeatherPredictor {
            name: name.to_string(),
            forecasts: table,
        })
    }

    pub fn from_json(name: &str, text: &str) -> Result<Self> {
        let table: BTreeMap<String, Weather> = serde_json::from_str(text)?;
        WeatherPredictor::from_table(name, table)
    }

    pub fn always(w: Weather) -> Self {
        WeatherPredictor::from_fn(&format!("always-{}", w.letter()), |_| w)
    }

    /// Tomorrow is like today; sunny with no history.
    pub fn persistence() -> Self {
        WeatherPredictor::from_fn("persistence", |p| p.last().copied().unwrap_or(Weather::Sun))
    }

    /// Tomorrow is the opposite of today; sunny with no history.
    pub fn alternate() -> Self {
        WeatherPredictor::from_fn("alternate", |p| p.last().map_or(Weather::Sun, |w| w.flip()))
    }

    /// Predicts the majority so far, rain on ties.
    pub fn majority() -> Self {
        WeatherPredictor::from_fn("majority", |p| {
            let rain = p.iter().filter(|&&w| w == Weather::Rain).count();
            Weather::from_bit(2 * rain >= p.len())
        })
    }

    pub fn random(rng: &mut impl Rng) -> Self {
        let forecasts = all_prefixes()
            .iter()
            .map(|p| (history_string(p), Weather::from_bit(rng.gen())))
            .collect();
        WeatherPredictor {
            name: "random".into(),
            forecasts,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn predict(&self, prefix: &[Weather]) -> Weather {
        self.forecasts[&history_string(prefix)]
    }
}

impl fmt::Display for WeatherPredictor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NflReport {
    /// Each 3-day history with the number of days mispredicted.
    pub mistakes: Vec<(String, u32)>,
    pub mean_error: f64,
}

impl NflReport {
    /// How many histories have each mistake count 0..=3.
    pub fn error_histogram(&self) -> [usize; DAYS + 1] {
        let mut h = [0; DAYS + 1];
        for (_, m) in &self.mistakes {
            h[*m as usize] += 1;
        }
        h
    }

    pub fn error_of(&self, index: usize) -> f64 {
        self.mistakes[index].1 as f64 / DAYS as f64
    }
}

/// Scores the predictor against every one of the 8 equally likely
/// 3-day histories.
pub fn nfl_weather(predictor: &WeatherPredictor) -> NflReport {
    let mut total = 0u32;
    let mistakes: Vec<(String, u32)> = (0..1usize << DAYS)
        .map(|bits| {
            let days: Vec<Weather> = (0..DAYS)
                .map(|i| Weather::from_bit(bits >> (DAYS - 1 - i) & 1 == 1))
                .collect();
            let wrong = (0..DAYS).filter(|&d| predictor.predict(&days[..d]) != days[d]).count() as u32;
            total += wrong;
            (history_string(&days), wrong)
        })
        .collect();
    NflReport {
        mistakes,
        mean_error: total as f64 / (DAYS << DAYS) as f64,
    }
}
