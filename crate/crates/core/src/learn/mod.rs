//! Learning-theory calculators: the No-Free-Lunch weather experiment, PAC
//! sample bounds, and brute-force shattering checks.

mod bounds;
mod nfl;
mod shatter;

pub use bounds::{pac_sample_bound, vc_sample_bound, PacRequest};
pub use nfl::{nfl_weather, NflReport, Weather, WeatherPredictor};
pub use shatter::{
    random_point_sets, realized_labelings, shatters, vc_dimension, ConstantClass, Halfspace, Halfspaces2d,
    HypothesisClass, Thresholds,
};
