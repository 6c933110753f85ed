//! No-free-lunch scoring, sample-size bounds and shattering checks.

use clap::{Args, ValueEnum};
use mtl_core::learn::{
    nfl_weather, pac_sample_bound, random_point_sets, realized_labelings, shatters, vc_dimension, vc_sample_bound,
    Halfspaces2d, HypothesisClass, PacRequest, Thresholds, Weather, WeatherPredictor,
};
use mtl_core::{Error, Limits};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Context, Failure, Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LearnOp {
    /// Score weather predictors over every 3-day history.
    Nfl,
    /// Finite-class sample bound.
    Pac,
    /// VC-dimension sample bound.
    VcBound,
    /// Whether a class realizes every labeling of a point set.
    Shatter,
    /// Largest shattered size found on generated point sets.
    VcDimension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassChoice {
    /// Half-planes `w.x > b` in two dimensions.
    Halfspaces,
    /// Rays `x >= t` on the line.
    Thresholds,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    #[arg(value_enum)]
    op: LearnOp,
    /// Named predictor: always-S, always-R, persistence, alternate,
    /// majority or random. All named ones when omitted.
    #[arg(long)]
    predictor: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long)]
    class_size: Option<u64>,
    #[arg(long)]
    vcd: Option<u64>,
    /// Leading constant of the VC bound.
    #[arg(long, default_value_t = 1.0)]
    constant: f64,
    /// Points as `x,y;x,y;...` (plain `x;x;...` for thresholds).
    #[arg(long)]
    points: Option<String>,
    #[arg(long, value_enum, default_value_t = ClassChoice::Halfspaces)]
    class: ClassChoice,
    /// Largest point-set size tried by vc-dimension.
    #[arg(long, default_value_t = 5)]
    max_m: usize,
}

fn named_predictor(name: &str, seed: u64) -> Result<WeatherPredictor, Failure> {
    Ok(match name {
        "always-S" => WeatherPredictor::always(Weather::Sun),
        "always-R" => WeatherPredictor::always(Weather::Rain),
        "persistence" => WeatherPredictor::persistence(),
        "alternate" => WeatherPredictor::alternate(),
        "majority" => WeatherPredictor::majority(),
        "random" => WeatherPredictor::random(&mut ChaCha8Rng::seed_from_u64(seed)),
        other => return Err(Error::Validation(format!("unknown predictor `{other}`")).into()),
    })
}

const NAMED: [&str; 5] = ["always-S", "always-R", "persistence", "alternate", "majority"];

fn nfl(args: &LearnArgs, ctx: &Context) -> Result<Table, Failure> {
    let predictors = match (ctx.instance_text()?, &args.predictor) {
        (Some(_), Some(_)) => return Err(Failure::Usage("give either --predictor or --instance, not both".into())),
        (Some((path, text)), None) => {
            let name = path
                .file_stem()
                .map_or("instance".into(), |s| s.to_string_lossy().into_owned());
            vec![WeatherPredictor::from_json(&name, &text).map_err(|source| Failure::Input { path, source })?]
        }
        (None, Some(name)) => vec![named_predictor(name, ctx.seed)?],
        (None, None) => NAMED
            .iter()
            .map(|n| named_predictor(n, ctx.seed))
            .collect::<Result<_, _>>()?,
    };
    let mut table = Table::new(&[
        "predictor",
        "mean_error",
        "histories_0",
        "histories_1",
        "histories_2",
        "histories_3",
    ]);
    for p in &predictors {
        let report = nfl_weather(p);
        let h = report.error_histogram();
        table.push(vec![
            p.name().into(),
            report.mean_error.into(),
            h[0].into(),
            h[1].into(),
            h[2].into(),
            h[3].into(),
        ]);
    }
    Ok(table)
}

fn point_text(args: &LearnArgs, ctx: &Context) -> Result<String, Failure> {
    match (ctx.instance_text()?, &args.points) {
        (Some(_), Some(_)) => Err(Failure::Usage("give either --points or --instance, not both".into())),
        (Some((path, text)), None) => {
            // A JSON array of points, reduced to the inline syntax.
            let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Failure::Input {
                path: path.clone(),
                source: e.into(),
            })?;
            let invalid = || Failure::Input {
                path: path.clone(),
                source: Error::Validation("expected an array of numbers or of [x, y] pairs".into()),
            };
            let items = value.as_array().ok_or_else(invalid)?;
            items
                .iter()
                .map(|item| match item {
                    serde_json::Value::Array(xy) => xy
                        .iter()
                        .map(|c| c.as_f64().map(|v| v.to_string()).ok_or_else(invalid))
                        .collect::<Result<Vec<_>, _>>()
                        .map(|v| v.join(",")),
                    other => other.as_f64().map(|v| v.to_string()).ok_or_else(invalid),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(|v| v.join(";"))
        }
        (None, Some(points)) => Ok(points.clone()),
        (None, None) => Err(Failure::Usage("shatter needs --points or --instance".into())),
    }
}

fn parse_points<const D: usize>(text: &str) -> mtl_core::Result<Vec<[f64; D]>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let coords = item
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Error::Validation(format!("point `{item}`: {e}")))?;
            <[f64; D]>::try_from(coords)
                .map_err(|_| Error::Validation(format!("point `{item}` needs {D} coordinate(s)")))
        })
        .collect()
}

fn shatter_row<C: HypothesisClass>(
    table: &mut Table,
    class: &C,
    points: &[C::Point],
    limits: &Limits,
) -> Result<(), Failure> {
    let shattered = shatters(class, points, limits)?;
    table.push(vec![
        class.name().into(),
        points.len().into(),
        realized_labelings(class, points).len().into(),
        (1u64 << points.len()).into(),
        shattered.into(),
    ]);
    Ok(())
}

pub fn run(args: LearnArgs, ctx: &Context) -> Result<Report, Failure> {
    let table = match args.op {
        LearnOp::Nfl => nfl(&args, ctx)?,
        LearnOp::Pac => {
            let Some(size) = args.class_size else {
                return Err(Failure::Usage("pac needs --class-size".into()));
            };
            let req = PacRequest::new(args.epsilon, args.delta)?;
            let mut table = Table::new(&["epsilon", "delta", "class_size", "samples"]);
            table.push(vec![
                args.epsilon.into(),
                args.delta.into(),
                size.into(),
                pac_sample_bound(&req, size)?.into(),
            ]);
            table
        }
        LearnOp::VcBound => {
            let Some(vcd) = args.vcd else {
                return Err(Failure::Usage("vc-bound needs --vcd".into()));
            };
            let req = PacRequest::new(args.epsilon, args.delta)?;
            let mut table = Table::new(&["epsilon", "delta", "vcd", "constant", "samples"]);
            table.push(vec![
                args.epsilon.into(),
                args.delta.into(),
                vcd.into(),
                args.constant.into(),
                vc_sample_bound(&req, vcd, args.constant)?.into(),
            ]);
            table
        }
        LearnOp::Shatter => {
            let text = point_text(&args, ctx)?;
            let mut table = Table::new(&["class", "points", "labelings", "possible", "shattered"]);
            match args.class {
                ClassChoice::Halfspaces => {
                    shatter_row(&mut table, &Halfspaces2d, &parse_points::<2>(&text)?, &ctx.limits)?
                }
                ClassChoice::Thresholds => {
                    let points: Vec<f64> = parse_points::<1>(&text)?.into_iter().map(|[x]| x).collect();
                    shatter_row(&mut table, &Thresholds, &points, &ctx.limits)?
                }
            }
            table
        }
        LearnOp::VcDimension => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let (name, dim) = match args.class {
                ClassChoice::Halfspaces => (
                    Halfspaces2d.name().to_string(),
                    vc_dimension(&Halfspaces2d, random_point_sets(&mut rng, 20), args.max_m, &ctx.limits)?,
                ),
                ClassChoice::Thresholds => {
                    let line = |m: usize| vec![(0..m).map(|i| i as f64).collect::<Vec<f64>>()];
                    (
                        Thresholds.name().to_string(),
                        vc_dimension(&Thresholds, line, args.max_m, &ctx.limits)?,
                    )
                }
            };
            let mut table = Table::new(&["class", "max_m", "vc_dimension"]);
            table.push(vec![name.into(), args.max_m.into(), dim.into()]);
            table
        }
    };
    Ok(table.into())
}
