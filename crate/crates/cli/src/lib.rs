//! Command-line harness over the `mtl-core` experiment families.
//!
//! Every subcommand produces one result table, written as CSV or JSON to
//! stdout or atomically to `--out`. Exit codes: 0 success, 2 invalid input,
//! 3 enumeration cap refusal, 64 usage error, 70 internal error, 74 I/O
//! error.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use mtl_core::Limits;

mod families;
pub mod table;

pub use table::{Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INTERNAL: i32 = 70;
pub const EXIT_IO: i32 = 74;

/// Environment variable holding `key=value,...` cap overrides.
pub const CAP_OVERRIDE_VAR: &str = "MTL_CAP_OVERRIDE";

#[derive(Debug, Parser)]
#[command(
    name = "mtl",
    version,
    about = "Exact-count experiments on ethical decision procedures"
)]
struct Cli {
    /// Problem instance as a JSON file, in place of a bundled one.
    #[arg(long, global = true, value_name = "PATH")]
    instance: Option<PathBuf>,
    /// Write the result table here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Seed for generated oracles and random instances.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exhaustive action and plan search with metered oracle calls.
    Plan(families::plan::PlanArgs),
    /// Oracle-call growth table for one solver over a range of n.
    Growth(families::plan::GrowthArgs),
    /// Decisions over risky actions.
    Uncertain(families::uncertain::UncertainArgs),
    /// Exact inference in a Boolean Bayesian network.
    Bayes(families::bayes::BayesArgs),
    /// Golden-rule checks and duty screening.
    Rules(families::rules::RulesArgs),
    /// Equilibria of normal-form and repeated games.
    Games(families::games::GamesArgs),
    /// MDP, POMDP and restless-bandit solvers.
    Seqdec(families::seqdec::SeqdecArgs),
    /// Learning-theory calculators and shattering checks.
    Learn(families::learn::LearnArgs),
    /// List the bundled instances.
    Builtins,
}

/// Shared inputs for every family.
pub(crate) struct Context {
    pub instance: Option<PathBuf>,
    pub seed: u64,
    pub limits: Limits,
}

impl Context {
    /// Parse the bundled instance `name` (or `default`), or the `--instance`
    /// file when one is given.
    pub fn load<T>(
        &self,
        name: Option<&str>,
        default: &str,
        parse: impl Fn(&str) -> mtl_core::Result<T>,
        builtin: impl Fn(&str) -> mtl_core::Result<T>,
    ) -> Result<T, Failure> {
        match (&self.instance, name) {
            (Some(_), Some(name)) => Err(Failure::Usage(format!(
                "give either the builtin name `{name}` or --instance, not both"
            ))),
            (Some(path), None) => {
                let text = read_instance(path)?;
                parse(&text).map_err(|source| Failure::Input {
                    path: path.clone(),
                    source,
                })
            }
            (None, name) => Ok(builtin(name.unwrap_or(default))?),
        }
    }

    /// The `--instance` file contents, if one was given.
    pub fn instance_text(&self) -> Result<Option<(PathBuf, String)>, Failure> {
        self.instance
            .as_ref()
            .map(|path| read_instance(path).map(|text| (path.clone(), text)))
            .transpose()
    }
}

fn read_instance(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|source| Failure::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// A finished table. `refusal` is set when a sweep stopped at a cap; the
/// rows before it are still reported.
pub(crate) struct Report {
    pub table: Table,
    pub refusal: Option<String>,
}

impl From<Table> for Report {
    fn from(table: Table) -> Self {
        Report { table, refusal: None }
    }
}

#[derive(Debug)]
pub(crate) enum Failure {
    Core(mtl_core::Error),
    Input { path: PathBuf, source: mtl_core::Error },
    Io { path: PathBuf, source: std::io::Error },
    Usage(String),
}

impl From<mtl_core::Error> for Failure {
    fn from(e: mtl_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Input { path, source } => write!(f, "{}: {source}", path.display()),
            Failure::Io { path, source } => write!(f, "{}: {source}", path.display()),
            Failure::Usage(msg) => write!(f, "usage: {msg}"),
        }
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(e) | Failure::Input { source: e, .. } => match e {
                mtl_core::Error::CapExceeded { .. } => EXIT_REFUSED,
                mtl_core::Error::Internal(_) => EXIT_INTERNAL,
                _ => EXIT_INVALID,
            },
            Failure::Io { .. } => EXIT_IO,
            Failure::Usage(_) => EXIT_USAGE,
        }
    }
}

/// `a..b`, `a..=b` (both inclusive) or a single value.
pub(crate) fn parse_range(text: &str) -> Result<RangeInclusive<u64>, String> {
    let bound = |s: &str| s.trim().parse::<u64>().map_err(|e| format!("`{s}`: {e}"));
    let range = match text.split_once("..") {
        Some((lo, hi)) => bound(lo)?..=bound(hi.strip_prefix('=').unwrap_or(hi))?,
        None => {
            let v = bound(text)?;
            v..=v
        }
    };
    if range.is_empty() {
        return Err(format!("range `{text}` is empty"));
    }
    Ok(range)
}

/// Write via a sibling temporary file and a rename, so readers never see a
/// partial table.
fn write_atomically(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = dir.join(tmp_name);
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents.as_bytes())?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn limits_from_env(stderr: &mut dyn Write) -> Result<Limits, Failure> {
    match std::env::var(CAP_OVERRIDE_VAR) {
        Ok(spec) if !spec.trim().is_empty() => {
            let _ = writeln!(
                stderr,
                "mtl: warning: {CAP_OVERRIDE_VAR}={spec} raises enumeration caps; runs may not finish"
            );
            Ok(Limits::default().with_overrides(&spec)?)
        }
        _ => Ok(Limits::default()),
    }
}

fn dispatch(command: Command, ctx: &Context) -> Result<Report, Failure> {
    match command {
        Command::Plan(args) => families::plan::run(args, ctx),
        Command::Growth(args) => families::plan::growth(args, ctx),
        Command::Uncertain(args) => families::uncertain::run(args, ctx),
        Command::Bayes(args) => families::bayes::run(args, ctx),
        Command::Rules(args) => families::rules::run(args, ctx),
        Command::Games(args) => families::games::run(args, ctx),
        Command::Seqdec(args) => families::seqdec::run(args, ctx),
        Command::Learn(args) => families::learn::run(args, ctx),
        Command::Builtins => Ok(families::builtins().into()),
    }
}

/// Parse `args` (program name first), run the command and return the exit
/// code. Tables go to `stdout` unless `--out` is given; diagnostics go to
/// `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(stderr, "mtl: {failure}");
            failure.exit_code()
        }
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let ctx = Context {
        instance: cli.instance,
        seed: cli.seed,
        limits: limits_from_env(stderr)?,
    };
    let report = dispatch(cli.command, &ctx)?;
    let text = match cli.format {
        Format::Csv => report.table.to_csv(),
        Format::Json => report.table.to_json(),
    };
    match &cli.out {
        Some(path) => write_atomically(path, &text).map_err(|source| Failure::Io {
            path: path.clone(),
            source,
        })?,
        None => stdout.write_all(text.as_bytes()).map_err(|source| Failure::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })?,
    }
    match report.refusal {
        Some(reason) => {
            let _ = writeln!(stderr, "mtl: {reason}");
            Ok(EXIT_REFUSED)
        }
        None => Ok(EXIT_OK),
    }
}
