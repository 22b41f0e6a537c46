//! Command-line front end: graph input, the `analyze`, `zeros`, `count` and
//! `sweep` commands, and their text, CSV, JSON and SVG output.

mod analyze;
mod commands;
mod input;
mod svg;

pub use analyze::{analyze_graph, AnalyzeOptions, ReportDocument, RouteVerdict, VertexReport};
pub use commands::{
    count_table, evaluator_for, sweep_schedule, write_count_csv, write_sweep_csv, write_zeros_csv,
    zeros_by_tiles, SweepFamily, TileResult,
};
pub use input::{load_input, GraphInput};
pub use svg::sweep_svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::criteria::{CriteriaError, DEFAULT_SEED};
use crate::exppoly::{ExpPolyError, DEFAULT_SYMBOLIC_CAP};
use crate::gallery::GalleryError;
use crate::graph::GraphError;
use crate::qgf::QgfError;
use crate::zeros::{EvalMode, Rect, ZeroError};

/// Environment variable overriding the sampling seed.
pub const SEED_ENV: &str = "QGR_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Model(String),
    #[error("{0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Model(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<QgfError> for CliError {
    fn from(e: QgfError) -> Self {
        if e.is_model_error() {
            CliError::Model(e.to_string())
        } else {
            CliError::Parse(e.to_string())
        }
    }
}

impl From<GalleryError> for CliError {
    fn from(e: GalleryError) -> Self {
        match e {
            GalleryError::InvalidExample(_) => CliError::Parse(e.to_string()),
            _ => CliError::Model(e.to_string()),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Model(e.to_string())
    }
}

impl From<ZeroError> for CliError {
    fn from(e: ZeroError) -> Self {
        match e {
            ZeroError::InvalidInput(m) => CliError::Parse(m),
            ZeroError::Symbolic(s) => s.into(),
            e => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<ExpPolyError> for CliError {
    fn from(e: ExpPolyError) -> Self {
        match e {
            ExpPolyError::TooLargeForSymbolic { .. } | ExpPolyError::StateBudget { .. } => {
                CliError::Numeric(e.to_string())
            }
            _ => CliError::Model(e.to_string()),
        }
    }
}

impl From<CriteriaError> for CliError {
    fn from(e: CriteriaError) -> Self {
        match e {
            CriteriaError::Inconclusive(_) | CriteriaError::PoleProximity { .. } => {
                CliError::Numeric(e.to_string())
            }
            _ => CliError::Model(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qgr",
    version,
    about = "Resonance asymptotics of quantum graphs",
    after_help = "Exit codes: 0 success, 2 parse error, 3 model error, 4 numerical-resolution failure.\n\
                  QGR_SEED overrides the sampling seed (output is then no longer byte-reproducible \
                  against the default)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a graph as Weyl or non-Weyl and compute its effective size
    Analyze(AnalyzeArgs),
    /// Locate resonances in a box of the k plane (CSV)
    Zeros(ZerosArgs),
    /// Tabulate the counting function N(R) and fit the effective size (CSV)
    Count(CountArgs),
    /// Track resonances while a parameter varies (CSV, optional SVG)
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// QGF file describing the graph
    #[arg(required_unless_present = "example", conflicts_with = "example")]
    pub file: Option<PathBuf>,
    /// Gallery example, `name` or `name:key=value,...`
    #[arg(long)]
    pub example: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    Exppoly,
    Stabilized,
    Literal,
}

impl From<ModeArg> for EvalMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Auto => EvalMode::Auto,
            ModeArg::Exppoly => EvalMode::ExpPoly,
            ModeArg::Stabilized => EvalMode::Stabilized,
            ModeArg::Literal => EvalMode::Literal,
        }
    }
}

#[derive(Debug, Clone, Copy, Args)]
pub struct RegionArgs {
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    pub re_min: f64,
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    pub re_max: f64,
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub im_min: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub im_max: f64,
}

impl RegionArgs {
    pub fn rect(&self) -> Result<Rect, CliError> {
        let ok = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|x| x.is_finite())
            && self.re_min < self.re_max
            && self.im_min < self.im_max;
        if !ok {
            return Err(CliError::Parse(format!(
                "invalid region [{}, {}] x [{}, {}]",
                self.re_min, self.re_max, self.im_min, self.im_max
            )));
        }
        Ok(Rect::new(self.re_min, self.re_max, self.im_min, self.im_max))
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Largest 2N+M handled by the symbolic route
    #[arg(long, default_value_t = DEFAULT_SYMBOLIC_CAP)]
    pub cap: usize,
    /// Also estimate W from the counting function
    #[arg(long)]
    pub numeric: bool,
    /// Largest radius of the numeric route
    #[arg(long, default_value_t = 40.0)]
    pub rmax: f64,
    /// Number of radii of the numeric route
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
    /// Also list the resonances in the region
    #[arg(long)]
    pub zeros: bool,
    #[command(flatten)]
    pub region: RegionArgs,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    /// Emit the report as JSON
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ZerosArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub region: RegionArgs,
    /// Diameter of the box that certifies each zero
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
}

#[derive(Debug, Clone, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value_t = 40.0)]
    pub rmax: f64,
    /// Number of equally spaced radii up to rmax
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Example parameter (`alpha`, `c`, ...) or `<vertex>.delta|deltaprime|robin` for files
    #[arg(long)]
    pub param: String,
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Space the values geometrically
    #[arg(long)]
    pub log: bool,
    #[command(flatten)]
    pub region: RegionArgs,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    /// Also write a scatter plot of the tracks
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

/// Seed for sampled tests: `QGR_SEED` (decimal or 0x-hex) if set.
pub fn seed_from_env() -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(s) => parse_seed(&s),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

pub fn parse_seed(s: &str) -> Result<u64, CliError> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|_| CliError::Parse(format!("{SEED_ENV}=`{s}` is not an unsigned integer")))
}

/// Fixed-width scientific formatting with 17 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parses `args` (program name first) and runs the command. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let seed = seed_from_env()?;
    match &cli.command {
        Command::Analyze(a) => commands::analyze(a, seed, out),
        Command::Zeros(a) => commands::zeros(a, seed, out),
        Command::Count(a) => commands::count(a, seed, out),
        Command::Sweep(a) => commands::sweep(a, seed, out),
    }
}
