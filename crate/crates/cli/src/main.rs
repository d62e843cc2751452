//! Command-line front end for the oscillator factorization toolkit.
//!
//! Subcommands sweep parameters and grids, regenerate plot-ready figure data
//! as CSV, and verify the operator identities as JSON reports. Output is
//! deterministic: identical flags produce byte-identical files.

mod commands;
mod output;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::process::ExitCode;

/// Exit codes: 0 success, 2 flag error, 3 inadmissible parameters,
/// 4 numerical non-convergence, 5 I/O error.
#[derive(Debug)]
pub enum CliError {
    Flags(String),
    Inadmissible(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Flags(_) => 2,
            CliError::Inadmissible(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Flags(m)
            | CliError::Inadmissible(m)
            | CliError::Numerical(m)
            | CliError::Io(m) => m,
        }
    }
}

impl From<oscfact::Error> for CliError {
    fn from(e: oscfact::Error) -> Self {
        use oscfact::Error::*;
        match e {
            Inadmissible { .. } | DeltaRange { .. } | Gamma3Range { .. }
            | SingularPoint { .. } | NegativeRadicand { .. } => {
                CliError::Inadmissible(e.to_string())
            }
            Overflow { .. } | QuadratureNonConvergence { .. } | EmptyRegime { .. } => {
                CliError::Numerical(e.to_string())
            }
            InvalidGrid { .. } | ModeIndex { .. } | DerivativeOrder { .. }
            | NotFirstOrder { .. } | MissingParams { .. } => CliError::Flags(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "oscfact",
    about = "Parameter sweeps, figure data, and residual reports for oscillator factorizations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the (gamma1, gamma2) plane and classify admissibility.
    Region(RegionArgs),
    /// Tabulate coefficient functions alpha, beta over x.
    Coeffs(CoeffsArgs),
    /// Tabulate eigenfunctions H_0..H_n over x.
    Eigen(EigenArgs),
    /// Verify the operator identities and write a residual report.
    Residuals(ResidualsArgs),
    /// Reversed-factorization report: gamma3 identities, kappa singularities,
    /// and the modified Hermite limit.
    Alt(AltArgs),
    /// Convergence tables for the limit reductions.
    Limits(LimitsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    #[value(name = "two_param")]
    TwoParam,
    #[value(name = "delta")]
    Delta,
    #[value(name = "gamma3")]
    Gamma3,
    #[value(name = "kappa")]
    Kappa,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFamily {
    #[value(name = "two_param")]
    TwoParam,
    #[value(name = "gamma3")]
    Gamma3,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LimitKind {
    #[value(name = "delta")]
    Delta,
    #[value(name = "standard")]
    Standard,
    #[value(name = "hermite")]
    Hermite,
    #[value(name = "modified_hermite")]
    ModifiedHermite,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[value(name = "csv")]
    Csv,
    #[value(name = "json")]
    Json,
}

/// Grid flags shared by the x-sweeping commands. When --x-points is not
/// given, the OSC_GRID_POINTS environment variable overrides the default.
#[derive(Args, Clone, Copy)]
pub struct XRange {
    #[arg(long, default_value_t = -6.0)]
    x_min: f64,
    #[arg(long, default_value_t = 6.0)]
    x_max: f64,
    #[arg(long)]
    x_points: Option<usize>,
}

impl XRange {
    pub fn resolve(&self, default_points: usize) -> CliResult<oscfact::Grid> {
        let points = match self.x_points {
            Some(n) => n,
            None => match std::env::var("OSC_GRID_POINTS") {
                Ok(s) => s
                    .parse::<usize>()
                    .map_err(|_| CliError::Flags(format!("OSC_GRID_POINTS = {s:?} is not a point count")))?,
                Err(_) => default_points,
            },
        };
        oscfact::Grid::new(self.x_min, self.x_max, points).map_err(CliError::from)
    }
}

#[derive(Args)]
pub struct RegionArgs {
    #[arg(long, default_value_t = -3.0)]
    g1_min: f64,
    #[arg(long, default_value_t = 3.0)]
    g1_max: f64,
    #[arg(long, default_value_t = 121)]
    g1_points: usize,
    #[arg(long, default_value_t = -3.0)]
    g2_min: f64,
    #[arg(long, default_value_t = 8.0)]
    g2_max: f64,
    #[arg(long, default_value_t = 221)]
    g2_points: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: String,
}

#[derive(Args)]
pub struct CoeffsArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    gamma3: Option<f64>,
    #[arg(long)]
    kappa1: Option<f64>,
    #[arg(long)]
    kappa2: Option<f64>,
    #[command(flatten)]
    x: XRange,
    #[arg(long)]
    out: String,
}

#[derive(Args)]
pub struct EigenArgs {
    #[arg(long, value_enum)]
    family: ReportFamily,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    gamma3: Option<f64>,
    #[arg(long, default_value_t = 3)]
    n_max: usize,
    /// Rescale members to unit L²(omega) norm.
    #[arg(long)]
    normalized: bool,
    #[command(flatten)]
    x: XRange,
    #[arg(long)]
    out: String,
}

#[derive(Args)]
pub struct ResidualsArgs {
    #[arg(long, value_enum, default_value_t = ReportFamily::TwoParam)]
    family: ReportFamily,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    gamma3: Option<f64>,
    #[arg(long, default_value_t = 6)]
    n_max: usize,
    #[command(flatten)]
    x: XRange,
    #[arg(long)]
    out: String,
}

#[derive(Args)]
pub struct AltArgs {
    #[arg(long, default_value_t = 1.0)]
    gamma3: f64,
    #[arg(long)]
    kappa1: Option<f64>,
    #[arg(long)]
    kappa2: Option<f64>,
    #[arg(long, default_value_t = 6)]
    n_max: usize,
    #[arg(long)]
    out: String,
}

#[derive(Args)]
pub struct LimitsArgs {
    #[arg(long, value_enum)]
    kind: LimitKind,
    #[arg(long)]
    delta: Option<f64>,
    /// Parameter magnitudes, comma separated (gamma1 for delta/standard/
    /// hermite, gamma3 for modified_hermite).
    #[arg(long, value_delimiter = ',')]
    schedule: Option<Vec<f64>>,
    #[arg(long)]
    out: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.command {
        Command::Region(args) => commands::region(args),
        Command::Coeffs(args) => commands::coeffs(args),
        Command::Eigen(args) => commands::eigen(args),
        Command::Residuals(args) => commands::residuals(args),
        Command::Alt(args) => commands::alt(args),
        Command::Limits(args) => commands::limits(args),
    };
    match run {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
