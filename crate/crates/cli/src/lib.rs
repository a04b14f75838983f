//! Command-line front end: campaigns, oracle validation, fits, CSV tables and
//! SVG plots.
//!
//! Machine output (record paths, one JSON summary line per command) goes to
//! stdout; progress and diagnostics go to stderr.

pub mod campaign;
pub mod plot;
pub mod report;
pub mod svg;
pub mod tables;
pub mod validate;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use bellmzi_core::optimize::{Family, OptimizerConfig, MAX_SETTINGS};
use bellmzi_core::regression::SaturationModel;
use bellmzi_core::store::StoreError;

pub use plot::PlotSpec;

/// Environment variable fixing `created_at` of written records (seconds since
/// the Unix epoch), for byte-reproducible output.
pub const SOURCE_DATE_EPOCH: &str = "SOURCE_DATE_EPOCH";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] bellmzi_core::Error),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Inclusive chain-length range, written `5` or `2-12`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NRange(pub [usize; 2]);

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad chain length {t:?}: {e}"))
        };
        let (lo, hi) = match s.split_once('-').or_else(|| s.split_once("..")) {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if lo > hi {
            return Err(format!("empty range {lo}-{hi}"));
        }
        if lo < 2 || hi > MAX_SETTINGS {
            return Err(format!("chain lengths must lie in 2..={MAX_SETTINGS}, got {s}"));
        }
        Ok(NRange([lo, hi]))
    }
}

#[derive(Debug, Parser)]
#[command(name = "bellmzi", version)]
#[command(about = "Chained Bell inequality violations with coherent-displacement observables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    General,
    Ecs,
    Tmsv,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::General => Family::General,
            FamilyArg::Ecs => Family::Ecs,
            FamilyArg::Tmsv => Family::Tmsv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Anchored,
    Three,
}

impl From<ModelArg> for SaturationModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Anchored => SaturationModel::Anchored,
            ModelArg::Three => SaturationModel::ThreeParam,
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stage-1 restarts.
    #[arg(long, default_value_t = 300)]
    pub restarts: usize,
    /// Objective evaluations per local search.
    #[arg(long)]
    pub max_evaluations: Option<usize>,
}

impl SearchArgs {
    pub fn config(&self) -> CliResult<OptimizerConfig> {
        let mut config = OptimizerConfig {
            restarts: self.restarts,
            seed: self.seed,
            ..OptimizerConfig::default()
        };
        if let Some(m) = self.max_evaluations {
            config.max_evaluations = m;
        }
        config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(config)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximize the violation for one family over a range of chain lengths.
    Optimize {
        family: FamilyArg,
        /// Chain length `n` or range `lo-hi`.
        #[arg(long)]
        n: NRange,
        #[command(flatten)]
        search: SearchArgs,
        /// Record path (default: results root layout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameter scans.
    Scan {
        #[command(subcommand)]
        what: ScanCommand,
    },
    /// Post-process stored optima.
    Analyze {
        #[command(subcommand)]
        what: AnalyzeCommand,
    },
    /// Cross-checks against the Fock-space oracle.
    Validate {
        #[command(subcommand)]
        what: ValidateCommand,
    },
    /// Fit a saturation curve to the violations of a stored campaign.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render an SVG described by a JSON plot specification.
    Plot {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Regenerate every CSV table from the records below a directory.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        /// Output directory (default: `<in>/report`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ScanCommand {
    /// Optimal displacements at fixed squeezing, for a grid of squeezings.
    TmsvR {
        #[arg(long)]
        n: NRange,
        #[arg(long, default_value_t = 0.0)]
        r_min: f64,
        #[arg(long, default_value_t = 3.0)]
        r_max: f64,
        /// Grid points including both ends.
        #[arg(long, default_value_t = 31)]
        steps: usize,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Maximal-violation eigenvectors in the coherent basis and their Schmidt spectra.
    Eigvec {
        #[arg(long = "in")]
        input: PathBuf,
        /// Restrict to one chain length.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ValidateCommand {
    /// Closed-form expectations, overlaps and Gram matrices against the Fock oracle.
    ClosedForms {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The optimum must lose its violation once every projector is phase averaged.
    Dephased {
        #[arg(long)]
        n: usize,
        /// Take the optimum from this record instead of optimizing.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests also land here, with exit code 0
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Optimize {
            family,
            n,
            search,
            out,
        } => campaign::optimize(family.into(), n.0, &search.config()?, out),
        Command::Scan {
            what:
                ScanCommand::TmsvR {
                    n,
                    r_min,
                    r_max,
                    steps,
                    search,
                    out,
                },
        } => campaign::scan_tmsv_r(n.0, r_min, r_max, steps, &search.config()?, out),
        Command::Analyze {
            what: AnalyzeCommand::Eigvec { input, n, out },
        } => campaign::analyze_eigvec(&input, n, out),
        Command::Validate { what } => match what {
            ValidateCommand::ClosedForms { samples, seed } => validate::closed_forms(samples, seed),
            ValidateCommand::Dephased { n, input, search } => {
                validate::dephased(n, input.as_deref(), &search.config()?)
            }
        },
        Command::Fit { input, model, out } => campaign::fit(&input, model.into(), out),
        Command::Plot { spec } => plot::run(&spec),
        Command::Report { input, out } => report::run(&input, out),
    }
}

/// `created_at` for new records: `$SOURCE_DATE_EPOCH` if set, else now.
pub fn creation_time() -> u64 {
    std::env::var(SOURCE_DATE_EPOCH)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or_else(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        })
}
