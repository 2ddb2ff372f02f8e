//! Command-line harness: one subcommand per experiment, each producing a
//! JSON, CSV or plotdata artifact stamped with the tool version, the
//! experiment tag, the run seed and a hash of the run configuration.

pub mod artifact;
pub mod commands;
pub mod inputs;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use artifact::{Artifact, Cell, Format, RunConfig, Table};

use crate::error::{Error, Result};
use crate::funcs::LogGrid;

pub const DEFAULT_SEED: u64 = 0x7715_7ab5;
pub const THREADS_ENV: &str = "TWISTLAB_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "twistlab", version, about = "Experiments on the quasi-linear maps Ω_φ and the twisted sums Z(φ)")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Exit with status 3 when the headline verdict is Inconclusive.
    #[arg(long, global = true)]
    pub strict: bool,
    #[arg(long = "t-min", global = true)]
    pub t_min: Option<f64>,
    #[arg(long = "t-max", global = true)]
    pub t_max: Option<f64>,
    #[arg(long = "points-per-window", global = true)]
    pub points_per_window: Option<usize>,
}

impl RunArgs {
    pub fn grid(&self) -> Result<LogGrid> {
        let d = LogGrid::default();
        LogGrid::new(
            self.t_min.unwrap_or(d.t_min),
            self.t_max.unwrap_or(d.t_max),
            self.points_per_window.unwrap_or(d.points_per_window),
            d.window_base,
        )
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate a map (and optionally its derivatives) on log-spaced points.
    Eval(commands::EvalArgs),
    /// Lipschitz bounds and sampled quasi-norm constants of a map.
    Constants(commands::ConstantsArgs),
    /// Equivalence (or projective equivalence) of two maps.
    Equiv(commands::EquivArgs),
    /// Cone element of a generator spec: bounds, class membership, Gram rank.
    Cone(commands::ConeArgs),
    /// Kronecker orbit density and sign-pattern search.
    Kronecker(commands::KroneckerArgs),
    /// Block-sequence norms against the Kalton-Peck and Orlicz norms.
    Blocks(commands::BlocksArgs),
    /// Incomparability evidence for a pair of maps.
    Distinguish(commands::DistinguishArgs),
    /// Uniform-block self-similarity defects and the Kalton-Peck detector.
    Selfsim(commands::SelfsimArgs),
}

/// Runs the parsed command and returns its artifact without writing it.
pub fn execute(cli: &Cli) -> Result<Artifact> {
    let run = &cli.run;
    match &cli.command {
        Command::Eval(a) => commands::cmd_eval(a, run),
        Command::Constants(a) => commands::cmd_constants(a, run),
        Command::Equiv(a) => commands::cmd_equiv(a, run),
        Command::Cone(a) => commands::cmd_cone(a, run),
        Command::Kronecker(a) => commands::cmd_kronecker(a, run),
        Command::Blocks(a) => commands::cmd_blocks(a, run),
        Command::Distinguish(a) => commands::cmd_distinguish(a, run),
        Command::Selfsim(a) => commands::cmd_selfsim(a, run),
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Unsupported(format!("cannot start thread pool: {e}")))
}

/// Parses `args`, runs the command and writes the artifact. Returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = thread_pool().and_then(|pool| pool.install(|| execute(&cli)));
    let artifact = match outcome {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    let bytes = match artifact.render() {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_IO;
        }
    };
    let written = match &cli.run.out {
        Some(path) => std::fs::write(path, &bytes),
        None => std::io::stdout().lock().write_all(&bytes),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_IO;
    }
    if cli.run.strict && artifact.inconclusive {
        eprintln!("verdict Inconclusive");
        return EXIT_INCONCLUSIVE;
    }
    EXIT_OK
}
