//! `framescape` command line: generate, analyze, optimize, anneal, verify.
//!
//! Exit codes: 0 success, 1 check failure, 2 usage, 3 validation,
//! 4 optimizer stall.

/// `print!` that exits quietly once the reader has gone away, as `head` does.
macro_rules! out {
    ($($arg:tt)*) => {
        $crate::emit(&format!($($arg)*))
    };
}

macro_rules! outln {
    ($($arg:tt)*) => {
        $crate::emit(&format!("{}\n", format!($($arg)*)))
    };
}

mod commands;
mod manifest;
mod settings;

use std::fmt::Display;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use framescape::{Field, FrameError};

use settings::{DescentArgs, GridArgs, ScheduleArgs, ToleranceArgs};

pub const EXIT_CHECK: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_STALL: u8 = 4;

/// Error carrying its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self { code, error: error.into() }
    }

    pub fn usage(msg: impl Display) -> Self {
        Self::new(EXIT_USAGE, anyhow::anyhow!("{msg}"))
    }

    pub fn validation(msg: impl Display) -> Self {
        Self::new(EXIT_VALIDATION, anyhow::anyhow!("{msg}"))
    }

    /// Output files that cannot be written are reported like bad arguments.
    pub fn io(error: anyhow::Error) -> Self {
        Self::new(EXIT_USAGE, error)
    }

    /// Classifies a library error from computations on user parameters.
    pub fn frame(e: FrameError) -> Self {
        match e {
            FrameError::NotSquare { .. }
            | FrameError::NotHermitian { .. }
            | FrameError::ComplexEntriesInRealField { .. }
            | FrameError::NotIdempotent { .. }
            | FrameError::TraceMismatch { .. }
            | FrameError::NotParseval { .. }
            | FrameError::Parse(_) => Self::validation(e),
            _ => Self::usage(e),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "framescape", version, about = "Parseval frame design by potential descent on projection manifolds")]
struct Cli {
    /// `key = value` file with defaults for any parameter flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a fixture or random Gramian and write it as JSON.
    Generate {
        /// harmonic, semicircle, mub12_4, mubs6_4, mercedes_benz, identity,
        /// random, tensor or direct_sum
        #[arg(long)]
        kind: String,
        #[arg(short = 'n', long)]
        n: Option<usize>,
        #[arg(short = 'k', long)]
        k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        field: Option<Field>,
        /// Character rows of the harmonic frame, comma separated.
        #[arg(long, value_delimiter = ',')]
        rows: Option<Vec<usize>>,
        /// First factor of tensor or direct_sum.
        #[arg(long)]
        left: Option<PathBuf>,
        /// Second factor of tensor or direct_sum.
        #[arg(long)]
        right: Option<PathBuf>,
        /// Output file; JSON goes to stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Structure and criticality report of a Gramian.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        descent: DescentArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        tol: ToleranceArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Riemannian gradient descent from a file or random starts.
    Optimize {
        /// Starting Gramian.
        #[arg(required_unless_present = "random", conflicts_with = "random")]
        input: Option<PathBuf>,
        /// Random start: N K SEED.
        #[arg(long, num_args = 3, value_names = ["N", "K", "SEED"])]
        random: Option<Vec<u64>>,
        #[arg(long)]
        field: Option<Field>,
        /// Independent random starts; the best one is kept.
        #[arg(long)]
        restarts: Option<usize>,
        #[command(flatten)]
        descent: DescentArgs,
        #[command(flatten)]
        tol: ToleranceArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Follow minimizers along an increasing η schedule toward low coherence.
    Anneal {
        n: usize,
        k: usize,
        #[arg(long)]
        field: Option<Field>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[command(flatten)]
        descent: DescentArgs,
        #[command(flatten)]
        tol: ToleranceArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run a built-in check suite and print TAP.
    Verify {
        /// fixtures, bounds, gradients, theorems or all
        #[arg(default_value = "all")]
        suite: String,
    },
}

fn init_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("FRAMESCAPE_THREADS") else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::usage(format!("FRAMESCAPE_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(Failure::usage)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    init_threads()?;
    let cfg = settings::ConfigFile::load(cli.config.as_deref())?;
    match cli.command {
        Command::Generate { kind, n, k, seed, field, rows, left, right, output } => {
            let req = commands::GenerateRequest { kind, n, k, seed, field, rows, left, right, output };
            commands::generate(&cfg, req)
        }
        Command::Analyze { input, descent, grid, tol, output } => {
            commands::analyze(&cfg, &input, &descent, &grid, &tol, output.as_deref())
        }
        Command::Optimize { input, random, field, restarts, descent, tol, out_dir } => {
            let req = commands::OptimizeRequest { input, random, field, restarts, descent, tol, out_dir };
            commands::optimize(&cfg, req)
        }
        Command::Anneal { n, k, field, seed, schedule, descent, tol, out_dir } => {
            let req = commands::AnnealRequest { n, k, field, seed, schedule, descent, tol, out_dir };
            commands::anneal(&cfg, req)
        }
        Command::Verify { suite } => commands::verify(&suite),
    }
}

fn emit(text: &str) {
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
