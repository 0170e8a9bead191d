//! The `offeropt` command line.
//!
//! Every subcommand is also callable as a plain function (`cmd_*`) that
//! writes its summary to a caller-supplied stream, which is how the
//! integration tests drive it.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use offeropt::io::IoError;
use offeropt::{Exec, RootSelector};
use thiserror::Error;

pub mod bench;
pub mod compare;
pub mod gen;
pub mod pipeline;
pub mod segments;
pub mod solve;
pub mod verify;

pub use bench::{cmd_bench, fit_exponents, run_bench, BenchArgs, Fit};
pub use compare::{cmd_compare, run_batch, CompareArgs};
pub use gen::{cmd_gen, GenArgs};
pub use pipeline::{cmd_pipeline, run_pipeline, Manifest, PipelineArgs, PipelinePlan};
pub use segments::{cmd_segments, SegmentsArgs};
pub use solve::{cmd_solve, SolveArgs};
pub use verify::{cmd_verify, VerifyArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Model(#[from] offeropt::Error),
    #[error("{0}")]
    Usage(String),
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// `verify` found a violated constraint, or `compare` caught the
    /// greedy beating the oracle.
    Failed,
    /// Branch-and-bound hit its node limit; the best allocation found was
    /// still written.
    Incomplete,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Failed => 1,
            Status::Incomplete => 3,
        }
    }
}

/// Exit code for input, usage and I/O errors.
pub const INPUT_ERROR: u8 = 2;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Selector {
    /// Linear scan over the queue roots.
    #[default]
    Scan,
    /// Priority queue over the queue roots.
    Tournament,
}

impl From<Selector> for RootSelector {
    fn from(s: Selector) -> Self {
        match s {
            Selector::Scan => RootSelector::Scan,
            Selector::Tournament => RootSelector::Tournament,
        }
    }
}

pub(crate) fn exec(sequential: bool) -> Exec {
    if sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

pub(crate) fn parse_range(s: &str) -> Result<[f64; 2], String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected LO,HI, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok([parse(lo)?, parse(hi)?])
}

#[derive(Debug, Parser)]
#[command(
    name = "offeropt",
    version,
    about = "Offer allocation across segments and subscribers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Assign offers to subscribers with the greedy algorithm.
    Solve(SolveArgs),
    /// Distribute offer units or budgets across segments.
    Segments(SegmentsArgs),
    /// Run both stages from a manifest.
    Pipeline(PipelineArgs),
    /// Check an assignment against its instance.
    Verify(VerifyArgs),
    /// Compare the greedy against exhaustive search on small instances.
    Compare(CompareArgs),
    /// Time the greedy over a grid of sizes.
    Bench(BenchArgs),
}

pub fn run(command: &Command, out: &mut dyn Write) -> CliResult<Status> {
    match command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Solve(a) => cmd_solve(a, out),
        Command::Segments(a) => cmd_segments(a, out),
        Command::Pipeline(a) => cmd_pipeline(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Summaries go to `out`, diagnostics to `err`.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return INPUT_ERROR;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    match run(&cli.command, out) {
        Ok(status) => {
            if status == Status::Incomplete {
                let _ = writeln!(
                    err,
                    "warning: node limit reached, wrote the best allocation found"
                );
            }
            status.code()
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            INPUT_ERROR
        }
    }
}
