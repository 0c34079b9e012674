//! Front end for `retro-core`: oracle-equivalence verification, call-count
//! benchmarks written as CSV, and the three reductions run on input files.

pub mod bench;
pub mod reduce;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use retro_core::Strategy;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    CheckFailed(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        let context = "writing CSV".to_string();
        match e.into_kind() {
            csv::ErrorKind::Io(source) => CliError::Io { context, source },
            other => CliError::Io {
                context,
                source: std::io::Error::other(format!("{other:?}")),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Instance {
    Minplus,
    #[value(name = "3sum")]
    ThreeSum,
    Csat,
}

impl Instance {
    pub fn name(self) -> &'static str {
        match self {
            Instance::Minplus => "minplus",
            Instance::ThreeSum => "3sum",
            Instance::Csat => "csat",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Checkpoint,
    Wbt,
    Auto,
    All,
}

impl StrategyArg {
    pub fn strategies(self) -> Vec<Strategy> {
        match self {
            StrategyArg::Checkpoint => vec![Strategy::Checkpoint],
            StrategyArg::Wbt => vec![Strategy::Wbt],
            StrategyArg::Auto => vec![Strategy::Auto],
            StrategyArg::All => vec![Strategy::Checkpoint, Strategy::Wbt, Strategy::Auto],
        }
    }

    fn single(self) -> Result<Strategy, CliError> {
        match self.strategies().as_slice() {
            [s] => Ok(*s),
            _ => Err(CliError::Usage("reduce needs a single strategy".into())),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "retro", version, about = "Retroactive list structures: verify, bench, reduce")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare fully retroactive strategies against the replay oracle.
    Verify(verify::VerifyArgs),
    /// Count base-structure calls per query and append CSV records.
    Bench(bench::BenchArgs),
    /// Solve a problem instance through retroactive operations.
    Reduce(reduce::ReduceArgs),
}

/// Parses `args` and runs the command, writing results to `out`. Returns the
/// process exit code; diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Verify(a) => verify::cmd_verify(&a, out),
        Command::Bench(a) => bench::cmd_bench(&a, out),
        Command::Reduce(a) => reduce::cmd_reduce(&a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "retro: {e}");
            e.exit_code()
        }
    }
}

pub(crate) fn write_out(out: &mut dyn Write, text: std::fmt::Arguments) -> Result<(), CliError> {
    out.write_fmt(text)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| CliError::io("writing output", e))
}

pub(crate) fn path_context(action: &str, path: &std::path::Path) -> String {
    format!("{action} {}", path.display())
}
