//! The `pqr-idem` command line.
//!
//! [`run`] parses an argument vector, executes exactly one verb and returns
//! the exit status together with everything that should reach stdout and
//! stderr, so the binary is a thin shell around it and tests can drive it
//! in-process.
//!
//! Exit status: `0` on success, `1` for domain errors (and failed `verify`
//! checks), `2` for usage errors. Failures print a single line
//! `error: <CODE>: <message>` on stderr.

mod commands;
mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use pqr_idempotents::{Error, DEFAULT_BUDGET};
use serde_json::Value;

pub use verify::{verify, CheckLine, CheckStatus};

#[derive(Debug, Parser)]
#[command(
    name = "pqr-idem",
    version,
    about = "Idempotents of Z_n, Z_n[x] and 2x2 matrices over Z_pqr[x]"
)]
pub struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Upper bound on the number of states a brute-force search may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the idempotents of Z_n and check the closed forms against CRT.
    Idempotents { n: u64 },
    /// Solve t^2 = t + 2d (mod n) and compare with the closed-form root lists.
    SolveTrace { n: u64, d: u64 },
    /// Classify the matrix stored in a matrix file.
    Classify { file: PathBuf },
    /// Build a member of a class and emit it as a matrix file.
    Generate(GenerateArgs),
    /// Count the constant idempotent 2x2 matrices over Z_n exhaustively.
    Oracle { n: u64 },
    /// Run the invariant suite for n.
    Verify {
        n: u64,
        /// Random generator draws per family.
        #[arg(long, default_value_t = 50)]
        draws: usize,
    },
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// One of det0-general, det0-scaled, det-pair-scalar, det-pair-shift,
    /// det-pair-mixed, det-single-scalar, det-single-shift.
    pub family: String,
    #[arg(long)]
    pub n: u64,
    /// Draw the free parameters from this seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Top-left parameter e(x), e.g. "3 + 2*x^2".
    #[arg(long)]
    pub e: Option<String>,
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub g: Option<String>,
    /// Multiplier m(x) of the scaled family.
    #[arg(long)]
    pub multiplier: Option<String>,
    /// Role assignment p,q,r (a permutation of the prime factors).
    #[arg(long, value_delimiter = ',')]
    pub roles: Option<Vec<u64>>,
    /// Scale I of det0-scaled; defaults to the first positional pair.
    #[arg(long)]
    pub scale: Option<u64>,
    /// Maximum entry degree for seeded draws.
    #[arg(long, default_value_t = 5)]
    pub degree: usize,
    /// Write the matrix file here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a finished invocation produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

/// Failure of a single invocation.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{failed} of {total} checks failed")]
    VerifyFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Domain(e) => e.code(),
            CliError::Usage(_) => "USAGE",
            CliError::Io(_) => "IO",
            CliError::VerifyFailed { .. } => "VERIFY_FAILED",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Domain(Error::Parse(_)) => 2,
            _ => 1,
        }
    }
}

/// Text and JSON renderings of one verb's result.
pub struct Rendered {
    pub text: String,
    pub json: Value,
    /// Set by `verify` when a check failed; the output is still printed.
    pub failure: Option<CliError>,
}

/// Parses `args` (including the program name) and runs the verb.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: e.to_string(),
                    stderr: String::new(),
                },
                _ => {
                    let rendered = e.to_string();
                    let first = rendered
                        .lines()
                        .next()
                        .unwrap_or("invalid arguments")
                        .trim_start_matches("error: ");
                    failure(&CliError::Usage(first.to_string()), String::new())
                }
            };
        }
    };
    match execute(&cli) {
        Ok(rendered) => {
            let stdout = if cli.json {
                let mut s = serde_json::to_string_pretty(&rendered.json).expect("json value");
                s.push('\n');
                s
            } else {
                rendered.text
            };
            match rendered.failure {
                None => Outcome {
                    code: 0,
                    stdout,
                    stderr: String::new(),
                },
                Some(err) => failure(&err, stdout),
            }
        }
        Err(err) => failure(&err, String::new()),
    }
}

fn failure(err: &CliError, stdout: String) -> Outcome {
    Outcome {
        code: err.exit_code(),
        stdout,
        stderr: format!("error: {}: {}\n", err.code(), err),
    }
}

/// Runs the parsed command.
pub fn execute(cli: &Cli) -> Result<Rendered, CliError> {
    match &cli.command {
        Command::Idempotents { n } => commands::idempotents(*n),
        Command::SolveTrace { n, d } => commands::solve_trace(*n, *d),
        Command::Classify { file } => commands::classify(file),
        Command::Generate(args) => commands::generate(args),
        Command::Oracle { n } => commands::oracle(*n, cli.budget),
        Command::Verify { n, draws } => verify::render(*n, *draws, cli.budget),
    }
}

/// Space-separated decimal list.
pub(crate) fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}
