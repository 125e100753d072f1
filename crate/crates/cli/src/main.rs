//! `margulis`: Margulis invariants and cones of proper deformations from the
//! command line.
//!
//! Exit codes: 0 success, 1 clean negative (no certificate), 2 input rejected
//! on mathematical grounds, 3 parse or I/O error, 4 numerical failure.

mod cache;
mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Io(String),
    Math(margulis_core::Error),
}

impl From<margulis_core::Error> for CliError {
    fn from(e: margulis_core::Error) -> Self {
        CliError::Math(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 3,
            CliError::Math(margulis_core::Error::LpNumericalFailure(_)) => 4,
            CliError::Math(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Math(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "margulis",
    version,
    about = "Margulis invariants of affine Schottky groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    /// Group file: {"generators": [[a,b,c,d],…]} or {"preset": …, "params": {…}}.
    #[arg(long, conflicts_with = "preset")]
    pub group: Option<PathBuf>,
    /// three_holed_sphere or one_holed_torus.
    #[arg(long)]
    pub preset: Option<String>,
    /// Preset parameters as inline JSON, e.g. '{"l1":4,"l2":4}'.
    #[arg(long, requires = "preset")]
    pub params: Option<String>,
    /// Representation V_r; defaults to the group file's "r", then 1.
    #[arg(long)]
    pub r: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Write the result here instead of stdout (atomically).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certify a Schottky group and print its data.
    Group {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// JSONL table of ℓ, α and α/ℓ for every class up to length L.
    Invariants {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        cocycle: PathBuf,
        #[arg(long = "L", default_value_t = 6)]
        max_len: usize,
        /// Skip a class when its inverse came earlier (odd r only).
        #[arg(long)]
        fold_inverses: bool,
        /// Directory for the functional cache.
        #[arg(long)]
        cache: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Margin LPs for the outer cone approximation at grading L.
    Cone {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long = "L", default_value_t = 8)]
        max_len: usize,
        #[arg(long)]
        fold_inverses: bool,
        /// Also write the cross-section through entry `--plane` (needs dim 3).
        #[arg(long)]
        section: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        plane: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Search for an opposite-sign certificate of non-properness.
    Certify {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        cocycle: PathBuf,
        #[arg(long = "L", default_value_t = 8)]
        max_len: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare the orbit integral of F with α on one word.
    Quadrature {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        cocycle: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        /// Seed for the random base value of the section.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// CSV of t*₊, t*₋ and cross-section area for L = 1..L.
    Report {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long = "L", default_value_t = 8)]
        max_len: usize,
        #[arg(long)]
        fold_inverses: bool,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Group { group, out } => commands::group(&group, &out),
        Command::Invariants {
            group,
            cocycle,
            max_len,
            fold_inverses,
            cache,
            out,
        } => commands::invariants(
            &group,
            &cocycle,
            max_len,
            fold_inverses,
            cache.as_deref(),
            &out,
        ),
        Command::Cone {
            group,
            max_len,
            fold_inverses,
            section,
            plane,
            out,
        } => commands::cone(
            &group,
            max_len,
            fold_inverses,
            section.as_deref(),
            plane,
            &out,
        ),
        Command::Certify {
            group,
            cocycle,
            max_len,
            out,
        } => commands::certify(&group, &cocycle, max_len, &out),
        Command::Quadrature {
            group,
            cocycle,
            word,
            steps,
            seed,
            out,
        } => commands::quadrature(&group, &cocycle, &word, steps, seed, &out),
        Command::Report {
            group,
            max_len,
            fold_inverses,
            out,
        } => commands::report(&group, max_len, fold_inverses, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
