//! `kic`: compare trees, generate families, count interval neighborhoods,
//! simulate, and run the verification suite.
//!
//! Exit codes: 0 success, 1 refuted claim, 2 unparsable input or command
//! line, 3 association error, 4 NNI budget exhausted under
//! `--require-exact-nni`, 5 parameter out of range, 6 cap exceeded, 7 seed
//! missing for a stochastic command in JSON mode.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kic_core::{Error, ErrorKind};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "kic", version, about = "k-interval cospeciation tree metric toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Worker threads (default: all cores). `KIC_JOBS` takes precedence.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Every distance between two trees.
    Compare(CompareArgs),
    /// Write a named tree family to files.
    Gen(GenArgs),
    /// Count trees at precise k-IC distance k from a reference tree.
    Neighborhood(NeighborhoodArgs),
    /// Run the claim suite on all trees up to `--max-n` leaves.
    Verify(VerifyArgs),
    /// Monte Carlo over uniform random trees.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long)]
    pub tree1: PathBuf,
    #[arg(long)]
    pub tree2: PathBuf,
    /// Two-column TSV pairing tree1 labels with tree2 labels; identity on
    /// shared labels when omitted.
    #[arg(long)]
    pub assoc: Option<PathBuf>,
    /// Comma-separated subset of kic, rf, path, nni, diameter.
    #[arg(long, value_delimiter = ',')]
    pub metrics: Option<Vec<Metric>>,
    /// Canonical forms the exact NNI search may expand.
    #[arg(long, default_value_t = kic_core::metrics::DEFAULT_NNI_BUDGET)]
    pub nni_budget: usize,
    /// Exit 4 when the NNI search runs out of budget.
    #[arg(long)]
    pub require_exact_nni: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Kic,
    Rf,
    Path,
    Nni,
    Diameter,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Caterpillar,
    ShiftedPair,
    TripleSwapPair,
    MaxDistancePair,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub x: Option<usize>,
    #[arg(long, default_value = "")]
    pub label_prefix: String,
    /// Output prefix: `<out>.1.nwk`, `<out>.2.nwk`, `<out>.assoc.tsv`, or
    /// `<out>.nwk` for a single tree.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct NeighborhoodArgs {
    #[arg(long, visible_alias = "tree1")]
    pub tree: PathBuf,
    /// Interval value; defaults to n-3.
    #[arg(long)]
    pub k: Option<usize>,
    /// Per-k counts for k = 0..n-3.
    #[arg(long)]
    pub histogram: bool,
    /// Count by enumeration even when a closed form applies.
    #[arg(long)]
    pub exhaustive: bool,
    /// Raise the enumeration cap from 11 to 13 leaves.
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 7)]
    pub max_n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Random triples or pairs per sampled size.
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SimMode {
    KicDistribution,
    RfZeroSplit,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub mode: SimMode,
    /// Reference is the caterpillar t1..tn unless `--tree1` is given.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub tree1: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// A failed run: exit code plus message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e.kind() {
            ErrorKind::Parse => 2,
            ErrorKind::Association => 3,
            ErrorKind::Parameter => 5,
            ErrorKind::Cap => 6,
        };
        Failure::new(code, e.to_string())
    }
}

fn configure_threads(jobs: Option<usize>) -> Result<(), Failure> {
    let env = match std::env::var("KIC_JOBS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Failure::new(5, format!("KIC_JOBS must be a positive integer, got {v:?}")))?,
        ),
        Err(_) => None,
    };
    let jobs = env.or(jobs);
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Failure::new(5, "--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::new(5, e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    configure_threads(cli.jobs)?;
    match &cli.command {
        Command::Compare(a) => commands::compare(a, cli.format),
        Command::Gen(a) => commands::gen(a, cli.format),
        Command::Neighborhood(a) => commands::neighborhood(a, cli.format),
        Command::Verify(a) => commands::verify(a, cli.format),
        Command::Simulate(a) => commands::simulate(a, cli.format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("kic: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
