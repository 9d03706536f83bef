//! `hgbs` command-line frontend.
//!
//! [`run`] parses one command line, executes it and returns the process exit
//! code: 0 on success, 1 when the library rejects the request (the error
//! variant name is printed on stderr), 2 on malformed usage.

mod commands;
pub mod report;

use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hgbs_core::analysis::{MemoryModel, WordMult};
use hgbs_core::PolicyKind;

pub use report::{emit_report, Cell, Format, Meta, Report};

#[derive(Debug, Parser)]
#[command(
    name = "hgbs",
    version,
    about = "Hierarchical grid-based key pre-distribution toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate polynomials and key rings and write the deployment file.
    Deploy(DeployArgs),
    /// Compute the pairwise key between two nodes of a deployment.
    Key(KeyArgs),
    /// Evaluate closed-form models.
    Analyze(AnalyzeArgs),
    /// Run Monte Carlo or exhaustive checks against a deployment.
    Simulate(SimulateArgs),
    /// Direct-key connectivity of related schemes.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Omit the leading provenance line (or JSON envelope).
    #[arg(long)]
    pub no_meta: bool,
}

#[derive(Debug, Args)]
pub struct DeployArgs {
    #[arg(long)]
    pub order: u32,
    #[arg(long)]
    pub unit: u32,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub policy: PolicyKind,
    /// Prime field modulus (default 2^61 - 1).
    #[arg(long)]
    pub modulus: Option<u64>,
    /// Keep only orders 1..=d in every ring.
    #[arg(long)]
    pub truncate: Option<u32>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Leave the authority polynomials out of the file.
    #[arg(long)]
    pub no_authority: bool,
}

#[derive(Debug, Args)]
pub struct KeyArgs {
    #[arg(long)]
    pub deployment: PathBuf,
    /// Node ID, decimal or `0b`-prefixed binary.
    #[arg(long, value_parser = parse_id)]
    pub i: u64,
    #[arg(long, value_parser = parse_id)]
    pub j: u64,
    /// Fall back to a relayed path key when the rings are truncated.
    #[arg(long, requires = "seed")]
    pub relay: bool,
    /// Seed for relay selection and the fresh path key.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AnalyzeWhat {
    Connectivity,
    Pz,
    Memory,
    Cost,
    Resiliency,
    Blocked,
    Ctf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, value_enum)]
    pub what: AnalyzeWhat,
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long)]
    pub unit: Option<u32>,
    /// Nodes per basic zone, instead of `--unit`.
    #[arg(long)]
    pub zone_size: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Base polynomial degree, instead of `--alpha`.
    #[arg(long)]
    pub t0: Option<usize>,
    #[arg(long)]
    pub policy: Option<PolicyKind>,
    /// Network size N.
    #[arg(long)]
    pub nodes: Option<u64>,
    #[arg(long, default_value_t = 61)]
    pub lgq: u32,
    /// M1, M2, M3 or M3_EXACT; all four when absent.
    #[arg(long)]
    pub model: Option<MemoryModel>,
    #[arg(long, default_value_t = 1)]
    pub comparison_cost: u64,
    /// schoolbook_64, karatsuba_64 or mixed_16x64; all three when absent.
    #[arg(long)]
    pub word_mult: Option<WordMult>,
    /// Compromised-node counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub nc: Vec<u64>,
    /// Use the unnormalised traffic weights `2^-(i-1)`.
    #[arg(long)]
    pub unnormalized: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SimulateWhat {
    SameZone,
    CompromiseRandom,
    CompromiseSelective,
    Blocked,
    Agreement,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub what: SimulateWhat,
    #[arg(long)]
    pub deployment: PathBuf,
    #[arg(long)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    /// Grid order for same-zone; every order when absent.
    #[arg(long)]
    pub z: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    pub nc: Vec<u64>,
    #[arg(long, default_value_t = 0)]
    pub zone: u64,
    #[arg(long)]
    pub budget: Option<u64>,
    /// Broken order for blocked; every order when absent.
    #[arg(long)]
    pub i: Option<u32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeName {
    Hgbs,
    Gbs,
    Gbs3d,
    Plat,
    Eg,
    Cps,
    Ddhv,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub scheme: Vec<SchemeName>,
    #[arg(long)]
    pub nodes: Option<f64>,
    /// Key pool size P.
    #[arg(long)]
    pub pool: Option<u64>,
    /// Keys per ring k.
    #[arg(long)]
    pub ring: Option<u64>,
    #[arg(long)]
    pub omega: Option<u64>,
    #[arg(long)]
    pub tau: Option<u64>,
    /// Neighbours per node for cps.
    #[arg(long)]
    pub m: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_id(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0b") {
        Some(bits) => u64::from_str_radix(bits, 2),
        None => s.parse(),
    };
    parsed.map_err(|_| format!("{s:?} is not a decimal or 0b-prefixed binary ID"))
}

#[derive(Debug)]
pub enum CliError {
    Domain(hgbs_core::Error),
    Usage(String),
    Io(io::Error),
}

impl From<hgbs_core::Error> for CliError {
    fn from(e: hgbs_core::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Runs one command line (`argv[0]` is the program name).
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
                return 2;
            }
            let _ = stdout.write_all(rendered.as_bytes());
            return 0;
        }
    };
    let meta = Meta {
        args: argv.iter().skip(1).cloned().collect(),
    };
    match commands::execute(cli.command, &meta, stdout) {
        Ok(()) => 0,
        Err(CliError::Domain(e)) => {
            let _ = writeln!(stderr, "{}: {e}", e.name());
            1
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(stderr, "IoError: {e}");
            1
        }
    }
}
