//! The `bcg` command-line tool.
//!
//! [`run`] parses arguments, writes to the given streams and returns the
//! process exit code: 0 on success, 2 for usage and parameter errors, 3 when
//! an instance exceeds the enumeration limit, 4 when a verification fails.

mod commands;
pub mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::equilibrium::DEFAULT_EPS;
use crate::error::Error;
use crate::instances::Family;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TOO_LARGE: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

/// Points in the default `bound` sweep.
pub const DEFAULT_GRID: usize = 400;

#[derive(Debug, Parser)]
#[command(name = "bcg", version, about = "Congestion games with Bernoulli participation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated instance as JSON.
    Generate(GenerateArgs),
    /// Enumerate equilibria and report PoA / PoS of an instance.
    Analyze(AnalyzeArgs),
    /// Closed-form PoA / PoS bounds at one p or over a grid.
    Bound(BoundArgs),
    /// Check a smoothness certificate or the exact-potential identity.
    Verify(VerifyArgs),
    /// Reduce a heterogeneous instance to a homogeneous one.
    Reduce(ReduceArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Long-route length for roundabouts; defaults to ⌊(1 + p + √(p(2+p))) k⌋.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub players: usize,
    #[arg(long, default_value_t = 3)]
    pub resources: usize,
    #[arg(long, default_value_t = 2)]
    pub max_strategies: usize,
    #[arg(long, default_value_t = 0.1)]
    pub p_min: f64,
    #[arg(long, default_value_t = 0.9)]
    pub p_max: f64,
    /// Output file; the instance goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    #[arg(long, conflicts_with = "text")]
    pub json: bool,
    #[arg(long)]
    pub text: bool,
    /// Skip the exhaustive scan: run best-response dynamics from the uniform
    /// profiles and report ratios over what it reaches.
    #[arg(long)]
    pub best_response_only: bool,
    #[arg(long, default_value_t = 10_000)]
    pub max_rounds: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, conflicts_with = "grid")]
    pub p: Option<f64>,
    /// Sweep p = 1/n, 2/n, ..., 1.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub out: OutFormat,
    /// Add the engine-computed PoA / PoS of a family instance per row.
    #[arg(long, value_parser = parse_family)]
    pub family: Option<Family>,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, required_unless_present = "potential", conflicts_with = "potential")]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 500)]
    pub kmax: usize,
    #[arg(long, default_value_t = 500)]
    pub mmax: usize,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Check Φ(s') − Φ(s) = C_i(s') − C_i(s) on random instances instead.
    #[arg(long)]
    pub potential: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Common probability of the reduced game; defaults to max p_i.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::TooLarge { .. } => EXIT_TOO_LARGE,
        Error::NoConvergence { .. } | Error::Internal(_) => EXIT_FAILURE,
        _ => EXIT_USAGE,
    }
}

/// Caps the global rayon pool at `BCG_THREADS` workers when set.
fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("BCG_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("BCG_THREADS must be a positive integer, got {value:?}"))?;
    // Fails only if the pool already exists, e.g. on a second call in-process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Runs the tool on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ =
                if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    if let Err(msg) = configure_threads() {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_USAGE;
    }
    let result = match cli.command {
        Command::Generate(a) => commands::generate(&a, out),
        Command::Analyze(a) => commands::analyze(&a, out),
        Command::Bound(a) => commands::bound(&a, out),
        Command::Verify(a) => commands::verify(&a, out),
        Command::Reduce(a) => commands::reduce(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(commands::Failure::Core(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
        Err(commands::Failure::Output(e)) => {
            let _ = writeln!(err, "error: cannot write output: {e}");
            EXIT_FAILURE
        }
    }
}
