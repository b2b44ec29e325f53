mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use macsk::harness::Report;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] macsk::Error),

    #[error("file not found: {0}")]
    NotFound(PathBuf),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::NotFound(_) => "file_not_found",
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
        }
    }

    fn exit_code(&self) -> u8 {
        match self.kind() {
            "schema" => 2,
            "file_not_found" => 3,
            "budget" | "alphabet_limit" => 4,
            "io" => 6,
            "usage" => 64,
            _ => 5,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "macsk", version, about = "Secret-key generation over two-input multiple-access channels")]
struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the JSON report here and print a summary instead.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Maximum symmetric rate without feedback.
    Rstar(RstarArgs),
    /// Analytic rate of the two-phase adder feedback code.
    FbcodeRate(FbcodeRateArgs),
    /// Monte Carlo decoding error of the adder feedback code.
    SimulateCode(SimulateCodeArgs),
    /// One-shot converse bound on a key law.
    Bound(BoundArgs),
    /// Exact interactive-communication checks on a protocol.
    CheckInteractive(CheckInteractiveArgs),
    /// Source-emulation key scheme.
    SkSe(SkSeArgs),
    /// Feedback key scheme with binning and privacy amplification.
    SkFeedback(SkFeedbackArgs),
    /// Runs a protocol file.
    SkRun(SkRunArgs),
    /// Property batteries.
    VerifySuite(VerifySuiteArgs),
}

#[derive(Debug, Args)]
pub struct RstarArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long, default_value_t = 33)]
    pub grid: usize,
    #[arg(long, default_value_t = 200)]
    pub refine: usize,
}

#[derive(Debug, Args)]
pub struct FbcodeRateArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 4.0)]
    pub slack: f64,
    /// Rate whose crossing point `k0` is reported.
    #[arg(long, default_value_t = 0.75)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct SimulateCodeArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 4.0)]
    pub slack: f64,
    #[arg(long)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub law: PathBuf,
    /// `lp` or a partition such as `1|2,3`.
    #[arg(long, default_value = "lp")]
    pub partition: String,
    #[arg(long)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct CheckInteractiveArgs {
    #[arg(long)]
    pub proto: PathBuf,
    #[arg(long)]
    pub law: PathBuf,
    /// Extra random fractional partitions, drawn from `--seed`.
    #[arg(long, default_value_t = 0, requires = "seed")]
    pub random_partitions: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SkSeArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long)]
    pub n: usize,
    /// Sampled runs; exact enumeration when absent.
    #[arg(long, requires = "seed")]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `builtin`, `tdma` or `random`.
    #[arg(long, default_value = "builtin")]
    pub code: String,
    /// Per-user rate of the random codebook.
    #[arg(long, default_value_t = 0.5)]
    pub rate: f64,
}

#[derive(Debug, Args)]
pub struct SkFeedbackArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 3.0)]
    pub slack: f64,
    #[arg(long)]
    pub blocks: usize,
    #[arg(long, default_value_t = 0.1)]
    pub dsw: f64,
    #[arg(long, default_value_t = 0.1)]
    pub dpa: f64,
    #[arg(long)]
    pub seed: u64,
    /// Independent runs.
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    /// `adder` or `tdma`.
    #[arg(long, default_value = "adder")]
    pub code: String,
    /// Enumerate every message choice and compute the security index
    /// exactly; tiny instances on deterministic channels only.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct SkRunArgs {
    #[arg(long)]
    pub proto: PathBuf,
    #[arg(long, conflicts_with = "trials")]
    pub exact: bool,
    #[arg(long, requires = "seed")]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct VerifySuiteArgs {
    /// `quick` or `full`.
    #[arg(default_value = "quick")]
    pub level: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Inject a genie XOR transcript into the interactive batteries.
    #[arg(long)]
    pub inject_xor: bool,
}

fn run(cli: Cli) -> CliResult<Report> {
    match cli.command {
        Command::Rstar(a) => commands::rstar(a),
        Command::FbcodeRate(a) => commands::fbcode_rate(a),
        Command::SimulateCode(a) => commands::simulate_code(a),
        Command::Bound(a) => commands::bound(a),
        Command::CheckInteractive(a) => commands::check_interactive(a),
        Command::SkSe(a) => commands::sk_se(a),
        Command::SkFeedback(a) => commands::sk_feedback(a),
        Command::SkRun(a) => commands::sk_run(a),
        Command::VerifySuite(a) => commands::verify_suite(a),
    }
}

/// Writes to stdout, tolerating a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn fail(e: &CliError) -> ExitCode {
    let obj = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
    eprintln!("{obj}");
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            emit(&e.to_string());
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            return fail(&CliError::Usage(msg.trim().to_string()));
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            return fail(&CliError::Usage(format!("cannot start thread pool: {e}")));
        }
    }
    let out = cli.out.clone();
    let report = match run(cli) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let json = report.to_json();
    match out {
        Some(path) => {
            if let Err(source) = std::fs::write(&path, format!("{json}\n")) {
                return fail(&CliError::Io { path, source });
            }
            emit(&commands::summary(&report));
        }
        None => emit(&format!("{json}\n")),
    }
    if report.status == macsk::harness::Status::Pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
