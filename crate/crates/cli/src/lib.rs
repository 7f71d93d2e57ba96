//! `umda`: run UMDA scaling sweeps, evaluate level-based runtime bounds,
//! print level sequences, run lemma verification sweeps and fit growth
//! models.
//!
//! Exit codes: 0 success, 1 a failed check (violations, or failed trials
//! under `--strict`), 2 invalid configuration or input.

/// Exit code for a failed check.
pub const EXIT_FAILED: u8 = 1;
/// Exit code for invalid configuration or input.
pub const EXIT_CONFIG: u8 = 2;

mod sweep;
mod theory;
mod verify;

use std::path::PathBuf;
use std::ffi::OsString;

use clap::{Args, Parser, Subcommand};
use umda_core::verify::Check;
use umda_core::Problem;

#[derive(Parser, Debug)]
#[command(name = "umda", version, about = "UMDA runtime workbench")]
pub struct Cli {
    /// Worker threads (default: available parallelism). Output does not
    /// depend on this value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a runtime sweep and write trial CSV plus JSON sidecar.
    Run(RunArgs),
    /// Run a sweep, then fit growth models to the mean runtimes.
    Report(RunArgs),
    /// Evaluate the level-based upper bound for a preset partition.
    Bound(BoundArgs),
    /// Print the sqrt(n)-spaced OneMax level thresholds.
    Levels(LevelsArgs),
    /// Run a randomized verification sweep and print a JSON report.
    Verify(VerifyArgs),
    /// Fit growth models to a trial CSV.
    Fit(FitArgs),
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Benchmark: onemax, leadingones or binval.
    #[arg(long)]
    pub problem: Option<Problem>,
    /// Problem sizes, comma separated.
    #[arg(long = "n", value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Offspring population rule: const, n, sqrt_n, sqrt_n_log_n, log_n or c*rule [default: n].
    #[arg(long)]
    pub lambda: Option<String>,
    /// Parent population rule, same grammar as --lambda [default: sqrt_n].
    #[arg(long)]
    pub mu: Option<String>,
    /// Trials per size [default: 100].
    #[arg(long)]
    pub repeats: Option<usize>,
    /// Master seed. Without it a time-derived seed is used and echoed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bootstrap resamples per size [default: 100].
    #[arg(long)]
    pub bootstrap: Option<usize>,
    /// Confidence level of the bootstrap interval [default: 0.95].
    #[arg(long)]
    pub confidence: Option<f64>,
    /// Smoothing parameter; 1 is the UMDA, below 1 is PBIL [default: 1].
    #[arg(long)]
    pub rho: Option<f64>,
    /// Generation cap per trial [default: 100000].
    #[arg(long)]
    pub max_generations: Option<u64>,
    /// Trial CSV path; the sidecar is written next to it.
    #[arg(long, default_value = "trials.csv")]
    pub out: PathBuf,
    /// JSON file with sweep settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Require --seed and exit 1 if any trial hits the generation cap.
    #[arg(long)]
    pub strict: bool,
    /// Record wall-clock start and finish times in the sidecar.
    #[arg(long)]
    pub timestamps: bool,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum Preset {
    Leadingones,
    OnemaxSmall,
    OnemaxLarge,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub preset: Preset,
    #[arg(long = "n")]
    pub n: usize,
    #[arg(long)]
    pub mu: usize,
    #[arg(long)]
    pub lambda: usize,
    /// Margin constant of the small-population preset.
    #[arg(long, default_value_t = 0.5)]
    pub c: f64,
    /// Constant a in the advisory check mu >= a ln n.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Level spacing of the large-population preset [default: largest admissible].
    #[arg(long)]
    pub d: Option<f64>,
    /// Lower bound on Pr(Y >= E[Y]) [default: (1/2)(1/4)^7].
    #[arg(long)]
    pub psi: Option<f64>,
    /// Upgrade probability of the large-population preset [default: psi].
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Constant in the advisory check mu >= c sqrt(n) ln n.
    #[arg(long, default_value_t = 1.0)]
    pub large_c: f64,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct LevelsArgs {
    #[arg(long = "n")]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// feige, anticoncentration, integer-median, pmin-quarter, ce or inequality-g1.
    pub check: Check,
    #[arg(long, default_value_t = 10_000)]
    pub cases: usize,
    /// Largest number of Bernoulli components [default: per check].
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Sweep seed. Without it a time-derived seed is used and reported.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest n for inequality-g1.
    #[arg(long, default_value_t = 1_000_000)]
    pub n_max: usize,
    /// Smallest marginal for ce.
    #[arg(long, default_value_t = 0.25)]
    pub p_min: f64,
    /// Spacing constant for ce.
    #[arg(long, default_value_t = 4.0)]
    pub dstar: f64,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Require --seed.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Trial CSV produced by `run`.
    #[arg(long)]
    pub input: PathBuf,
    /// Models to fit, comma separated ("n ln n", "n^1.5", "n^2", "n^2 ln n")
    /// [default: per problem].
    #[arg(long, value_delimiter = ',')]
    pub models: Option<Vec<String>>,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

/// A seed from the clock, for runs without `--seed`.
pub fn clock_seed() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn execute<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_CONFIG;
        }
        // A pool may already exist when called more than once in-process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let result = match cli.command {
        Command::Run(args) => sweep::run(&args, false),
        Command::Report(args) => sweep::run(&args, true),
        Command::Bound(args) => theory::bound(&args),
        Command::Levels(args) => theory::levels(&args),
        Command::Verify(args) => verify::verify(&args),
        Command::Fit(args) => sweep::fit(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_CONFIG
        }
    }
}
