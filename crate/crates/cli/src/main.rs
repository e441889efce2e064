use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Exit statuses.
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NOT_CONVERGED: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "permusmooth",
    version,
    about = "Learn a smooth row ordering and feature weights"
)]
struct Cli {
    /// Worker threads for restarts, sweeps and large pair scans (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit one epsilon and write a result document.
    Fit(FitArgs),
    /// Fit a grid of epsilon values and pick the L-curve elbow.
    Sweep(SweepArgs),
    /// Generate the two-signal synthetic dataset.
    Synth(SynthArgs),
    /// Monotone ordering of the weighted aggregate column.
    Sort(SortArgs),
    /// Time single iterations over a (T, D) grid and fit scaling slopes.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input CSV file.
    #[arg(long)]
    input: PathBuf,
    /// The first line holds data, not column names.
    #[arg(long)]
    no_header: bool,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Refuse inputs with more rows (the pair cache holds T² values).
    #[arg(long, default_value_t = 20_000)]
    max_rows: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Init {
    Random,
    Identity,
    RandomWeights,
}

#[derive(Debug, Args)]
struct DescentArgs {
    /// Absolute stopping threshold on the objective decrease.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, env = "PERMUSMOOTH_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Init::Random)]
    init: Init,
    /// Close the ordering into a ring (default).
    #[arg(long, overrides_with = "no_periodic")]
    periodic: bool,
    /// Treat the ordering as an open path.
    #[arg(long, overrides_with = "periodic")]
    no_periodic: bool,
    /// Column (name or 1-based index) whose weight is held fixed.
    #[arg(long, requires = "pin_weight")]
    pin_column: Option<String>,
    #[arg(long, requires = "pin_column")]
    pin_weight: Option<f64>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    epsilon: f64,
    #[command(flatten)]
    descent: DescentArgs,
    /// Result document path (default: standard output).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the input rows in the learned order.
    #[arg(long)]
    reordered: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("grid").required(true).args(["epsilon_grid", "epsilon_auto"])))]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated epsilon values.
    #[arg(long, value_delimiter = ',')]
    epsilon_grid: Option<Vec<f64>>,
    /// Log-spaced grid scaled by the median per-column non-smoothness.
    #[arg(long, num_args = 0..=1, default_missing_value = "16")]
    epsilon_auto: Option<usize>,
    #[command(flatten)]
    descent: DescentArgs,
    /// L-curve CSV path.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Result document of the elbow fit (default: standard output).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 50)]
    rows: usize,
    #[arg(long, default_value_t = 52)]
    dims: usize,
    /// Full periods of the sine and cosine over the rows.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [1.0, 2.0])]
    periods: Vec<f64>,
    /// Phases of the sine and cosine in radians.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.0, std::f64::consts::FRAC_PI_4])]
    phases: Vec<f64>,
    #[arg(long, env = "PERMUSMOOTH_SEED", default_value_t = 0)]
    seed: u64,
    /// Directory receiving smooth.csv, scrambled.csv and true_sigma.csv.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SortDirection {
    Ascending,
    Descending,
}

#[derive(Debug, Args)]
struct SortArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = SortDirection::Ascending)]
    direction: SortDirection,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, env = "PERMUSMOOTH_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    reordered: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 200)]
    fixed_rows: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [64, 128, 256, 512, 1024])]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 8)]
    fixed_dims: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [64, 128, 256, 512])]
    rows: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    /// Minimum wall time per repeat, in seconds.
    #[arg(long, default_value_t = 0.05)]
    min_repeat_seconds: f64,
    #[arg(long, env = "PERMUSMOOTH_SEED", default_value_t = 0)]
    seed: u64,
    /// Report path (default: standard output).
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    let outcome = match cli.command {
        Command::Fit(args) => commands::fit(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Synth(args) => commands::synth(args),
        Command::Sort(args) => commands::sort(args),
        Command::Bench(args) => commands::bench(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("warning: descent stopped at the iteration cap before converging");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
