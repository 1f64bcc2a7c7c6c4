//! `ridepool` command line: solve, validate, generate, stats, bench.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ridepool", version, about = "Ride pooling and dispatching solver for large PDPTW instances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Auto,
    Native,
    Benchmark,
}

#[derive(Args, Debug, Clone)]
pub struct InstanceArgs {
    /// Instance file.
    #[arg(long, short, env = "RIDEPOOL_INSTANCE")]
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Auto, env = "RIDEPOOL_FORMAT")]
    format: Format,
    /// Buffer in seconds; re-derives the time windows.
    #[arg(long, env = "RIDEPOOL_DELTA")]
    delta: Option<i64>,
    /// Fleet size: number of vehicles kept (benchmark instances: vehicles
    /// created at the depot).
    #[arg(long, env = "RIDEPOOL_FLEET")]
    fleet: Option<usize>,
    /// Vehicle capacity override.
    #[arg(long, env = "RIDEPOOL_CAPACITY")]
    capacity: Option<i32>,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    #[arg(long, env = "RIDEPOOL_MODE")]
    mode: Option<String>,
    #[arg(long, env = "RIDEPOOL_SEED")]
    seed: Option<u64>,
    /// Wall clock limit in seconds.
    #[arg(long, env = "RIDEPOOL_TIME_LIMIT")]
    time_limit: Option<f64>,
    #[arg(long, env = "RIDEPOOL_WORKERS")]
    workers: Option<usize>,
    /// TOML file with parameter overrides.
    #[arg(long, env = "RIDEPOOL_CONFIG")]
    config: Option<PathBuf>,
    /// Parameter override `key=value`; repeatable. See `ridepool params`.
    #[arg(long = "param", short = 'p', env = "RIDEPOOL_PARAMS", value_delimiter = ';')]
    params: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance and write the solution.
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Solution output path; stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Warm start solution.
        #[arg(long)]
        warm: Option<PathBuf>,
        /// Append the result row to this CSV file.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write search progress as CSV.
        #[arg(long)]
        progress: Option<PathBuf>,
    },
    /// Check a solution against an instance.
    Validate {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, short)]
        solution: PathBuf,
    },
    /// Generate a synthetic instance.
    Generate(commands::GenerateArgs),
    /// Structural metrics of a solution as CSV.
    Stats {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, short)]
        solution: PathBuf,
        /// Also print one row per used route.
        #[arg(long)]
        per_route: bool,
    },
    /// Sweep over buffers, warm-starting each run from the previous one.
    Bench {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Comma separated buffers in seconds.
        #[arg(long, value_delimiter = ',', default_value = "0,60,120")]
        deltas: Vec<i64>,
        /// Directory for per-buffer solutions.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Append the result rows to this CSV file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// List the parameter keys accepted by --param and config files.
    Params,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("RIDEPOOL_LOG", "warn")).init();
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Solve { instance, solver, out, warm, report, progress } => {
            commands::solve(&instance, &solver, out.as_deref(), warm.as_deref(), report.as_deref(), progress.as_deref())
        }
        Command::Validate { instance, solution } => commands::validate(&instance, &solution),
        Command::Generate(args) => commands::generate(&args),
        Command::Stats { instance, solution, per_route } => commands::stats(&instance, &solution, per_route),
        Command::Bench { instance, solver, deltas, out_dir, report } => {
            commands::bench(&instance, &solver, &deltas, out_dir.as_deref(), report.as_deref())
        }
        Command::Params => {
            for (k, d) in config::PARAM_KEYS {
                println!("{k:<24} {d}");
            }
            Ok(true)
        }
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
