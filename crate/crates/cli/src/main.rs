//! `paretoshop`: batch solving, front comparison, exact enumeration,
//! instance conversion and generation, and the HTTP service.
//!
//! Exit codes: 0 success, 2 usage error, 3 unreadable or malformed input,
//! 4 solver precondition violated, 5 enumeration refused.

mod commands;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use paretoshop_core::solvers::{CrossoverKind, Method, MutationKind, Neighborhood};
use paretoshop_core::ObjectiveSpec;

#[derive(Debug, Parser)]
#[command(
    name = "paretoshop",
    version,
    about = "Multi-objective job-shop and flow-shop scheduling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Approximate the Pareto front of an instance and print its vectors.
    Solve(SolveArgs),
    /// Print the pairwise coverage matrix of saved runs.
    Compare(CompareArgs),
    /// Compute the exact front by enumerating every sequence.
    Enumerate(EnumerateArgs),
    /// Convert an instance between .jss, .fsp and .json.
    Convert(ConvertArgs),
    /// Write a random job-shop instance as extended JSON.
    Generate(GenerateArgs),
    /// Run the HTTP service over a store directory.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "moea")]
    method: Method,
    #[arg(long, default_value_t = 2000)]
    budget: u64,
    /// Comma-separated, in vector order: cmax, csum, tmax, u.
    #[arg(long)]
    objectives: ObjectiveSpec,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Persist the run record into this store.
    #[arg(long)]
    store: Option<PathBuf>,
    /// Write the front to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the full run record to this file.
    #[arg(long)]
    record: Option<PathBuf>,
    #[command(flatten)]
    params: MethodParams,
}

#[derive(Debug, Args)]
struct MethodParams {
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    crossover: Option<CrossoverKind>,
    #[arg(long)]
    crossover_probability: Option<f64>,
    #[arg(long)]
    mutation: Option<MutationKind>,
    #[arg(long)]
    mutation_probability: Option<f64>,
    #[arg(long)]
    elitism: Option<f64>,
    /// adjacent_swap, general_swap or shift.
    #[arg(long)]
    neighborhood: Option<Neighborhood>,
    #[arg(long)]
    climbers: Option<usize>,
    #[arg(long)]
    weights: Option<usize>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    cooling: Option<f64>,
    #[arg(long)]
    chain_length: Option<usize>,
    #[arg(long)]
    archive_capacity: Option<usize>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Run record files (from `solve --record` or a store's runs/ directory).
    #[arg(required = true, num_args = 2..)]
    runs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    objectives: ObjectiveSpec,
    /// Refuse instances with more sequences than this.
    #[arg(long, default_value_t = 100_000)]
    limit: u128,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Overwrite an existing output file.
    #[arg(long)]
    force: bool,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    jobs: usize,
    #[arg(long)]
    machines: usize,
    #[arg(long, default_value_t = 1)]
    min_duration: u64,
    #[arg(long, default_value_t = 99)]
    max_duration: u64,
    /// Due date = ceil(factor × total work); omitted means no due dates.
    #[arg(long)]
    due_factor: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    force: bool,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, env = "PARETOSHOP_STORE", default_value = "data")]
    store: PathBuf,
    #[arg(long, env = "PARETOSHOP_LISTEN", default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Concurrent solver runs; defaults to the number of cores.
    #[arg(long, env = "PARETOSHOP_WORKERS")]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(match cli.command {
        Command::Serve(_) => "info",
        _ => "warn",
    }))
    .init();
    let result = match cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Compare(a) => commands::compare(a),
        Command::Enumerate(a) => commands::enumerate(a),
        Command::Convert(a) => commands::convert(a),
        Command::Generate(a) => commands::generate(a),
        Command::Serve(a) => commands::serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
