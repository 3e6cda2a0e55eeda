//! indsys: batch driver for the two-phase production and transport optimizer.
//!
//! Subcommands:
//! - validate   check a dataset and print its consistency report
//! - gen        write a synthetic dataset
//! - phase1     evolutionary search for a production assignment
//! - phase2     transport network, batching and link selection for an assignment
//! - optimize   phase1 followed by phase2
//! - report     render saved KPI reports
//!
//! Exit codes: 0 success, 2 validation failure (including unreadable inputs),
//! 3 infeasible or disconnected, 4 usage error, 1 output could not be written.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use indsys::drago::Packer;
use indsys::kpi::ReportFormat;
use indsys::model::SourcingMode;

#[derive(Parser, Debug)]
#[command(name = "indsys", version, about = "Two-phase production and transport optimizer")]
struct Cli {
    /// Worker threads for candidate evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load a dataset and report consistency findings.
    Validate {
        #[arg(long)]
        dataset: PathBuf,
        /// Also write the report as JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "table")]
        format: ReportFormat,
    },
    /// Generate a synthetic dataset.
    Gen(GenArgs),
    /// Run the evolutionary assignment search.
    Phase1 {
        #[command(flatten)]
        ea: EaArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan transport for a saved assignment.
    Phase2 {
        #[arg(long)]
        dataset: PathBuf,
        /// Solution file written by `phase1` or `optimize`.
        #[arg(long)]
        assignment: PathBuf,
        #[command(flatten)]
        transport: TransportArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Phase I followed by Phase II.
    Optimize {
        #[command(flatten)]
        ea: EaArgs,
        #[command(flatten)]
        transport: TransportArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render one or more saved KPI reports; several are shown side by side.
    Report {
        #[arg(long = "input", required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value = "table")]
        format: ReportFormat,
    },
}

#[derive(Args, Debug, Clone)]
struct GenArgs {
    /// `default` for the full-size case study, `toy` for a small instance.
    #[arg(long, default_value = "default")]
    profile: String,
    /// Part count of the toy profile.
    #[arg(long, default_value_t = 5)]
    parts: usize,
    /// Unit count of the toy profile.
    #[arg(long, default_value_t = 5)]
    units: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct EaArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value = "single")]
    sourcing: SourcingMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    pop_size: usize,
    #[arg(long, default_value_t = 200)]
    generations: usize,
    #[arg(long, default_value_t = 3)]
    tournament: usize,
    #[arg(long, default_value_t = 0.8)]
    pc: f64,
    #[arg(long, default_value_t = 0.1)]
    pm: f64,
    /// Parallel final-assembly units for the final product.
    #[arg(long, default_value_t = 1)]
    fal_count: usize,
}

#[derive(Args, Debug, Clone)]
struct TransportArgs {
    /// Number of final products.
    #[arg(long, default_value_t = 40)]
    products: u64,
    /// Hours between two completed final products.
    #[arg(long, default_value_t = 24.0)]
    takt_h: f64,
    /// co2, duration, distance, cost, tradeoff, or all four single criteria.
    #[arg(long, default_value = "co2")]
    criterion: String,
    /// Trade-off weights, e.g. `duration=0.5,co2=0.5`.
    #[arg(long)]
    weights: Option<String>,
    #[arg(long, default_value = "grasp")]
    packer: Packer,
    /// Choose whole routes per flow instead of one incoming link at a time.
    #[arg(long)]
    route_exact: bool,
    /// Seed of the mixed-batching search; defaults to the run seed.
    #[arg(long)]
    packing_seed: Option<u64>,
    #[arg(long, default_value = "table")]
    format: ReportFormat,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot size the worker pool: {e}");
            return ExitCode::from(4);
        }
    }
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
