//! `qmor`: certify, reduce, simulate and sample parameterized quantum models.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use commands::{Method, SimulateOptions};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "qmor", version, about = "Exact model reduction for parameterized quantum Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Model JSON file
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Built-in model: collective, tfim or random-tfim
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
    /// Number of spins for --builtin
    #[arg(long)]
    n: Option<usize>,
    /// Initial state: site labels (0 1 + -), gs:λ1,λ2,... or a JSON file
    #[arg(long, value_name = "SPEC", allow_hyphen_values = true)]
    state: Option<String>,
    /// Energy window defining the ground manifold for gs: states
    #[arg(long, value_name = "REAL")]
    gs_window: Option<f64>,
    /// Parameter values, k=v,... or a positional list
    #[arg(long, value_name = "VALUES", allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Times: a list a,b,c or start:stop:count
    #[arg(long, value_name = "GRID")]
    times: Option<String>,
    /// Sampling schedule JSON file
    #[arg(long, value_name = "FILE")]
    schedule: Option<PathBuf>,
    /// Span and independence tolerance
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for random sampling times
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (file or directory depending on the command)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the model has a nontrivial invariant subspace
    Certify {
        #[command(flatten)]
        common: Common,
        /// Largest Hilbert-space dimension attempted with dense algebra
        #[arg(long, default_value_t = qmor::burnside::DEFAULT_MAX_DENSE_DIM)]
        max_dense_dim: usize,
    },
    /// Build the reduction map and the reduced model
    Reduce {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Method::Burnside)]
        method: Method,
    },
    /// Propagate and record an observable
    Simulate {
        #[command(flatten)]
        common: Common,
        /// sum-x, sum-y, sum-z or Pauli terms like 0.5*ZZI,XII
        #[arg(long, default_value = "sum-x", allow_hyphen_values = true)]
        observable: String,
        /// Run both models and report the largest deviation
        #[arg(long)]
        compare: bool,
        /// Run only the reduced model
        #[arg(long, conflicts_with = "compare")]
        reduced: bool,
        /// Drop this many trailing columns of the reduction map
        #[arg(long, default_value_t = 0)]
        truncate: usize,
        #[arg(long, value_enum, default_value_t = Method::Burnside)]
        method: Method,
    },
    /// Build a reduction map from time snapshots
    Sample {
        #[command(flatten)]
        common: Common,
    },
    /// Write the model as JSON
    Export {
        #[command(flatten)]
        common: Common,
    },
}

fn config(c: &Common) -> Result<RunConfig> {
    if !(c.tol > 0.0) {
        anyhow::bail!("--tol must be positive");
    }
    let model = config::load_model(c.model.as_deref(), c.builtin.as_deref(), c.n)?;
    let state = c.state.as_deref().map(|s| config::parse_state(s, c.gs_window)).transpose()?;
    let lambda = c.lambda.as_deref().map(|l| config::parse_lambda(l, model.labels())).transpose()?;
    let times = c.times.as_deref().map(config::parse_times).transpose()?;
    if let Some(p) = &c.schedule {
        if !p.is_file() {
            anyhow::bail!("schedule file {} does not exist", p.display());
        }
    }
    Ok(RunConfig {
        model,
        state,
        lambda,
        times,
        schedule: c.schedule.clone(),
        tol: c.tol,
        seed: c.seed,
        out: c.out.clone(),
    })
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Certify { common, max_dense_dim } => commands::certify_cmd(&config(&common)?, max_dense_dim),
        Command::Reduce { common, method } => commands::reduce_cmd(&config(&common)?, method),
        Command::Simulate { common, observable, compare, reduced, truncate, method } => {
            let cfg = config(&common)?;
            let n = cfg.model.n().ok_or_else(|| anyhow::anyhow!("simulate needs a Pauli-sum model"))?;
            let obs = config::parse_observable(&observable, n)?;
            commands::simulate_cmd(
                &cfg,
                &SimulateOptions { observable: &obs, compare, reduced_only: reduced, truncate, method },
            )
        }
        Command::Sample { common } => commands::sample_cmd(&config(&common)?),
        Command::Export { common } => commands::export_cmd(&config(&common)?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
