//! Network alignment by joint optimal transport and embedding learning.
//!
//! Subcommands:
//! - `align`: train on a dataset described by a TOML config and persist
//!   the plan, encoder, embeddings, history, metrics and manifest;
//! - `evaluate`: rank a stored plan checkpoint against an anchor file;
//! - `perturb`: inject deterministic structural or attribute noise into a
//!   dataset file.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data or checkpoint
//! error, 4 numerical failure.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use otalign::graph::NoiseKind;

#[derive(Parser)]
#[command(name = "otalign", version, about = "Optimal-transport network alignment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train an alignment from a config file.
    Align {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's mode: full, fixed-cost, collapse, or
        /// noise:<structural|attribute>:<pct>.
        #[arg(long)]
        mode: Option<String>,
        /// Worker threads for parallel kernels (walk features).
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Compute Hits@K and MRR for a stored plan.
    Evaluate {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        anchors: PathBuf,
        /// Comma-separated list of K values, e.g. 1,10.
        #[arg(long, default_value = "1,10", value_delimiter = ',')]
        k: Vec<usize>,
        /// Also report tie-pessimistic diagnostics.
        #[arg(long)]
        pessimistic: bool,
        /// Where to write the metrics record (default: <plan>.metrics.txt).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Flip a deterministic fraction of adjacency or attribute entries.
    Perturb {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        kind: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Node count override for edge lists whose trailing nodes are isolated.
        #[arg(long)]
        nodes: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Align { config, mode, threads } => {
            if threads == 0 {
                eprintln!("error [stage=config]: --threads must be at least 1");
                return ExitCode::from(2);
            }
            if let Err(e) =
                rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()
            {
                eprintln!("error [stage=config]: thread pool: {e}");
                return ExitCode::from(2);
            }
            commands::align::run(&config, mode.as_deref()).map(|_| ())
        }
        Command::Evaluate { plan, anchors, k, pessimistic, out } => {
            commands::evaluate::run(&plan, &anchors, &k, pessimistic, out.as_deref())
        }
        Command::Perturb { input, kind, p, seed, out, nodes } => {
            match kind.parse::<NoiseKind>() {
                Ok(kind) => commands::perturb::run(&input, kind, p, seed, &out, nodes),
                Err(e) => {
                    eprintln!("error [stage=config]: {e}");
                    return ExitCode::from(2);
                }
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(staged) => {
            eprintln!("{staged}");
            ExitCode::from(staged.exit_code() as u8)
        }
    }
}
