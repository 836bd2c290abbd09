//! Batch command-line front end.

pub mod config;
pub mod expr;
pub mod metrics;
pub mod registry;
pub mod run;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::moc::{error_bound, ErrorBoundInputs};

#[derive(Debug, Parser)]
#[command(name = "quasilin", version, about = "Method-of-characteristics experiments for quasilinear transport PDEs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the configured method and write CSV outputs.
    Run {
        config: PathBuf,
        /// Output directory (overrides `output_dir` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run characteristics and both method-of-lines variants side by side.
    Compare {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the a-priori error bounds for pointwise problems.
    Bound {
        #[arg(long = "t-hat")]
        t_hat: f64,
        #[arg(long = "f-hat")]
        f_hat: f64,
        #[arg(long)]
        dx: f64,
        #[arg(long)]
        dw: f64,
        #[arg(long)]
        dt: f64,
    },
    /// Run every `*.cfg` file in a directory.
    Sweep {
        dir: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

/// Executes a parsed command line and returns the process exit code.
pub fn dispatch(cli: Cli) -> i32 {
    match cli.command {
        Command::Run { config, out } => run::run_file(&config, out.as_deref()),
        Command::Compare { config, out } => run::compare_file(&config, out.as_deref()),
        Command::Bound { t_hat, f_hat, dx, dw, dt } => {
            let (node, state) = error_bound(&ErrorBoundInputs { t_hat, f_hat, dx, dw, dt });
            println!("node_bound,{node}");
            println!("state_bound,{state}");
            run::EXIT_OK
        }
        Command::Sweep { dir, out } => run::sweep(&dir, &out),
    }
}
