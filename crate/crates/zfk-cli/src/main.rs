//! Command-line front end: parameter sweeps, figure-data reproduction,
//! PDE validation runs and the acceptance-criteria report.
//!
//! Every command writes plain CSV (LF, UTF-8, shortest round-trip floats)
//! plus a `manifest.json` capturing the fully materialised parameters, so a
//! run can be reproduced byte for byte.

mod commands;
mod config;
mod manifest;
mod out;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "zfk",
    version,
    about = "Travelling-wave computations for the ZFK reaction-diffusion equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct CommonArgs {
    /// Output directory for CSV files and the manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweep rows.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Config file with `key = value` lines (flags take precedence).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Gap tolerance for the speed root-find.
    #[arg(long)]
    tol: Option<f64>,
    /// Matching-section depth Theta.
    #[arg(long)]
    theta: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal wave speed cbar(eps) over a list of eps values.
    Speed {
        /// Comma-separated eps values, e.g. `0.02,0.01,0.005`.
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Wave profile (z, theta, eta, segment) for one (c, eps).
    Profile {
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        eps: f64,
        /// z-budget for the slow tail.
        #[arg(long, default_value_t = 30.0)]
        zspan: f64,
        /// Build the profile even when the gap test reports no connection.
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Phase-portrait data: manifolds, separatrix, slow manifold, field grid.
    Portrait {
        #[arg(long, default_value_t = 1.5)]
        c: f64,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print the slow-manifold series and tabulate it on a grid.
    Series {
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        /// Truncation order, 1..=8.
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evolve the PDE from a computed profile and fit the front speed.
    Pde {
        /// Wave speed; defaults to the computed cbar(eps).
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        eps: f64,
        /// Accept eps below the validated range 0.02..=0.1.
        #[arg(long)]
        force: bool,
        /// Write field snapshot CSVs at the output times.
        #[arg(long)]
        snapshots: bool,
        /// Exploratory mode: start from a sharp step at this x instead of a
        /// travelling profile, and just report the measured speed.
        #[arg(long)]
        step: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the acceptance-criteria suite and print a pass/fail report.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Speed { eps, common } => commands::speed::run(&eps, &common),
        Command::Profile {
            c,
            eps,
            zspan,
            force,
            common,
        } => commands::profile::run(c, eps, zspan, force, &common),
        Command::Portrait { c, eps, common } => commands::portrait::run(c, eps, &common),
        Command::Series { c, k, common } => commands::series::run(c, k, &common),
        Command::Pde {
            c,
            eps,
            force,
            snapshots,
            step,
            common,
        } => commands::pde::run(c, eps, force, snapshots, step, &common),
        Command::Verify { common } => commands::verify::run(&common),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
