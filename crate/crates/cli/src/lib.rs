//! Command-line front end for the ACCA opinion-dynamics engine.
//!
//! Every subcommand reads an optional `key = value` file given by `--config`;
//! flags override file values. Exit codes: 0 success, 1 usage, 2 runtime or
//! I/O failure, 3 verification failure.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::Settings;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "acca", version, about = "Circular opinion dynamics: midpoint rule, bi-modal noise, burst updates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and write its observable series.
    Run(RunArgs),
    /// Run a parameter grid with replicates and write per-cell late-time means.
    Sweep(SweepArgs),
    /// Check the closed form of τ₁ for ideal twisted states.
    VerifyTau(VerifyArgs),
    /// Render a snapshot or sweep table to SVG.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Settings file with `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub n: Option<String>,
    /// path or ring.
    #[arg(long)]
    pub topology: Option<String>,
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub k_mid: Option<String>,
    #[arg(long)]
    pub k_noise: Option<String>,
    #[arg(long)]
    pub steps: Option<String>,
    #[arg(long)]
    pub record_stride: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// uniform or winding.
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub winding: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Comma-separated times at which to store full configurations.
    #[arg(long)]
    pub snapshot_times: Option<String>,
    /// Also write a space-time heatmap of every recorded state.
    #[arg(long)]
    pub heatmap: Option<String>,
    /// Keep only runs whose ring winding number equals this after burn-in.
    #[arg(long, allow_hyphen_values = true)]
    pub condition_winding: Option<String>,
    #[arg(long)]
    pub burn_in: Option<String>,
    #[arg(long)]
    pub max_attempts: Option<String>,
    #[arg(long)]
    pub late_fraction: Option<String>,
}

impl RunArgs {
    fn flags(&self) -> Vec<(&'static str, Option<&String>)> {
        vec![
            ("n", self.n.as_ref()),
            ("topology", self.topology.as_ref()),
            ("epsilon", self.epsilon.as_ref()),
            ("k_mid", self.k_mid.as_ref()),
            ("k_noise", self.k_noise.as_ref()),
            ("steps", self.steps.as_ref()),
            ("record_stride", self.record_stride.as_ref()),
            ("seed", self.seed.as_ref()),
            ("init", self.init.as_ref()),
            ("winding", self.winding.as_ref()),
            ("alpha", self.alpha.as_ref()),
            ("snapshot_times", self.snapshot_times.as_ref()),
            ("heatmap", self.heatmap.as_ref()),
            ("condition_winding", self.condition_winding.as_ref()),
            ("burn_in", self.burn_in.as_ref()),
            ("max_attempts", self.max_attempts.as_ref()),
            ("late_fraction", self.late_fraction.as_ref()),
        ]
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub n: Option<String>,
    /// Comma-separated list of path and ring.
    #[arg(long)]
    pub topologies: Option<String>,
    #[arg(long)]
    pub epsilons: Option<String>,
    #[arg(long)]
    pub k_mids: Option<String>,
    #[arg(long)]
    pub k_noises: Option<String>,
    #[arg(long)]
    pub steps: Option<String>,
    #[arg(long)]
    pub record_stride: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub winding: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub replicates: Option<String>,
    #[arg(long)]
    pub late_fraction: Option<String>,
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    #[arg(long)]
    pub threads: Option<String>,
    #[arg(long)]
    pub heatmaps: Option<String>,
}

impl SweepArgs {
    fn flags(&self) -> Vec<(&'static str, Option<&String>)> {
        vec![
            ("n", self.n.as_ref()),
            ("topologies", self.topologies.as_ref()),
            ("epsilons", self.epsilons.as_ref()),
            ("k_mids", self.k_mids.as_ref()),
            ("k_noises", self.k_noises.as_ref()),
            ("steps", self.steps.as_ref()),
            ("record_stride", self.record_stride.as_ref()),
            ("seed", self.seed.as_ref()),
            ("init", self.init.as_ref()),
            ("winding", self.winding.as_ref()),
            ("alpha", self.alpha.as_ref()),
            ("replicates", self.replicates.as_ref()),
            ("late_fraction", self.late_fraction.as_ref()),
            ("threads", self.threads.as_ref()),
            ("heatmaps", self.heatmaps.as_ref()),
        ]
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Largest |W| checked.
    #[arg(long)]
    pub max_w: Option<String>,
    /// Monte Carlo pairs per W.
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub threads: Option<String>,
    /// Also run the identity checks (true by default).
    #[arg(long)]
    pub suite: Option<String>,
}

impl VerifyArgs {
    fn flags(&self) -> Vec<(&'static str, Option<&String>)> {
        vec![
            ("max_w", self.max_w.as_ref()),
            ("samples", self.samples.as_ref()),
            ("seed", self.seed.as_ref()),
            ("threads", self.threads.as_ref()),
            ("suite", self.suite.as_ref()),
        ]
    }
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// `snapshots.csv` or `sweep.csv`.
    pub input: PathBuf,
    /// Output file for snapshots, output directory for sweeps.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn settings(keys: &'static [&'static str], config: Option<&PathBuf>, flags: Vec<(&'static str, Option<&String>)>) -> Result<Settings, CliError> {
    let mut s = Settings::new(keys);
    if let Some(path) = config {
        s.load(path)?;
    }
    s.override_with(flags)?;
    Ok(s)
}

/// Executes a parsed command, returning its stdout text.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Run(a) => commands::run(&settings(commands::RUN_KEYS, a.config.as_ref(), a.flags())?, &a.out),
        Command::Sweep(a) => commands::run_sweep(&settings(commands::SWEEP_KEYS, a.config.as_ref(), a.flags())?, &a.out),
        Command::VerifyTau(a) => commands::verify_tau(&settings(commands::VERIFY_KEYS, a.config.as_ref(), a.flags())?),
        Command::Render(a) => commands::render(&a.input, a.out.as_deref()),
    }
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(CliError::Verification(out)) => {
            print!("{out}");
            3
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
