//! Experiment runner for the `fracdrift` binary: config files, subcommands,
//! CSV/SVG output and run manifests.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

pub use commands::{Artifact, Command, Outcome};
pub use config::{DriftChoice, ExperimentConfig};
pub use error::{CliError, ConfigError};
pub use manifest::{OutputFile, RunManifest};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "FBM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fracdrift", version, about = "Drifted fractional Brownian motion experiments")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Config file (`key = value` lines); a run manifest also works.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo replicates; overrides the config.
    #[arg(long)]
    pub reps: Option<u64>,
    /// Only print errors.
    #[arg(long)]
    pub quiet: bool,
}

/// Config with command-line overrides applied.
pub fn effective_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(reps) = cli.reps {
        cfg.n_reps = reps;
    }
    // overrides go through the same validation as file values
    Ok(ExperimentConfig::parse(&cfg.to_text())?)
}

/// Runs `command` and writes its files and `manifest.txt` under `cfg.output`.
pub fn execute(command: Command, cfg: &ExperimentConfig) -> Result<(RunManifest, Vec<String>), CliError> {
    let started = chrono::Utc::now();
    let outcome = commands::run(command, cfg)?;
    let dir = &cfg.output;
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let mut files = Vec::with_capacity(outcome.artifacts.len());
    for a in &outcome.artifacts {
        manifest::write_atomic(&dir.join(&a.name), a.contents.as_bytes())?;
        files.push(OutputFile {
            name: a.name.clone(),
            rows: a.rows,
        });
    }
    let manifest = RunManifest {
        tool: manifest::tool_version(),
        command: command.name().to_string(),
        started,
        finished: chrono::Utc::now(),
        config: cfg.clone(),
        files,
    };
    manifest.write(dir)?;
    Ok((manifest, outcome.summary))
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure {threads} threads: {e}")))
}

/// Parses arguments, runs, and returns the process exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let level = if cli.quiet { "error" } else { "info" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
    let result = configure_threads()
        .and_then(|_| effective_config(&cli))
        .and_then(|cfg| execute(cli.command, &cfg).map(|r| (cfg, r)));
    match result {
        Ok((cfg, (manifest, summary))) => {
            if !cli.quiet {
                for line in summary {
                    println!("{line}");
                }
                println!(
                    "wrote {} file(s) and {} to {}",
                    manifest.files.len(),
                    manifest::MANIFEST_NAME,
                    cfg.output.display()
                );
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
