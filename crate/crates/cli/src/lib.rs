//! Command-line front end: config loading, the `simulate`, `verify` and
//! `converge` commands, and their output files.
//!
//! Exit status is 0 when every invariant holds, 1 on an invariant failure or
//! a failed run, 2 on a usage or config error.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;
pub use error::{CliError, CliResult};

use output::OutDir;

/// Used when neither `--out`, the environment nor `output.dir` names one.
pub const DEFAULT_OUT_DIR: &str = "levy-galerkin-out";

#[derive(Debug, Parser)]
#[command(name = "levy-galerkin", version, about = "Spectral Galerkin SPDE solver with Levy noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the ensemble and write trajectories.
    Simulate(CommonArgs),
    /// Run the certification and diagnostic suites.
    Verify(CommonArgs),
    /// Picard contraction sweep and strong-order study.
    Converge(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Replaces `ensemble.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replaces `ensemble.paths`.
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long, env = "LEVY_GALERKIN_OUT")]
    pub out: Option<PathBuf>,
    /// `section.key=value`, applied in order after the file.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl CommonArgs {
    pub fn load(&self) -> CliResult<RunConfig> {
        let text = std::fs::read_to_string(&self.config)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", self.config.display())))?;
        let mut overrides = self.overrides.clone();
        if let Some(seed) = self.seed {
            overrides.push(format!("ensemble.seed={seed}"));
        }
        if let Some(paths) = self.paths {
            overrides.push(format!("ensemble.paths={paths}"));
        }
        RunConfig::load(&text, &overrides)
    }

    fn out_dir(&self, cfg: &RunConfig) -> PathBuf {
        self.out
            .clone()
            .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}

type Runner = fn(&RunConfig, &OutDir) -> CliResult<bool>;

/// Runs one command and returns its exit status.
pub fn run(cli: &Cli) -> i32 {
    let (args, command): (&CommonArgs, Runner) = match &cli.command {
        Command::Simulate(a) => (a, commands::simulate),
        Command::Verify(a) => (a, commands::verify),
        Command::Converge(a) => (a, commands::converge),
    };
    let result = args.load().and_then(|cfg| {
        let out = OutDir::create(&args.out_dir(&cfg))?;
        command(&cfg, &out)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}
