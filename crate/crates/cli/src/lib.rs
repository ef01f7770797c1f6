//! Driver for trajectory runs, parameter sweeps and the verification suite.

pub mod config;
pub mod run;
pub mod verify;

use std::io::Write;
use std::path::Path;

use clap::Parser;
use thiserror::Error;

use config::{Cli, ConfigError, Format, Mode, RunConfig};
use run::RunError;
use verify::VerifyOptions;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Run(RunError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("{failed} verification check(s) failed")]
    Verify { failed: usize },
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(c) => CliError::Config(c),
            other => CliError::Run(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Run(RunError::SweepPoint { source, .. }) if matches!(**source, RunError::Config(_)) => {
                EXIT_CONFIG
            }
            CliError::Run(_) => EXIT_NUMERICAL,
            CliError::Verify { .. } => EXIT_VERIFY,
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Executes a resolved configuration and writes its output.
pub fn execute(config: &RunConfig, options: VerifyOptions) -> Result<(), CliError> {
    let out = config.output.as_deref();
    match config.mode {
        Mode::Trajectory => {
            let table = run::run_trajectory(config)?;
            let text = match config.format {
                Format::Csv => run::trajectory_csv(&table),
                Format::Json => run::to_json(&table),
            };
            emit(out, &text)
        }
        Mode::Sweep => {
            let table = run::run_sweep(config)?;
            let text = match config.format {
                Format::Csv => run::sweep_csv(&table),
                Format::Json => run::to_json(&table),
            };
            emit(out, &text)
        }
        Mode::Verify => {
            let checks = verify::run_verify(config, options);
            let text = match config.format {
                Format::Csv => checks.iter().map(|c| c.line() + "\n").collect(),
                Format::Json => run::to_json(&checks),
            };
            emit(out, &text)?;
            match checks.iter().filter(|c| !c.passed).count() {
                0 => Ok(()),
                failed => Err(CliError::Verify { failed }),
            }
        }
    }
}

/// Parses arguments, runs, reports errors on stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = RunConfig::resolve(&cli)
        .map_err(CliError::from)
        .and_then(|cfg| execute(&cfg, VerifyOptions::default()));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("horizon-spin: {e}");
            e.exit_code()
        }
    }
}
