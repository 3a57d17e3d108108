//! Configuration, orchestration and serialization for the `loschmidt` binary.

pub mod config;
pub mod output;
pub mod run;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use config::{FieldError, RunConfig, SweepConfig};
use output::{Format, Outputs};
use run::Options;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", list(.0))]
    Validation(Vec<FieldError>),
    #[error("{context}: {source}")]
    Numerical {
        context: &'static str,
        source: loschmidt::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("worker pool: {0}")]
    Worker(String),
}

fn list(errors: &[FieldError]) -> String {
    errors.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n")
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical failures, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical {
                source: loschmidt::Error::InvalidParameter { .. },
                ..
            } => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io { .. } | CliError::Worker(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Fidelity,
    Classical,
    Floquet,
    OracleCheck,
    Sweep,
}

fn read_config(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| {
        CliError::Validation(vec![FieldError {
            path: path.display().to_string(),
            message: format!("cannot read config: {e}"),
        }])
    })
}

/// Computes a command's outputs from configuration text.
pub fn compute(command: Command, text: &str, opts: &Options) -> Result<Outputs, CliError> {
    if command == Command::Sweep {
        let sweep = SweepConfig::from_text(text).map_err(CliError::Validation)?;
        return run::run_sweep(&sweep, opts);
    }
    let cfg = RunConfig::from_text(text).map_err(CliError::Validation)?;
    match command {
        Command::Fidelity => run::run_fidelity(&cfg, opts),
        Command::Classical => run::run_classical(&cfg, opts),
        Command::Floquet => run::run_floquet(&cfg, opts),
        Command::OracleCheck => run::run_oracle_check(&cfg, opts),
        Command::Sweep => unreachable!(),
    }
}

/// Reads the config, runs the command and writes its files into `out`.
pub fn execute(
    command: Command,
    config: Option<&Path>,
    out: &Path,
    format: Format,
    opts: &Options,
) -> Result<Vec<PathBuf>, CliError> {
    let text = match config {
        Some(path) => read_config(path)?,
        None => String::new(),
    };
    let outputs = compute(command, &text, opts)?;
    outputs.write(out, format).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })
}
