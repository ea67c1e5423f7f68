//! Experiment configs, the sweep runner, and the files it leaves behind.
//!
//! A run writes `results.csv` (or `results_ghz{n}.csv` per size for a GHZ
//! family) plus one checkpoint per sweep value for the best restart.

mod checkpoint;
mod config;
mod curve;
mod runner;

use std::fmt;
use std::path::Path;

pub use checkpoint::{evaluate_checkpoint, format_checkpoint, load_checkpoint, parse_checkpoint, write_checkpoint};
pub use config::{
    parse_config, validate_config, Diagnostic, ExperimentConfig, RunPlan, Sweep, SweepParameter,
    DEFAULT_RESTARTS,
};
pub use curve::{default_curve_path, emit_curve, read_curve, CurvePoint};
pub use runner::{resolve_workers, run_experiment, write_rows, GroupResult, RunRow, RunSummary, CSV_HEADER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Clone, Debug, PartialEq)]
pub enum CliError {
    Config(Vec<Diagnostic>),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub(crate) fn io(path: &Path, e: impl fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(diags) => {
                for (i, d) in diags.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{d}")?;
                }
                Ok(())
            }
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(vec![Diagnostic::general(format!("{}: {e}", path.display()))])
    })?;
    parse_config(&text).map_err(CliError::Config)
}
