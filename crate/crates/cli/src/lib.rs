//! Command-line front end: scenario files, sweeps, figure presets and the acceptance checks.

pub mod checks;
pub mod config;
pub mod eval;
pub mod figures;
pub mod table;

pub use checks::{run_check, run_checks, CheckOutcome, Tolerances, CHECK_NAMES};
pub use config::{parse_scenario, Output, ScenarioConfig};
pub use eval::{evaluate_point, run_eval, run_sweep, EvalOutput};
pub use figures::{figure, FIGURE_NAMES};
pub use table::{Cell, Table};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config error at `{path}`: {message}")]
    Semantic { path: String, message: String },
    #[error("sweep grid exceeds {limit} points")]
    Capacity { limit: usize },
    #[error("unknown figure `{0}` (expected one of fig1 … fig8)")]
    UnknownFigure(String),
    #[error("unknown tolerance profile `{0}` (expected strict or corrupt)")]
    UnknownProfile(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("kernel: {0}")]
    Kernel(#[from] udw_kernel::KernelError),
    #[error("state: {0}")]
    State(#[from] udw_state::StateError),
    #[error("measures: {0}")]
    Measure(#[from] udw_measures::MeasureError),
    #[error("sabotage: {0}")]
    Sabotage(#[from] udw_sabotage::SabotageError),
    #[error("toy model: {0}")]
    Toy(#[from] udw_toybox::ToyError),
    #[error("grid point {index}: {source}")]
    AtPoint { index: usize, source: Box<CliError> },
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    /// 2 for bad input, 1 for failures while computing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_)
            | CliError::Semantic { .. }
            | CliError::Capacity { .. }
            | CliError::UnknownFigure(_)
            | CliError::UnknownProfile(_)
            | CliError::Io(_) => 2,
            CliError::AtPoint { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}

/// Runs `f` on a pool with `threads` workers, or on the global pool.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CliError::Io(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}
