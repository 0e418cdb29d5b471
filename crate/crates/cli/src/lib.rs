//! Experiment driver for the `fwbq` quadrature library.
//!
//! Four experiments are available: `convergence` (MMD² against `n` for each
//! method), `posterior-demo` (estimates and 95% interval coverage on a kernel
//! expansion with known integral), `rff` (random Fourier features against the
//! exact kernel) and `model-select` (evidence-based model probabilities for
//! kinetics data). See [`output`] for the table layouts.

pub mod config;
pub mod experiments;
pub mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};

pub use config::{log_grid, Args, DensitySpec, Experiment, ExperimentConfig, Format};
pub use experiments::{run_convergence, run_model_select, run_posterior_demo, run_rff, ModelSelectOutput};
pub use output::{read_rows, sort_rows, write_rows, ModelSelectRow, ResultRow};

/// Exit status for configuration and I/O problems.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for numerical failures.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("numerical failure: {0}")]
    Numerical(fwbq::Error),
}

impl From<fwbq::Error> for CliError {
    fn from(e: fwbq::Error) -> Self {
        use fwbq::Error as E;
        match e {
            E::InvalidInput(_) | E::DimensionMismatch { .. } | E::LengthMismatch { .. } | E::Unsupported(_) => {
                CliError::Config(e.to_string())
            }
            e => CliError::Numerical(e),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }
}

/// Runs the configured experiment and writes its table to `--out` or stdout.
pub fn run(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    run_to(cfg, sink)
}

/// [`run`] with an explicit writer.
pub fn run_to<W: Write>(cfg: &ExperimentConfig, out: W) -> Result<(), CliError> {
    match cfg.experiment {
        Experiment::Convergence => write_rows(&run_convergence(cfg)?, cfg.format, out),
        Experiment::PosteriorDemo => write_rows(&run_posterior_demo(cfg)?, cfg.format, out),
        Experiment::Rff => write_rows(&run_rff(cfg)?, cfg.format, out),
        Experiment::ModelSelect => write_rows(&run_model_select(cfg)?.rows, cfg.format, out),
    }
}
