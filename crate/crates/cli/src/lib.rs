//! Experiment runner for the `weakprobe` simulator: basis scatter, fidelity
//! curves, tomography and single-trajectory dumps, emitted as CSV or JSON.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::Path;

pub use config::{Experiment, ExperimentConfig, StateSpec};
pub use output::OutputFile;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(weakprobe_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<weakprobe_core::Error> for CliError {
    fn from(e: weakprobe_core::Error) -> Self {
        match e {
            weakprobe_core::Error::Config(msg) => CliError::Config(msg),
            e if e.is_numerical() => CliError::Numerical(e),
            e => CliError::Config(e.to_string()),
        }
    }
}

/// Runs the configured experiment on a pool of `cfg.workers` threads and
/// returns the rendered files.
pub fn render(cfg: &ExperimentConfig) -> Result<Vec<OutputFile>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    pool.install(|| match cfg.experiment {
        Experiment::Fig2 => Ok(output::fig2_files(cfg, &experiments::run_fig2(cfg)?)),
        Experiment::Fig3 => Ok(vec![output::fig3_file(cfg, &experiments::run_fig3(cfg)?)]),
        Experiment::Tomo => Ok(vec![output::tomo_file(cfg, &experiments::run_tomo(cfg)?)]),
        Experiment::Traj => Ok(vec![output::traj_file(cfg, &experiments::run_traj(cfg)?)]),
    })
}

/// Renders the experiment and writes every file below `cfg.output`.
pub fn execute(cfg: &ExperimentConfig) -> Result<Vec<std::path::PathBuf>, CliError> {
    let files = render(cfg)?;
    write_files(&cfg.output, &files)
}

pub fn write_files(dir: &Path, files: &[OutputFile]) -> Result<Vec<std::path::PathBuf>, CliError> {
    std::fs::create_dir_all(dir)?;
    files
        .iter()
        .map(|f| {
            let path = dir.join(&f.name);
            std::fs::write(&path, &f.contents)?;
            Ok(path)
        })
        .collect()
}
