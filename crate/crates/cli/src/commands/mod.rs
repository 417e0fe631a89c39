mod choi;
mod discriminate;
mod error_curve;
mod exponentiate;
mod qpca;

use std::path::{Path, PathBuf};

use qpca_core::qpca::QpeConfig;

use crate::config::{BackendArg, ExperimentConfig, QpeParams};
use crate::error::{missing, CliError};
use crate::output::Artifact;

pub use choi::run as choi;
pub use discriminate::run as discriminate;
pub use error_curve::run as error_curve;
pub use exponentiate::run as exponentiate;
pub use qpca::run as qpca;

pub struct Context {
    pub seed: u64,
}

/// What a subcommand hands back: its files, the resolved configuration and
/// a one-line summary for the terminal.
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub snapshot: ExperimentConfig,
    pub summary: String,
}

pub(crate) fn require_file(flag: &str, path: &Option<PathBuf>) -> Result<PathBuf, CliError> {
    let path = path.clone().ok_or_else(|| missing(flag))?;
    check_exists(&path)?;
    Ok(path)
}

pub(crate) fn check_exists(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Input {
            path: path.into(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
        })
    }
}

/// Phase-estimation settings with defaults filled in, plus their snapshot.
pub(crate) fn qpe_config(p: &QpeParams, default_bits: u32) -> Result<(QpeConfig, QpeParams), CliError> {
    let defaults = QpeConfig::default();
    let backend = p.backend.unwrap_or(BackendArg::Exact);
    let cfg = QpeConfig {
        ancilla_bits: p.bits.unwrap_or(default_bits),
        base_time: p.base_time.unwrap_or(defaults.base_time),
        backend: backend.into(),
        swap_steps_per_unit_time: p.steps_per_unit_time.unwrap_or(defaults.swap_steps_per_unit_time),
    };
    cfg.validate()?;
    let resolved = QpeParams {
        bits: Some(cfg.ancilla_bits),
        base_time: Some(cfg.base_time),
        backend: Some(backend),
        steps_per_unit_time: Some(cfg.swap_steps_per_unit_time),
    };
    Ok((cfg, resolved))
}

pub(crate) fn positive(flag: &str, value: u64) -> Result<u64, CliError> {
    if value == 0 {
        return Err(CliError::Usage(format!("--{flag} must be at least 1")));
    }
    Ok(value)
}
