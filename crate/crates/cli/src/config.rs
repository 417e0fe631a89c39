//! Experiment configuration: a JSON file whose values command-line flags
//! override. A run manifest is also accepted, in which case its recorded
//! configuration is used.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const MAX_DIMENSION_CAP: usize = 4096;
pub const DIM_CAP_ENV: &str = "QPCA_DIM_CAP";

macro_rules! overlay {
    ($t:ident { $($f:ident),* $(,)? }) => {
        impl $t {
            /// Fields set here win; unset fields fall back to `base`.
            pub fn overlay(self, base: Self) -> Self {
                Self { $($f: self.$f.or(base.$f)),* }
            }
        }
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum BackendArg {
    Exact,
    SwapChannel,
}

impl From<BackendArg> for qpca_core::qpca::Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Exact => Self::Exact,
            BackendArg::SwapChannel => Self::SwapChannel,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Register {
    /// Second register, `d × d`: directions in data space.
    Covariance,
    /// First register, `m × m`: the Gram matrix.
    Gram,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Qpe,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct ExponentiateParams {
    /// Density matrix driving the evolution
    #[arg(long)]
    pub rho: Option<PathBuf>,
    /// Density matrix being evolved
    #[arg(long)]
    pub sigma: Option<PathBuf>,
    /// Total evolution time
    #[arg(long)]
    pub time: Option<f64>,
    /// Number of partial-swap steps
    #[arg(long, conflicts_with = "epsilon")]
    pub steps: Option<usize>,
    /// Target accuracy; picks `n = ceil(2t²/ε)` steps
    #[arg(long)]
    pub epsilon: Option<f64>,
}
overlay!(ExponentiateParams { rho, sigma, time, steps, epsilon });

#[derive(Clone, Debug, Default, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct ErrorCurveParams {
    #[arg(long)]
    pub rho: Option<PathBuf>,
    #[arg(long)]
    pub sigma: Option<PathBuf>,
    #[arg(long)]
    pub time: Option<f64>,
    /// Strictly increasing step counts, comma separated
    #[arg(long, value_delimiter = ',')]
    pub steps: Option<Vec<usize>>,
    /// Write measured wall time per row; `false` writes zeros so reruns are byte-identical
    #[arg(long)]
    pub record_timing: Option<bool>,
}
overlay!(ErrorCurveParams { rho, sigma, time, steps, record_timing });

#[derive(Clone, Debug, Default, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct QpeParams {
    /// Ancilla qubits
    #[arg(long)]
    pub bits: Option<u32>,
    /// Evolution time of the lowest controlled power
    #[arg(long)]
    pub base_time: Option<f64>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    /// Partial-swap steps per unit evolution time (swap_channel backend)
    #[arg(long)]
    pub steps_per_unit_time: Option<usize>,
}
overlay!(QpeParams { bits, base_time, backend, steps_per_unit_time });

#[derive(Clone, Debug, Default, Serialize, Deserialize, Args)]
#[serde(from = "QpcaFile")]
pub struct QpcaParams {
    /// Density matrix to analyse
    #[arg(long, conflicts_with = "dataset")]
    pub rho: Option<PathBuf>,
    /// Dataset to encode and analyse
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Register of the dataset encoding to analyse
    #[arg(long, value_enum)]
    pub register: Option<Register>,
    #[command(flatten)]
    #[serde(flatten)]
    pub qpe: QpeParams,
    /// Number of components to extract
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Sampled readouts for the frequency column
    #[arg(long, short = 'm')]
    pub trials: Option<u64>,
}

impl QpcaParams {
    pub fn overlay(self, base: Self) -> Self {
        Self {
            rho: self.rho.or(base.rho),
            dataset: self.dataset.or(base.dataset),
            register: self.register.or(base.register),
            qpe: self.qpe.overlay(base.qpe),
            top_k: self.top_k.or(base.top_k),
            trials: self.trials.or(base.trials),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, Args)]
#[serde(from = "DiscriminateFile")]
pub struct DiscriminateParams {
    /// Dataset whose labels form exactly two groups
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Pure state to assign
    #[arg(long)]
    pub chi: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[command(flatten)]
    #[serde(flatten)]
    pub qpe: QpeParams,
    /// Independent assignments for the empirical frequencies
    #[arg(long)]
    pub trials: Option<u64>,
}

impl DiscriminateParams {
    pub fn overlay(self, base: Self) -> Self {
        Self {
            dataset: self.dataset.or(base.dataset),
            chi: self.chi.or(base.chi),
            mode: self.mode.or(base.mode),
            qpe: self.qpe.overlay(base.qpe),
            trials: self.trials.or(base.trials),
        }
    }
}

// Flattened fields escape `deny_unknown_fields`, so the sections that embed
// `QpeParams` are read through these flat mirrors.
#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct QpcaFile {
    rho: Option<PathBuf>,
    dataset: Option<PathBuf>,
    register: Option<Register>,
    bits: Option<u32>,
    base_time: Option<f64>,
    backend: Option<BackendArg>,
    steps_per_unit_time: Option<usize>,
    top_k: Option<usize>,
    trials: Option<u64>,
}

impl From<QpcaFile> for QpcaParams {
    fn from(f: QpcaFile) -> Self {
        Self {
            rho: f.rho,
            dataset: f.dataset,
            register: f.register,
            qpe: QpeParams {
                bits: f.bits,
                base_time: f.base_time,
                backend: f.backend,
                steps_per_unit_time: f.steps_per_unit_time,
            },
            top_k: f.top_k,
            trials: f.trials,
        }
    }
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct DiscriminateFile {
    dataset: Option<PathBuf>,
    chi: Option<PathBuf>,
    mode: Option<Mode>,
    bits: Option<u32>,
    base_time: Option<f64>,
    backend: Option<BackendArg>,
    steps_per_unit_time: Option<usize>,
    trials: Option<u64>,
}

impl From<DiscriminateFile> for DiscriminateParams {
    fn from(f: DiscriminateFile) -> Self {
        Self {
            dataset: f.dataset,
            chi: f.chi,
            mode: f.mode,
            qpe: QpeParams {
                bits: f.bits,
                base_time: f.base_time,
                backend: f.backend,
                steps_per_unit_time: f.steps_per_unit_time,
            },
            trials: f.trials,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct ChoiParams {
    /// Channel as `{"dim": d, "kraus": [matrix, ...]}`
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long)]
    pub bits: Option<u32>,
    #[arg(long)]
    pub base_time: Option<f64>,
    #[arg(long)]
    pub top_k: Option<usize>,
}
overlay!(ChoiParams { channel, bits, base_time, top_k });

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub dimension_cap: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub exponentiate: ExponentiateParams,
    pub error_curve: ErrorCurveParams,
    pub qpca: QpcaParams,
    pub discriminate: DiscriminateParams,
    pub choi: ChoiParams,
}

#[derive(Deserialize)]
struct ManifestConfig {
    config: ExperimentConfig,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Input { path: path.into(), source })?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let parsed = if value.get("artifacts").is_some() {
            serde_json::from_value::<ManifestConfig>(value).map(|m| m.config)
        } else {
            serde_json::from_value(value)
        };
        parsed.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Cap from the config, overridden by the environment.
    pub fn resolve_dimension_cap(&self) -> Result<usize, CliError> {
        let cap = match std::env::var(DIM_CAP_ENV) {
            Ok(text) => text
                .trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("{DIM_CAP_ENV}={text:?} is not a dimension")))?,
            Err(_) => self.dimension_cap.unwrap_or(qpca_core::linalg::DEFAULT_DIMENSION_CAP),
        };
        if cap == 0 || cap > MAX_DIMENSION_CAP {
            return Err(CliError::Usage(format!("dimension cap must be in 1..={MAX_DIMENSION_CAP}, got {cap}")));
        }
        Ok(cap)
    }

    /// A snapshot holding the shared settings and one resolved section.
    pub fn snapshot(&self, cap: usize) -> ExperimentConfig {
        ExperimentConfig {
            seed: self.seed,
            dimension_cap: Some(cap),
            output_dir: self.output_dir.clone(),
            workers: self.workers,
            ..ExperimentConfig::default()
        }
    }
}
