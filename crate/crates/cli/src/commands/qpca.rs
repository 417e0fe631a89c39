use serde::Serialize;

use qpca_core::gram::{build_encoding, Dataset};
use qpca_core::linalg::io::{read_density, state_to_json, EntriesJson};
use qpca_core::linalg::{hermitian_eig, DensityMatrix, SpectralDecomposition};
use qpca_core::qpca::{
    components_of, eigenspace_fidelity, low_rank_projection_error, qpe_decompose, sample_estimate, Component,
};

use super::{positive, qpe_config, require_file, Context, Outcome};
use crate::config::{ExperimentConfig, QpcaParams, Register};
use crate::error::CliError;
use crate::output::{num, Artifact};

#[derive(Serialize)]
pub(crate) struct ComponentFile {
    pub rank: usize,
    pub estimate: f64,
    pub mass: f64,
    pub degenerate: bool,
    pub oracle_eigenvalue: f64,
    pub oracle_fidelity: f64,
    pub eigenvector: EntriesJson,
}

impl ComponentFile {
    pub fn new(rank: usize, c: &Component, oracle: &SpectralDecomposition) -> Self {
        let oracle_eigenvalue = nearest(oracle.eigenvalues(), c.estimate);
        Self {
            rank,
            estimate: c.estimate,
            mass: c.mass,
            degenerate: c.degenerate,
            oracle_eigenvalue,
            oracle_fidelity: eigenspace_fidelity(&c.eigenvector, oracle, oracle_eigenvalue),
            eigenvector: state_to_json(&c.eigenvector),
        }
    }
}

fn nearest(values: &[f64], x: f64) -> f64 {
    values.iter().copied().min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs())).unwrap_or(f64::NAN)
}

#[derive(Serialize)]
struct Summary {
    source: &'static str,
    register: Option<Register>,
    dim: usize,
    dropped_vectors: Vec<usize>,
    ancilla_bits: u32,
    base_time: f64,
    copies_consumed: u64,
    oracle_eigenvalues: Vec<f64>,
    low_rank_projection_error: f64,
    trials: u64,
    components: Vec<ComponentFile>,
    warnings: Vec<String>,
}

pub fn run(p: QpcaParams, ctx: &Context, mut snapshot: ExperimentConfig) -> Result<Outcome, CliError> {
    let (cfg, qpe) = qpe_config(&p.qpe, 4)?;
    let top_k = p.top_k.unwrap_or(1);
    let trials = positive("trials", p.trials.unwrap_or(1000))?;
    let (rho, source, register, dropped) = match (&p.rho, &p.dataset) {
        (Some(_), None) => (read_density(&require_file("rho", &p.rho)?)?, "rho", None, Vec::new()),
        (None, Some(_)) => {
            let data = Dataset::load(&require_file("dataset", &p.dataset)?)?;
            let register = p.register.unwrap_or(Register::Covariance);
            let enc = build_encoding(&data)?;
            let rho: DensityMatrix = match register {
                Register::Covariance => enc.covariance_density,
                Register::Gram => enc.gram_density,
            };
            (rho, "dataset", Some(register), enc.dropped)
        }
        _ => return Err(CliError::Usage("give exactly one of --rho and --dataset".into())),
    };
    if top_k == 0 || top_k > rho.dim() {
        return Err(CliError::Usage(format!("--top-k must be in 1..={}, got {top_k}", rho.dim())));
    }

    let est = qpe_decompose(&rho, &rho, &cfg)?;
    let pcs = components_of(&est, top_k)?;
    let record = sample_estimate(&est, trials, ctx.seed)?;
    let oracle = hermitian_eig(rho.matrix())?;

    let rows = est
        .bins
        .iter()
        .map(|b| {
            let count = record.counts.get(&b.outcome).copied().unwrap_or(0);
            vec![num(b.estimate), num(b.mass), num(count as f64 / trials as f64)]
        })
        .collect();
    let mut artifacts = vec![Artifact::csv("spectrum.csv", &["r_estimate", "mass", "frequency"], rows)?];
    let files: Vec<ComponentFile> =
        pcs.components.iter().enumerate().map(|(i, c)| ComponentFile::new(i, c, &oracle)).collect();
    for f in &files {
        artifacts.push(Artifact::json(format!("component_{}.json", f.rank), f)?);
    }
    let summary_line = format!(
        "{} bins, top estimate {:.6} (mass {:.4})",
        est.bins.len(),
        files[0].estimate,
        files[0].mass
    );
    let summary = Summary {
        source,
        register,
        dim: rho.dim(),
        dropped_vectors: dropped,
        ancilla_bits: cfg.ancilla_bits,
        base_time: cfg.base_time,
        copies_consumed: est.copies_consumed,
        oracle_eigenvalues: oracle.eigenvalues().to_vec(),
        low_rank_projection_error: low_rank_projection_error(&rho, top_k)?,
        trials,
        components: files,
        warnings: pcs.warnings,
    };
    artifacts.push(Artifact::json("summary.json", &summary)?);

    snapshot.qpca = QpcaParams { register, qpe, top_k: Some(top_k), trials: Some(trials), ..p };
    Ok(Outcome { artifacts, snapshot, summary: summary_line })
}
