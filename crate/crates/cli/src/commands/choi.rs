use serde::Serialize;

use qpca_core::choi::{choi_state, QuantumChannel};
use qpca_core::linalg::hermitian_eig;
use qpca_core::qpca::{components_of, qpe_decompose, QpeConfig};

use super::qpca::ComponentFile;
use super::{require_file, Context, Outcome};
use crate::config::{ChoiParams, ExperimentConfig};
use crate::error::CliError;
use crate::output::{num, Artifact};

#[derive(Serialize)]
struct Summary {
    channel_dim: usize,
    kraus_operators: usize,
    choi_dim: usize,
    ancilla_bits: u32,
    base_time: f64,
    choi_eigenvalues: Vec<f64>,
    components: Vec<ComponentFile>,
    warnings: Vec<String>,
}

pub fn run(p: ChoiParams, _ctx: &Context, mut snapshot: ExperimentConfig) -> Result<Outcome, CliError> {
    let path = require_file("channel", &p.channel)?;
    let cfg = QpeConfig::exact(p.bits.unwrap_or(6)).with_base_time(p.base_time.unwrap_or(QpeConfig::default().base_time));
    cfg.validate()?;
    let top_k = p.top_k.unwrap_or(1);
    let channel = QuantumChannel::load(&path)?;
    let choi = choi_state(&channel)?;
    if top_k == 0 || top_k > choi.dim() {
        return Err(CliError::Usage(format!("--top-k must be in 1..={}, got {top_k}", choi.dim())));
    }

    let oracle = hermitian_eig(choi.matrix())?;
    let est = qpe_decompose(&choi, &choi, &cfg)?;
    let mut pcs = components_of(&est, top_k)?;
    pcs.components.sort_by(|a, b| b.estimate.total_cmp(&a.estimate));

    let exact_rows = oracle.eigenvalues().iter().enumerate().map(|(i, &v)| vec![i.to_string(), num(v)]).collect();
    let qpe_rows = est.bins.iter().map(|b| vec![num(b.estimate), num(b.mass)]).collect();
    let mut artifacts = vec![
        Artifact::csv("choi_spectrum.csv", &["index", "eigenvalue"], exact_rows)?,
        Artifact::csv("choi_qpe.csv", &["r_estimate", "mass"], qpe_rows)?,
    ];
    let files: Vec<ComponentFile> =
        pcs.components.iter().enumerate().map(|(i, c)| ComponentFile::new(i, c, &oracle)).collect();
    for f in &files {
        artifacts.push(Artifact::json(format!("component_{}.json", f.rank), f)?);
    }
    let rank = oracle.eigenvalues().iter().filter(|&&v| v > 1e-10).count();
    let summary = Summary {
        channel_dim: channel.dim(),
        kraus_operators: channel.kraus().len(),
        choi_dim: choi.dim(),
        ancilla_bits: cfg.ancilla_bits,
        base_time: cfg.base_time,
        choi_eigenvalues: oracle.eigenvalues().to_vec(),
        components: files,
        warnings: pcs.warnings,
    };
    artifacts.push(Artifact::json("summary.json", &summary)?);

    snapshot.choi = ChoiParams {
        bits: Some(cfg.ancilla_bits),
        base_time: Some(cfg.base_time),
        top_k: Some(top_k),
        ..p
    };
    Ok(Outcome {
        artifacts,
        snapshot,
        summary: format!("Choi state of dimension {}, rank {rank}, {} QPE bins", choi.dim(), est.bins.len()),
    })
}
