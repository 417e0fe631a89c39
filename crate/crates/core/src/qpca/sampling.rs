use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{qpe_decompose, QpeConfig, SpectralEstimate};
use crate::error::{Error, Result};
use crate::linalg::DensityMatrix;
use crate::random::trial_uniform;

/// Ancilla outcomes observed over `trials` independent runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub trials: u64,
    pub counts: BTreeMap<usize, u64>,
    pub seeds: Vec<u64>,
    pub ancilla_bits: u32,
    pub base_time: f64,
}

impl SampleRecord {
    /// Pools two records taken under the same configuration.
    pub fn merge(&self, other: &SampleRecord) -> Result<SampleRecord> {
        if self.ancilla_bits != other.ancilla_bits || self.base_time != other.base_time {
            return Err(Error::Validation("records were taken under different configurations".into()));
        }
        let mut counts = self.counts.clone();
        for (&k, &c) in &other.counts {
            *counts.entry(k).or_default() += c;
        }
        let mut seeds = self.seeds.clone();
        seeds.extend(&other.seeds);
        Ok(SampleRecord { trials: self.trials + other.trials, counts, seeds, ..*self })
    }
}

/// Draws `trials` outcomes from an estimate's bin distribution.
pub fn sample_estimate(estimate: &SpectralEstimate, trials: u64, seed: u64) -> Result<SampleRecord> {
    if trials == 0 {
        return Err(Error::Validation("need at least one trial".into()));
    }
    let mut cumulative = Vec::with_capacity(estimate.bins.len());
    let mut acc = 0.0;
    for b in &estimate.bins {
        acc += b.mass;
        cumulative.push(acc);
    }
    let total = acc;
    let draws: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let u = trial_uniform(seed, t) * total;
            let i = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
            estimate.bins[i].outcome
        })
        .collect();
    let mut counts = BTreeMap::new();
    for k in draws {
        *counts.entry(k).or_default() += 1;
    }
    Ok(SampleRecord {
        trials,
        counts,
        seeds: vec![seed],
        ancilla_bits: estimate.config.ancilla_bits,
        base_time: estimate.config.base_time,
    })
}

/// `trials` independent copies of the self-tomography readout of `rho`.
pub fn sample_decomposition(rho: &DensityMatrix, cfg: &QpeConfig, trials: u64, seed: u64) -> Result<SampleRecord> {
    sample_estimate(&qpe_decompose(rho, rho, cfg)?, trials, seed)
}

/// Empirical eigenvalue histogram `(r̃, frequency)` in ascending order of `r̃`.
pub fn estimate_spectrum(record: &SampleRecord, cfg: &QpeConfig) -> Result<Vec<(f64, f64)>> {
    if record.ancilla_bits != cfg.ancilla_bits || record.base_time != cfg.base_time {
        return Err(Error::Validation("record does not match the configuration".into()));
    }
    let total: u64 = record.counts.values().sum();
    if total != record.trials {
        return Err(Error::Invariant(format!("counts sum to {total}, expected {}", record.trials)));
    }
    Ok(record
        .counts
        .iter()
        .map(|(&k, &c)| (cfg.estimate_for(k), c as f64 / total as f64))
        .collect())
}
