//! Two-cluster state assignment by the sign of an eigenvalue of `ρ − σ`.
//!
//! Decomposing `|χ⟩ = Σ_j χ_j |ξ_j⟩` over eigenvectors of `ρ − σ` and reading
//! the eigenvalue `x_j` assigns `|χ⟩` to the first cluster when `x_j > 0`
//! and to the second when `x_j < 0`; `|x_j|` is the confidence. A zero
//! eigenvalue abstains. Phase estimation works on `H' = (ρ − σ + I)/2`,
//! whose spectrum lies in `[0, 1]`, and decodes `x̃ = 2r̃ − 1`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::Dataset;
use crate::linalg::{hermitian_eig, tol, trace_norm, ComplexMatrix, DensityMatrix, PureState, SpectralDecomposition};
use crate::qpca::{run_phase_estimation, Generator, QpeConfig};
use crate::random::trial_uniform;

/// Eigenvalues this close to zero abstain.
pub const ABSTAIN_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ClusterPair {
    pub rho: DensityMatrix,
    pub sigma: DensityMatrix,
    pub difference_spectrum: SpectralDecomposition,
}

fn uniform_mixture(states: &[PureState]) -> Result<DensityMatrix> {
    let d = states[0].dim();
    let mut m = states
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, s| &acc + &s.projector())
        .scale_real(1.0 / states.len() as f64);
    m.hermitize();
    DensityMatrix::new(m)
}

pub fn build_clusters(set_a: &[PureState], set_b: &[PureState]) -> Result<ClusterPair> {
    if set_a.is_empty() || set_b.is_empty() {
        return Err(Error::Validation("both clusters need at least one state".into()));
    }
    let d = set_a[0].dim();
    if set_a.iter().chain(set_b).any(|s| s.dim() != d) {
        return Err(Error::Shape("cluster states have different dimensions".into()));
    }
    let rho = uniform_mixture(set_a)?;
    let sigma = uniform_mixture(set_b)?;
    let difference_spectrum = hermitian_eig(&(rho.matrix() - sigma.matrix()))?;
    let vals = difference_spectrum.eigenvalues();
    let sum: f64 = vals.iter().sum();
    if sum.abs() > 1e-9 || vals.iter().any(|x| x.abs() > 1.0 + 1e-9) {
        return Err(Error::Invariant(format!("difference spectrum {vals:?} is not traceless in [-1, 1]")));
    }
    Ok(ClusterPair { rho, sigma, difference_spectrum })
}

impl ClusterPair {
    /// Clusters from a dataset whose labels form exactly two groups, in order
    /// of first appearance. Vectors are normalized.
    pub fn from_dataset(data: &Dataset) -> Result<(Self, [String; 2])> {
        let groups = data.groups()?;
        if groups.len() != 2 {
            return Err(Error::Validation(format!("expected two label groups, found {}", groups.len())));
        }
        let states = |idx: &[usize]| {
            idx.iter()
                .map(|&i| PureState::normalized(data.vectors()[i].clone()))
                .collect::<Result<Vec<_>>>()
        };
        let pair = build_clusters(&states(&groups[0].1)?, &states(&groups[1].1)?)?;
        Ok((pair, [groups[0].0.clone(), groups[1].0.clone()]))
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn swapped(&self) -> Result<ClusterPair> {
        let difference_spectrum = hermitian_eig(&(self.sigma.matrix() - self.rho.matrix()))?;
        Ok(ClusterPair { rho: self.sigma.clone(), sigma: self.rho.clone(), difference_spectrum })
    }

    /// `(1/2)(1 − (1/2)‖ρ − σ‖₁)`
    pub fn helstrom_error(&self) -> Result<f64> {
        Ok(0.5 * (1.0 - 0.5 * trace_norm(&(self.rho.matrix() - self.sigma.matrix()))?))
    }

    /// Error rate of the sign rule on a state drawn from either cluster with
    /// equal priors, counting an abstention as half an error.
    pub fn sign_rule_error(&self) -> f64 {
        let spec = &self.difference_spectrum;
        let mut err = 0.0;
        for (x, v) in spec.eigenvalues().iter().zip(spec.eigenvectors()) {
            let on_rho = v.expectation(self.rho.matrix()).re;
            let on_sigma = v.expectation(self.sigma.matrix()).re;
            err += match sign_label(*x) {
                Label::First => on_sigma,
                Label::Second => on_rho,
                Label::Abstain => 0.5 * (on_rho + on_sigma),
            };
        }
        0.5 * err
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    First,
    Second,
    Abstain,
}

impl Label {
    pub fn swapped(self) -> Label {
        match self {
            Label::First => Label::Second,
            Label::Second => Label::First,
            Label::Abstain => Label::Abstain,
        }
    }
}

pub fn sign_label(x: f64) -> Label {
    if x > ABSTAIN_TOL {
        Label::First
    } else if x < -ABSTAIN_TOL {
        Label::Second
    } else {
        Label::Abstain
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub label: Label,
    pub eigenvalue: f64,
    pub confidence: f64,
    /// `(x_j, probability)` in descending order of `x_j`.
    pub outcome_distribution: Vec<(f64, f64)>,
}

impl Assignment {
    /// Samples one outcome of `distribution` with the uniform draw `u ∈ [0, 1)`.
    pub fn from_draw(distribution: Vec<(f64, f64)>, u: f64) -> Assignment {
        let total: f64 = distribution.iter().map(|(_, p)| p).sum();
        let target = u * total;
        let mut acc = 0.0;
        let mut pick = distribution.len() - 1;
        for (i, (_, p)) in distribution.iter().enumerate() {
            acc += p;
            if target < acc {
                pick = i;
                break;
            }
        }
        let eigenvalue = distribution[pick].0;
        Assignment { label: sign_label(eigenvalue), eigenvalue, confidence: eigenvalue.abs(), outcome_distribution: distribution }
    }

    /// Total probability of outcomes with the given label.
    pub fn probability_of(&self, label: Label) -> f64 {
        self.outcome_distribution.iter().filter(|(x, _)| sign_label(*x) == label).map(|(_, p)| p).sum()
    }
}

fn check_state(chi: &PureState, clusters: &ClusterPair) -> Result<()> {
    if chi.dim() != clusters.dim() {
        return Err(Error::Shape(format!("state dimension {} does not match clusters {}", chi.dim(), clusters.dim())));
    }
    Ok(())
}

/// `(x_j, |⟨ξ_j|χ⟩|²)` with degenerate eigenvalues merged into one outcome.
pub fn exact_distribution(chi: &PureState, clusters: &ClusterPair) -> Result<Vec<(f64, f64)>> {
    check_state(chi, clusters)?;
    let spec = &clusters.difference_spectrum;
    let dist = spec
        .clusters(tol::DEGENERACY_GAP)
        .into_iter()
        .map(|range| {
            let x = spec.eigenvalues()[range.start];
            let x = if x.abs() <= ABSTAIN_TOL { 0.0 } else { x };
            (x, chi.expectation(&spec.projector(range)).re.max(0.0))
        })
        .collect();
    Ok(dist)
}

/// Decoded outcome distribution of phase estimation on `H' = (ρ − σ + I)/2`.
/// Estimates above the midpoint of the aliased range wrap to negative
/// phases; decoded values are clamped to `[−1, 1]`.
pub fn qpe_distribution(chi: &PureState, clusters: &ClusterPair, cfg: &QpeConfig) -> Result<(Vec<(f64, f64)>, u64)> {
    check_state(chi, clusters)?;
    let gen = Generator { terms: vec![(&clusters.rho, 0.5), (&clusters.sigma, -0.5)], offset: 0.5 };
    let est = run_phase_estimation(&gen, &chi.to_density(), cfg)?;
    let period = 2.0 * PI / cfg.base_time;
    let wrap_above = 0.5 * (1.0 + period);
    let mut dist: Vec<(f64, f64)> = Vec::new();
    for bin in &est.bins {
        let r = if bin.estimate > wrap_above { bin.estimate - period } else { bin.estimate };
        let x = (2.0 * r - 1.0).clamp(-1.0, 1.0);
        let x = if x.abs() <= ABSTAIN_TOL { 0.0 } else { x };
        match dist.iter_mut().find(|(y, _)| *y == x) {
            Some((_, p)) => *p += bin.mass,
            None => dist.push((x, bin.mass)),
        }
    }
    dist.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok((dist, est.copies_consumed))
}

pub fn assign(chi: &PureState, clusters: &ClusterPair, seed: u64) -> Result<Assignment> {
    Ok(Assignment::from_draw(exact_distribution(chi, clusters)?, trial_uniform(seed, 0)))
}

pub fn assign_via_qpe(chi: &PureState, clusters: &ClusterPair, cfg: &QpeConfig, seed: u64) -> Result<Assignment> {
    Ok(Assignment::from_draw(qpe_distribution(chi, clusters, cfg)?.0, trial_uniform(seed, 0)))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trials: u64,
    pub first: u64,
    pub second: u64,
    pub abstain: u64,
}

impl TrialSummary {
    pub fn frequency(&self, label: Label) -> f64 {
        let n = match label {
            Label::First => self.first,
            Label::Second => self.second,
            Label::Abstain => self.abstain,
        };
        n as f64 / self.trials as f64
    }
}

/// Independent assignments drawn from `distribution`, trial `t` using the
/// stream `(seed, t)`.
pub fn run_trials(distribution: &[(f64, f64)], trials: u64, seed: u64) -> TrialSummary {
    (0..trials)
        .into_par_iter()
        .map(|t| Assignment::from_draw(distribution.to_vec(), trial_uniform(seed, t)).label)
        .fold(TrialSummary::default, |mut acc, label| {
            acc.trials += 1;
            match label {
                Label::First => acc.first += 1,
                Label::Second => acc.second += 1,
                Label::Abstain => acc.abstain += 1,
            }
            acc
        })
        .reduce(TrialSummary::default, |a, b| TrialSummary {
            trials: a.trials + b.trials,
            first: a.first + b.first,
            second: a.second + b.second,
            abstain: a.abstain + b.abstain,
        })
}

/// Total variation after moving every phase-estimation outcome onto the
/// nearest exact eigenvalue.
pub fn coarse_grained_tv(estimated: &[(f64, f64)], exact: &[(f64, f64)]) -> f64 {
    let mut cells = vec![0.0; exact.len()];
    for &(x, p) in estimated {
        let nearest = exact
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 .0 - x).abs().total_cmp(&(b.1 .0 - x).abs()))
            .map(|(i, _)| i)
            .expect("exact distribution is non-empty");
        cells[nearest] += p;
    }
    0.5 * cells.iter().zip(exact).map(|(a, (_, b))| (a - b).abs()).sum::<f64>()
}
