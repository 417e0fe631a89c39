//! Phase-estimation self-tomography.
//!
//! Running phase estimation with controlled `e^{-iρ·2^j t₀}` on `ρ` itself
//! leaves the joint state `Σ_i r_i |χ_i⟩⟨χ_i| ⊗ |r̃_i⟩⟨r̃_i|`: reading the
//! ancilla returns eigenvalue estimates with probability equal to the
//! eigenvalue, and the post-measurement target state is the matching
//! eigenvector. [`SpectralEstimate`] is that readout, one bin per ancilla
//! outcome.

mod components;
pub mod fourier;
mod phase;
mod sampling;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DensityMatrix;

pub use components::{
    components_of, eigenspace_fidelity, low_rank_projection_error, observable_on_component, principal_components,
    Component, PrincipalComponents,
};
pub(crate) use phase::{run_phase_estimation, Generator};
pub use phase::qpe_decompose;
pub use sampling::{estimate_spectrum, sample_decomposition, sample_estimate, SampleRecord};

/// How the controlled evolutions are realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Controlled `e^{-iHt}` from a full eigendecomposition.
    Exact,
    /// Controlled partial swaps, one fresh copy per step.
    SwapChannel,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpeConfig {
    pub ancilla_bits: u32,
    pub base_time: f64,
    pub backend: Backend,
    pub swap_steps_per_unit_time: usize,
}

impl Default for QpeConfig {
    fn default() -> Self {
        Self { ancilla_bits: 4, base_time: PI, backend: Backend::Exact, swap_steps_per_unit_time: 512 }
    }
}

impl QpeConfig {
    pub fn exact(ancilla_bits: u32) -> Self {
        Self { ancilla_bits, ..Self::default() }
    }

    pub fn swap_channel(ancilla_bits: u32, steps_per_unit_time: usize) -> Self {
        Self {
            ancilla_bits,
            backend: Backend::SwapChannel,
            swap_steps_per_unit_time: steps_per_unit_time,
            ..Self::default()
        }
    }

    pub fn with_base_time(mut self, base_time: f64) -> Self {
        self.base_time = base_time;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=12).contains(&self.ancilla_bits) {
            return Err(Error::Validation(format!(
                "ancilla bits must be in 1..=12, got {}",
                self.ancilla_bits
            )));
        }
        if !(self.base_time > 0.0 && self.base_time <= PI) {
            return Err(Error::Validation(format!(
                "base time must lie in (0, π], got {}",
                self.base_time
            )));
        }
        if self.backend == Backend::SwapChannel && self.swap_steps_per_unit_time == 0 {
            return Err(Error::Validation("swap backend needs at least one step per unit time".into()));
        }
        Ok(())
    }

    pub fn outcomes(&self) -> usize {
        1 << self.ancilla_bits
    }

    /// `r̃(k) = 2πk / (2^b·t₀)`
    pub fn estimate_for(&self, outcome: usize) -> f64 {
        2.0 * PI * outcome as f64 / (self.outcomes() as f64 * self.base_time)
    }

    /// Spacing between adjacent eigenvalue estimates.
    pub fn bin_width(&self) -> f64 {
        self.estimate_for(1)
    }

    /// Partial-swap steps spent on the lowest controlled power `e^{-iHt₀}`.
    pub fn steps_per_base_power(&self) -> usize {
        (self.base_time * self.swap_steps_per_unit_time as f64).ceil() as usize
    }

    /// Copies consumed by one swap-backend run: `(2^b − 1)·ceil(t₀·steps_per_unit_time)`.
    pub fn swap_copy_count(&self) -> u64 {
        (self.outcomes() as u64 - 1) * self.steps_per_base_power() as u64
    }
}

/// One ancilla outcome with its probability and conditional target state.
#[derive(Clone, Debug)]
pub struct Bin {
    pub outcome: usize,
    pub estimate: f64,
    pub mass: f64,
    pub state: DensityMatrix,
}

/// Readout of a phase-estimation run. Outcomes with negligible probability
/// (below `1e-12`) are omitted.
#[derive(Clone, Debug)]
pub struct SpectralEstimate {
    pub config: QpeConfig,
    pub bins: Vec<Bin>,
    /// Copies of the input states used by the swap backend; zero for exact runs.
    pub copies_consumed: u64,
}

impl SpectralEstimate {
    pub fn total_mass(&self) -> f64 {
        self.bins.iter().map(|b| b.mass).sum()
    }

    /// Probability of every outcome `k` in `0..2^b`.
    pub fn outcome_masses(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.config.outcomes()];
        for b in &self.bins {
            out[b.outcome] = b.mass;
        }
        out
    }

    /// The bin whose estimate lies within half a bin width of `value`.
    pub fn bin_near(&self, value: f64) -> Option<&Bin> {
        let half = 0.5 * self.config.bin_width();
        self.bins.iter().find(|b| (b.estimate - value).abs() < half)
    }

    /// Total-variation distance between outcome distributions of equal width.
    pub fn total_variation(&self, other: &SpectralEstimate) -> Result<f64> {
        if self.config.ancilla_bits != other.config.ancilla_bits {
            return Err(Error::Shape("estimates use different ancilla widths".into()));
        }
        Ok(0.5
            * self
                .outcome_masses()
                .iter()
                .zip(other.outcome_masses())
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }

    /// Total variation against an ideal point spectrum after both are
    /// coarse-grained onto windows of half-width `half_width` around each
    /// ideal eigenvalue, plus one remainder cell.
    pub fn windowed_total_variation(&self, ideal: &[(f64, f64)], half_width: f64) -> f64 {
        let mut cells = vec![0.0; ideal.len() + 1];
        for b in &self.bins {
            let cell = ideal
                .iter()
                .position(|(value, _)| (b.estimate - value).abs() <= half_width)
                .unwrap_or(ideal.len());
            cells[cell] += b.mass;
        }
        let ideal_cells = ideal.iter().map(|(_, p)| *p).chain(std::iter::once(0.0));
        0.5 * cells.iter().zip(ideal_cells).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }
}
