//! Density-matrix exponentiation.
//!
//! One partial-swap step consumes a fresh copy of `ρ`:
//!
//! ```text
//! σ ↦ tr_copy[ e^{-iSΔt} (ρ ⊗ σ) e^{iSΔt} ]
//!   = cos²(Δt)·σ + sin²(Δt)·ρ − i·cos(Δt)·sin(Δt)·[ρ, σ]
//! ```
//!
//! Repeating it `n` times with `Δt = t/n` approaches `e^{-iρt} σ e^{iρt}` with
//! an error that shrinks like `t²/n`. Each step is computed by explicit
//! conjugation on the two-copy space followed by a partial trace; copies are
//! traced out as soon as they are used, so `ρ^{⊗n}` is never built.

use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, partial_trace, swap_operator, tensor, trace_distance, ComplexMatrix,
    DensityMatrix, Subsystem, I,
};

/// Step count and size for `n` partial swaps covering total time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwapSchedule {
    total_time: f64,
    steps: usize,
    step_size: f64,
}

impl SwapSchedule {
    pub fn new(total_time: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::Validation("schedule needs at least one step".into()));
        }
        if !total_time.is_finite() {
            return Err(Error::Validation("total time must be finite".into()));
        }
        let step_size = total_time / steps as f64;
        if step_size.abs() >= FRAC_PI_2 {
            return Err(Error::Validation(format!(
                "step size {step_size} leaves the small-angle regime (|Δt| < π/2)"
            )));
        }
        Ok(Self { total_time, steps, step_size })
    }

    /// Default chooser: `n = ceil(2·t²/ε)`.
    pub fn for_accuracy(total_time: f64, epsilon: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::Validation("accuracy target must be positive".into()));
        }
        let n = (2.0 * total_time * total_time / epsilon).ceil().max(1.0);
        if n > u32::MAX as f64 {
            return Err(Error::Validation(format!("{n} steps is too many")));
        }
        Self::new(total_time, n as usize)
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }
}

/// Which state supplies the copy consumed by a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CopySource {
    Rho,
    Sigma,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwapStep {
    pub source: CopySource,
    pub dt: f64,
}

/// Ordered list of partial-swap steps applied to a target.
#[derive(Clone, Debug, PartialEq)]
pub struct SwapPlan {
    steps: Vec<SwapStep>,
}

impl SwapPlan {
    /// `n` steps with copies of `ρ` at `+Δt`.
    pub fn exponentiate(schedule: &SwapSchedule) -> Self {
        Self::difference(schedule, 1.0, 0.0)
    }

    /// Per schedule step: a `ρ` copy at `+w_ρ·Δt` then a `σ` copy at `−w_σ·Δt`.
    /// Zero-weight steps are dropped.
    pub fn difference(schedule: &SwapSchedule, rho_weight: f64, sigma_weight: f64) -> Self {
        let dt = schedule.step_size();
        let mut steps = Vec::new();
        for _ in 0..schedule.steps() {
            if rho_weight != 0.0 {
                steps.push(SwapStep { source: CopySource::Rho, dt: rho_weight * dt });
            }
            if sigma_weight != 0.0 {
                steps.push(SwapStep { source: CopySource::Sigma, dt: -sigma_weight * dt });
            }
        }
        Self { steps }
    }

    pub fn steps(&self) -> &[SwapStep] {
        &self.steps
    }

    pub fn copies_consumed(&self) -> usize {
        self.steps.len()
    }
}

/// `e^{-iSΔt} = cos(Δt)·I − i·sin(Δt)·S` on `d ⊗ d`.
pub fn partial_swap_unitary(d: usize, dt: f64) -> Result<ComplexMatrix> {
    let s = swap_operator(d)?;
    let n = d * d;
    let cos = Complex64::new(dt.cos(), 0.0);
    let isin = I * dt.sin();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { cos } else { Complex64::new(0.0, 0.0) };
        id - isin * s[(i, j)]
    }))
}

/// One step `tr_copy[e^{-iSΔt}(ρ ⊗ σ)e^{iSΔt}]`, copy in the first factor.
pub fn partial_swap_step(rho: &DensityMatrix, sigma: &DensityMatrix, dt: f64) -> Result<DensityMatrix> {
    check_pair(rho, sigma)?;
    check_step(dt)?;
    let u = partial_swap_unitary(rho.dim(), dt)?;
    let out = conjugated_step(rho.matrix(), sigma.matrix(), &u)?;
    DensityMatrix::new(out)
}

fn conjugated_step(copy: &ComplexMatrix, target: &ComplexMatrix, u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = copy.rows();
    let joint = tensor(copy, target)?;
    let evolved = u.dot(&joint).dot(&u.adjoint());
    let mut out = partial_trace(&evolved, Subsystem::First, d, d)?;
    out.hermitize();
    Ok(out)
}

fn check_pair(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!("dimensions differ: {} vs {}", a.dim(), b.dim())));
    }
    Ok(())
}

fn check_step(dt: f64) -> Result<()> {
    if !dt.is_finite() || dt.abs() >= FRAC_PI_2 {
        return Err(Error::Validation(format!("step size {dt} must satisfy |Δt| < π/2")));
    }
    Ok(())
}

/// Applies every step of `plan` to `target`, drawing copies from `rho` or `sigma`.
pub fn run_plan(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    target: &DensityMatrix,
    plan: &SwapPlan,
) -> Result<DensityMatrix> {
    check_pair(rho, target)?;
    check_pair(sigma, target)?;
    let d = target.dim();
    // at most two distinct step sizes occur in a plan
    let mut cache: Vec<(f64, ComplexMatrix)> = Vec::new();
    let mut state = target.matrix().clone();
    for step in plan.steps() {
        check_step(step.dt)?;
        let u = match cache.iter().position(|(dt, _)| *dt == step.dt) {
            Some(i) => &cache[i].1,
            None => {
                cache.push((step.dt, partial_swap_unitary(d, step.dt)?));
                &cache.last().expect("just pushed").1
            }
        };
        let copy = match step.source {
            CopySource::Rho => rho.matrix(),
            CopySource::Sigma => sigma.matrix(),
        };
        state = conjugated_step(copy, &state, u)?;
    }
    DensityMatrix::new(state)
}

/// `n` partial swaps of `σ` with fresh copies of `ρ`.
pub fn evolve_swap_channel(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    schedule: &SwapSchedule,
) -> Result<DensityMatrix> {
    check_pair(rho, sigma)?;
    run_plan(rho, rho, sigma, &SwapPlan::exponentiate(schedule))
}

/// `e^{-iρt} σ e^{iρt}` with the unitary from a full eigendecomposition.
pub fn exact_conjugation(rho: &DensityMatrix, sigma: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    apply_spectral_function(rho, |x| x, t, sigma)
}

/// `e^{-ig(ρ)t} target e^{ig(ρ)t}`, evaluated on the eigendecomposition of `ρ`.
pub fn apply_spectral_function(
    rho: &DensityMatrix,
    g: impl Fn(f64) -> f64,
    t: f64,
    target: &DensityMatrix,
) -> Result<DensityMatrix> {
    check_pair(rho, target)?;
    let decomp = hermitian_eig(rho.matrix())?;
    for &r in decomp.eigenvalues() {
        let gr = g(r);
        if !gr.is_finite() {
            return Err(Error::Domain(format!("g({r}) = {gr} is not finite")));
        }
    }
    let u = decomp.map_spectrum(|r| Complex64::from_polar(1.0, -g(r) * t));
    conjugate(&u, target)
}

pub(crate) fn conjugate(u: &ComplexMatrix, target: &DensityMatrix) -> Result<DensityMatrix> {
    let mut out = u.dot(target.matrix()).dot(&u.adjoint());
    out.hermitize();
    DensityMatrix::new(out)
}

/// Approximates `e^{-i(ρ−σ)t} target e^{i(ρ−σ)t}` by alternating a `ρ` copy
/// at `+Δt` with a `σ` copy at `−Δt` in every schedule step.
pub fn evolve_difference(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    target: &DensityMatrix,
    schedule: &SwapSchedule,
) -> Result<DensityMatrix> {
    run_plan(rho, sigma, target, &SwapPlan::difference(schedule, 1.0, 1.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorCurveRow {
    pub steps: usize,
    pub trace_distance: f64,
    pub wall_time: Duration,
}

/// Trace distance between the swap channel and exact conjugation, per step count.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorCurve {
    pub total_time: f64,
    pub rows: Vec<ErrorCurveRow>,
}

impl ErrorCurve {
    /// `error(n_k) / error(n_{k+1})` for consecutive rows.
    pub fn successive_ratios(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| w[0].trace_distance / w[1].trace_distance)
            .collect()
    }

    /// `n · error(n)` per row; approaches a constant when error ~ 1/n.
    pub fn scaled_errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.steps as f64 * r.trace_distance).collect()
    }
}

/// Rows are computed concurrently and returned in input order.
pub fn measure_error_scaling(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    t: f64,
    step_counts: &[usize],
) -> Result<ErrorCurve> {
    if step_counts.is_empty() {
        return Err(Error::Validation("no step counts given".into()));
    }
    if step_counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("step counts must be strictly increasing".into()));
    }
    check_pair(rho, sigma)?;
    let exact = exact_conjugation(rho, sigma, t)?;
    let rows = step_counts
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let schedule = SwapSchedule::new(t, n)?;
            let approx = evolve_swap_channel(rho, sigma, &schedule)?;
            let trace_distance = trace_distance(&approx, &exact)?;
            Ok(ErrorCurveRow { steps: n, trace_distance, wall_time: start.elapsed() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorCurve { total_time: t, rows })
}
