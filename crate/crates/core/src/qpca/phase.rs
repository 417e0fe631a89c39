use num_complex::Complex64;

use super::fourier::apply_readout_transform;
use super::{Backend, Bin, QpeConfig, SpectralEstimate};
use crate::error::{Error, Result};
use crate::linalg::{
    check_dimension, hermitian_eig, matrix_exponential_oracle, tol, ComplexMatrix, DensityMatrix,
    I, ZERO,
};

const MASS_FLOOR: f64 = 1e-12;

/// Hamiltonian `H = Σ_i w_i·ρ_i + offset·I` whose evolution drives the
/// controlled powers. The swap backend realizes each `ρ_i` term with
/// partial swaps against copies of `ρ_i` and the offset as a controlled phase.
pub(crate) struct Generator<'a> {
    pub terms: Vec<(&'a DensityMatrix, f64)>,
    pub offset: f64,
}

impl<'a> Generator<'a> {
    pub fn single(rho: &'a DensityMatrix) -> Self {
        Self { terms: vec![(rho, 1.0)], offset: 0.0 }
    }

    fn dim(&self) -> usize {
        self.terms[0].0.dim()
    }

    fn hamiltonian(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut h = ComplexMatrix::identity(d).scale_real(self.offset);
        for (rho, w) in &self.terms {
            h = &h + &rho.matrix().scale_real(*w);
        }
        h
    }
}

/// Phase estimation of `e^{-iρt₀}` on `input`.
pub fn qpe_decompose(rho: &DensityMatrix, input: &DensityMatrix, cfg: &QpeConfig) -> Result<SpectralEstimate> {
    run_phase_estimation(&Generator::single(rho), input, cfg)
}

pub(crate) fn run_phase_estimation(
    gen: &Generator<'_>,
    input: &DensityMatrix,
    cfg: &QpeConfig,
) -> Result<SpectralEstimate> {
    cfg.validate()?;
    let d = gen.dim();
    if input.dim() != d || gen.terms.iter().any(|(r, _)| r.dim() != d) {
        return Err(Error::Shape(format!(
            "input dimension {} does not match generator dimension {d}",
            input.dim()
        )));
    }
    let (blocks, copies) = match cfg.backend {
        Backend::Exact => {
            check_dimension(d)?;
            (exact_blocks(&gen.hamiltonian(), input, cfg)?, 0)
        }
        Backend::SwapChannel => {
            check_dimension(cfg.outcomes() * d * d)?;
            swap_blocks(gen, input, cfg)?
        }
    };
    let bins = blocks
        .into_iter()
        .enumerate()
        .filter_map(|(k, block)| {
            let mass = block.trace().re;
            (mass > MASS_FLOOR).then(|| {
                Ok(Bin { outcome: k, estimate: cfg.estimate_for(k), mass, state: conditional_state(block, mass)? })
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = bins.iter().map(|b| b.mass).sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::Invariant(format!("outcome probabilities sum to {total}")));
    }
    Ok(SpectralEstimate { config: *cfg, bins, copies_consumed: copies })
}

/// Normalizes a diagonal ancilla block, clipping rounding-level negative
/// eigenvalues that survive the division by a small mass.
fn conditional_state(block: ComplexMatrix, mass: f64) -> Result<DensityMatrix> {
    let mut m = block.scale_real(1.0 / mass);
    m.hermitize();
    if let Ok(state) = DensityMatrix::new(m.clone()) {
        return Ok(state);
    }
    let decomp = hermitian_eig(&m)?;
    let kept: f64 = decomp.eigenvalues().iter().map(|x| x.max(0.0)).sum();
    let mut clipped = decomp.map_spectrum(|x| Complex64::new(x.max(0.0) / kept, 0.0));
    clipped.hermitize();
    DensityMatrix::new(clipped)
}

/// Unnormalized conditional target states, one per outcome, from state-vector
/// phase estimation on each eigenvector of `input`.
fn exact_blocks(h: &ComplexMatrix, input: &DensityMatrix, cfg: &QpeConfig) -> Result<Vec<ComplexMatrix>> {
    let d = h.rows();
    let n = cfg.outcomes();
    let powers = (0..cfg.ancilla_bits)
        .map(|j| matrix_exponential_oracle(h, (1u64 << j) as f64 * cfg.base_time))
        .collect::<Result<Vec<_>>>()?;

    let mut blocks = vec![ComplexMatrix::zeros(d, d); n];
    let ensemble = hermitian_eig(input.matrix())?;
    let amp = 1.0 / (n as f64).sqrt();
    for (&p, psi) in ensemble.eigenvalues().iter().zip(ensemble.eigenvectors()) {
        if p <= tol::DEGENERACY_GAP {
            continue;
        }
        let mut reg: Vec<Complex64> = (0..n)
            .flat_map(|_| psi.amplitudes().iter().map(move |a| a * amp))
            .collect();
        for (j, u) in powers.iter().enumerate() {
            let bit = 1usize << j;
            for x in (0..n).filter(|x| x & bit != 0) {
                let slot = &mut reg[x * d..(x + 1) * d];
                let moved = u.mat_vec(slot);
                slot.copy_from_slice(&moved);
            }
        }
        apply_readout_transform(&mut reg, cfg.ancilla_bits, d);
        for (k, block) in blocks.iter_mut().enumerate() {
            let v = &reg[k * d..(k + 1) * d];
            for a in 0..d {
                let va = v[a] * p;
                for b in 0..d {
                    block[(a, b)] += va * v[b].conj();
                }
            }
        }
    }
    Ok(blocks)
}

/// Density-matrix phase estimation where every controlled power is a run of
/// controlled partial swaps, each consuming one fresh copy.
fn swap_blocks(gen: &Generator<'_>, input: &DensityMatrix, cfg: &QpeConfig) -> Result<(Vec<ComplexMatrix>, u64)> {
    let d = gen.dim();
    let n = cfg.outcomes();
    let dim = n * d;
    let mut omega = ComplexMatrix::from_fn(dim, dim, |r, c| input.matrix()[(r % d, c % d)] / n as f64);

    let per_base = cfg.steps_per_base_power();
    let dt = cfg.base_time / per_base as f64;
    let mut scratch = Vec::new();
    let mut copies = 0u64;
    for j in 0..cfg.ancilla_bits {
        let control = 1usize << j;
        for _ in 0..(per_base << j) {
            for (rho, w) in &gen.terms {
                controlled_partial_swap(&mut omega, rho.matrix(), control, w * dt, &mut scratch);
                copies += 1;
            }
            if gen.offset != 0.0 {
                controlled_phase(&mut omega, d, control, -gen.offset * dt);
            }
        }
    }

    transform_both_sides(&mut omega, cfg.ancilla_bits, d);
    let blocks = (0..n)
        .map(|k| ComplexMatrix::from_fn(d, d, |a, b| omega[(k * d + a, k * d + b)]))
        .collect();
    let per_term = copies / gen.terms.len() as u64;
    if per_term != cfg.swap_copy_count() {
        return Err(Error::Invariant(format!(
            "consumed {per_term} copies per term, expected {}",
            cfg.swap_copy_count()
        )));
    }
    Ok((blocks, copies))
}

/// One controlled partial swap on the joint (ancilla ⊗ target) state:
/// `Ω ↦ tr_copy[V (Ω ⊗ ρ) V†]` with `V = |0⟩⟨0|⊗I + |1⟩⟨1|⊗e^{-iSΔt}` on the
/// control bit, `S` exchanging target and copy.
pub(crate) fn controlled_partial_swap(
    omega: &mut ComplexMatrix,
    copy: &ComplexMatrix,
    control: usize,
    dt: f64,
    scratch: &mut Vec<Complex64>,
) {
    let d = copy.rows();
    let dim = omega.rows();
    let big = dim * d;
    let (c, s) = (dt.cos(), dt.sin());

    // M = Ω ⊗ ρ, index (x, t, p) = (x·d + t)·d + p
    scratch.clear();
    scratch.resize(big * big, ZERO);
    for r in 0..dim {
        for col in 0..dim {
            let w = omega[(r, col)];
            if w == ZERO {
                continue;
            }
            for p in 0..d {
                let base = (r * d + p) * big + col * d;
                for (q, rho_pq) in copy.row(p).iter().enumerate() {
                    scratch[base + q] = w * rho_pq;
                }
            }
        }
    }

    let controlled = |index: usize| (index / (d * d)) & control != 0;
    // swap partner of (x, t, p) is (x, p, t)
    let partner = |index: usize| {
        let x = index / (d * d);
        let t = (index / d) % d;
        let p = index % d;
        (x * d + p) * d + t
    };
    let diag_factor_left = Complex64::new(c, -s);
    let diag_factor_right = Complex64::new(c, s);
    let mis = -I * s;
    let pis = I * s;

    // rows: V·M
    for r1 in (0..big).filter(|&r| controlled(r)) {
        let r2 = partner(r1);
        if r2 == r1 {
            for z in &mut scratch[r1 * big..(r1 + 1) * big] {
                *z *= diag_factor_left;
            }
        } else if r1 < r2 {
            for col in 0..big {
                let a = scratch[r1 * big + col];
                let b = scratch[r2 * big + col];
                scratch[r1 * big + col] = a * c + b * mis;
                scratch[r2 * big + col] = b * c + a * mis;
            }
        }
    }
    // columns: (V·M)·V†
    for c1 in (0..big).filter(|&c| controlled(c)) {
        let c2 = partner(c1);
        if c2 == c1 {
            for row in 0..big {
                scratch[row * big + c1] *= diag_factor_right;
            }
        } else if c1 < c2 {
            for row in 0..big {
                let a = scratch[row * big + c1];
                let b = scratch[row * big + c2];
                scratch[row * big + c1] = a * c + b * pis;
                scratch[row * big + c2] = b * c + a * pis;
            }
        }
    }

    // trace out the copy
    for r in 0..dim {
        for col in 0..dim {
            let mut acc = ZERO;
            for p in 0..d {
                acc += scratch[(r * d + p) * big + col * d + p];
            }
            omega[(r, col)] = acc;
        }
    }
    omega.hermitize();
}

/// Controlled `e^{-iθ}` on the given ancilla bit.
fn controlled_phase(omega: &mut ComplexMatrix, d: usize, control: usize, theta: f64) {
    let dim = omega.rows();
    let phase = Complex64::from_polar(1.0, theta);
    for r in 0..dim {
        let rc = (r / d) & control != 0;
        for col in 0..dim {
            let cc = (col / d) & control != 0;
            match (rc, cc) {
                (true, false) => omega[(r, col)] *= phase,
                (false, true) => omega[(r, col)] *= phase.conj(),
                _ => {}
            }
        }
    }
}

/// `Ω ↦ W Ω W†` for the ancilla readout transform `W`.
fn transform_both_sides(omega: &mut ComplexMatrix, bits: u32, d: usize) {
    let dim = omega.rows();
    let mut buf = vec![ZERO; dim];
    for col in 0..dim {
        for r in 0..dim {
            buf[r] = omega[(r, col)];
        }
        apply_readout_transform(&mut buf, bits, d);
        for r in 0..dim {
            omega[(r, col)] = buf[r];
        }
    }
    for r in 0..dim {
        for col in 0..dim {
            buf[col] = omega[(r, col)].conj();
        }
        apply_readout_transform(&mut buf, bits, d);
        for col in 0..dim {
            omega[(r, col)] = buf[col].conj();
        }
    }
}
