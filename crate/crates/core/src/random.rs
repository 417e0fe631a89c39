//! Seeded generators for reproducible inputs and sampling.
//!
//! Everything draws from ChaCha20. Per-trial streams are derived from
//! `(seed, trial)` so trials can run in any order and still produce the
//! same draws.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, DensityMatrix, PureState};

pub struct Seeded {
    rng: ChaCha20Rng,
}

impl Seeded {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha20Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn complex_gaussian(&mut self) -> Complex64 {
        Complex64::new(self.gaussian(), self.gaussian())
    }

    pub fn complex_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex_gaussian())
    }
}

/// Uniform draw in `[0, 1)` for trial `trial` of a run seeded with `seed`.
pub fn trial_uniform(seed: u64, trial: u64) -> f64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng.random::<f64>()
}

/// Haar-random pure state.
pub fn seeded_pure_state(rng: &mut Seeded, dim: usize) -> PureState {
    let v = (0..dim).map(|_| rng.complex_gaussian()).collect();
    PureState::normalized(v).expect("gaussian vector is nonzero")
}

/// Random Hermitian matrix with Gaussian entries.
pub fn seeded_hermitian(rng: &mut Seeded, dim: usize) -> ComplexMatrix {
    let g = rng.complex_matrix(dim, dim);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Density matrix `GG†/tr(GG†)` with `G` a `dim × rank` Ginibre matrix.
pub fn seeded_density(rng: &mut Seeded, dim: usize, rank: usize) -> DensityMatrix {
    let g = rng.complex_matrix(dim, rank.max(1));
    let gg = g.dot(&g.adjoint());
    let tr = gg.trace().re;
    let mut m = gg.scale_real(1.0 / tr);
    m.hermitize();
    DensityMatrix::new(m).expect("Ginibre construction is a density matrix")
}

/// Haar-random unitary via Gram–Schmidt on Gaussian columns.
pub fn seeded_unitary(rng: &mut Seeded, dim: usize) -> ComplexMatrix {
    let g = rng.complex_matrix(dim, dim);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        for u in &cols {
            let overlap = crate::linalg::inner(u, &v);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= overlap * y;
            }
        }
        let norm = crate::linalg::l2_norm(&v);
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

/// Density matrix with the given spectrum in a random eigenbasis.
/// Missing eigenvalues are zero.
pub fn density_with_spectrum(rng: &mut Seeded, dim: usize, eigenvalues: &[f64]) -> DensityMatrix {
    let u = seeded_unitary(rng, dim);
    let mut diag = vec![0.0; dim];
    diag[..eigenvalues.len()].copy_from_slice(eigenvalues);
    let mut m = u.dot(&ComplexMatrix::diag(&diag)).dot(&u.adjoint());
    m.hermitize();
    DensityMatrix::new(m).expect("valid spectrum")
}

/// Kraus operators of a random channel: `count` blocks of an isometry
/// `C^d → C^{d·count}` cut from a Haar unitary.
pub fn seeded_kraus(rng: &mut Seeded, dim: usize, count: usize) -> Vec<ComplexMatrix> {
    let u = seeded_unitary(rng, dim * count);
    (0..count)
        .map(|k| ComplexMatrix::from_fn(dim, dim, |i, j| u[(k * dim + i, j)]))
        .collect()
}
