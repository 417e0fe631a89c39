//! Channels and their Choi states.
//!
//! A channel is held as Kraus operators. Its Choi state
//! `(1/d) Σ_ij |i⟩⟨j| ⊗ 𝒮(|i⟩⟨j|)` is what half of `|Φ⟩ = d^{-1/2} Σ_i |ii⟩`
//! becomes after passing through the channel, and its principal components
//! come from the same self-tomography as any other state.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::io::{matrix_from_json, matrix_to_json, EntriesJson};
use crate::linalg::{check_dimension, hermitian_eig, ComplexMatrix, DensityMatrix, ONE, ZERO};
use crate::qpca::{principal_components, PrincipalComponents, QpeConfig};

const COMPLETENESS_TOL: f64 = 1e-9;
const KRAUS_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct QuantumChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    dim: usize,
    kraus: Vec<EntriesJson>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = kraus.first().ok_or_else(|| Error::Validation("channel needs a Kraus operator".into()))?.rows();
        if kraus.iter().any(|k| k.rows() != dim || k.cols() != dim) {
            return Err(Error::Shape(format!("Kraus operators must all be {dim}×{dim}")));
        }
        let sum = kraus.iter().fold(ComplexMatrix::zeros(dim, dim), |acc, k| &acc + &k.adjoint().dot(k));
        let defect = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if defect > COMPLETENESS_TOL {
            return Err(Error::Validation(format!("Kraus operators are not complete (defect {defect:.3e})")));
        }
        Ok(Self { dim, kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, kraus: vec![ComplexMatrix::identity(dim)] }
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Completely depolarizing channel `ρ ↦ I/d`, Kraus operators `X^a Z^b / d`
    /// (the Pauli matrices over 2 for qubits).
    pub fn depolarizing(dim: usize) -> Self {
        let omega = |k: usize| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / dim as f64);
        let scale = 1.0 / dim as f64;
        let kraus = (0..dim)
            .flat_map(|a| {
                (0..dim).map(move |b| {
                    // X^a Z^b |j⟩ = ω^{bj} |j + a⟩
                    ComplexMatrix::from_fn(dim, dim, |r, c| {
                        if r == (c + a) % dim {
                            omega(b * c % dim) * scale
                        } else {
                            ZERO
                        }
                    })
                })
            })
            .collect();
        Self { dim, kraus }
    }

    /// Qubit dephasing: `Z` applied with probability `p`.
    pub fn dephasing(p: f64) -> Result<Self> {
        check_probability(p)?;
        Self::new(vec![
            ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
            ComplexMatrix::diag(&[1.0, -1.0]).scale_real(p.sqrt()),
        ])
    }

    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        check_probability(gamma)?;
        Self::new(vec![
            ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - gamma).sqrt()]])?,
            ComplexMatrix::from_real_rows(&[&[0.0, gamma.sqrt()], &[0.0, 0.0]])?,
        ])
    }

    /// Convex combination `Σ_i w_i 𝒮_i`.
    pub fn mixture(parts: &[(f64, &QuantumChannel)]) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > COMPLETENESS_TOL {
            return Err(Error::Validation("mixture weights must be nonnegative and sum to 1".into()));
        }
        let kraus = parts
            .iter()
            .filter(|(w, _)| *w > 0.0)
            .flat_map(|(w, ch)| ch.kraus.iter().map(move |k| k.scale_real(w.sqrt())))
            .collect();
        Self::new(kraus)
    }

    /// Canonical Kraus operators from the eigendecomposition of a Choi state.
    pub fn from_choi(choi: &DensityMatrix) -> Result<Self> {
        let d2 = choi.dim();
        let dim = (d2 as f64).sqrt().round() as usize;
        if dim * dim != d2 {
            return Err(Error::Shape(format!("Choi state dimension {d2} is not a square")));
        }
        let eig = hermitian_eig(choi.matrix())?;
        let kraus = eig
            .eigenvalues()
            .iter()
            .zip(eig.eigenvectors())
            .filter(|(&lambda, _)| lambda > KRAUS_FLOOR)
            .map(|(&lambda, v)| {
                let scale = (dim as f64 * lambda).sqrt();
                ComplexMatrix::from_fn(dim, dim, |a, i| v.amplitudes()[i * dim + a] * scale)
            })
            .collect();
        Self::new(kraus)
    }

    /// Channel from its matrix on row-major `vec(ρ)` (`vec(ρ)[a·d + b] = ρ_ab`).
    pub fn from_superoperator(s: &ComplexMatrix) -> Result<Self> {
        let d2 = s.rows();
        let dim = (d2 as f64).sqrt().round() as usize;
        if !s.is_square() || dim * dim != d2 {
            return Err(Error::Shape("superoperator must be d²×d²".into()));
        }
        let mut choi = ComplexMatrix::from_fn(d2, d2, |r, c| {
            let (i, a) = (r / dim, r % dim);
            let (j, b) = (c / dim, c % dim);
            s[(a * dim + b, i * dim + j)] / dim as f64
        });
        choi.hermitize();
        Self::from_choi(&DensityMatrix::new(choi)?)
    }

    pub fn superoperator(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d * d, d * d);
        for k in &self.kraus {
            let kc = k.conj();
            for r in 0..d * d {
                let (a, b) = (r / d, r % d);
                for c in 0..d * d {
                    let (i, j) = (c / d, c % d);
                    out[(r, c)] += k[(a, i)] * kc[(b, j)];
                }
            }
        }
        out
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let json: ChannelJson = serde_json::from_str(text)?;
        let kraus = json.kraus.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
        if kraus.iter().any(|k| k.rows() != json.dim) {
            return Err(Error::Format(format!("Kraus operators do not match dim {}", json.dim)));
        }
        Self::new(kraus)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse_json(&fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let kraus = self.kraus.iter().map(matrix_to_json).collect::<Result<Vec<_>>>()?;
        Ok(serde_json::to_string_pretty(&ChannelJson { dim: self.dim, kraus })?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `Σ_k K_k X K_k†` for any operator `X`.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, k| &acc + &k.dot(x).dot(&k.adjoint()))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let mut out = self.apply_operator(rho.matrix());
        out.hermitize();
        DensityMatrix::new(out)
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Validation(format!("probability {p} outside [0, 1]")))
    }
}

/// `(1/d) Σ_ij |i⟩⟨j| ⊗ 𝒮(|i⟩⟨j|)`
pub fn choi_state(ch: &QuantumChannel) -> Result<DensityMatrix> {
    let d = ch.dim();
    check_dimension(d * d)?;
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let mut e = ComplexMatrix::zeros(d, d);
            e[(i, j)] = ONE;
            let image = ch.apply_operator(&e);
            for a in 0..d {
                for b in 0..d {
                    out[(i * d + a, j * d + b)] = image[(a, b)] / d as f64;
                }
            }
        }
    }
    out.hermitize();
    DensityMatrix::new(out)
}

/// Self-tomography of the Choi state, components in descending eigenvalue order.
pub fn channel_principal_components(
    ch: &QuantumChannel,
    cfg: &QpeConfig,
    top_k: usize,
) -> Result<PrincipalComponents> {
    let mut pcs = principal_components(&choi_state(ch)?, cfg, top_k)?;
    pcs.components.sort_by(|a, b| b.estimate.total_cmp(&a.estimate));
    Ok(pcs)
}
