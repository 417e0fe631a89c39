use num_complex::Complex64;

use super::eig::hermitian_eigenvalues;
use super::matrix::{ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// Numerical tolerances shared by the validators.
pub mod tol {
    pub const HERMITIAN: f64 = 1e-9;
    pub const TRACE: f64 = 1e-9;
    pub const NORM: f64 = 1e-9;
    pub const PSD: f64 = 1e-8;
    pub const ORTHONORMAL: f64 = 1e-8;
    pub const RECONSTRUCTION: f64 = 1e-8;
    /// Eigenvalues closer than this are one degenerate cluster.
    pub const DEGENERACY_GAP: f64 = 1e-10;
}

/// Unit-norm state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Shape("empty state vector".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("non-finite amplitude".into()));
        }
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > tol::NORM {
            return Err(Error::Validation(format!("state norm is {norm}, expected 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::Validation("cannot normalize a zero or non-finite vector".into()));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(amplitudes)
    }

    pub(crate) fn from_raw(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = vec![ZERO; dim];
        v[index] = ONE;
        Self { amplitudes: v }
    }

    /// `|+⟩ = (|0⟩ + |1⟩)/√2`
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_raw(vec![Complex64::new(h, 0.0); 2])
    }

    /// `|−⟩ = (|0⟩ − |1⟩)/√2`
    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_raw(vec![Complex64::new(h, 0.0), Complex64::new(-h, 0.0)])
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &PureState) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(self.projector())
    }

    /// `⟨self|m|self⟩`
    pub fn expectation(&self, m: &ComplexMatrix) -> Complex64 {
        inner(&self.amplitudes, &m.mat_vec(&self.amplitudes))
    }
}

/// Hermitian, positive semi-definite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity before wrapping.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        validate_density(&matrix)?;
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn from_real_diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::diag(probabilities))
    }

    /// `I/d`
    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `tr(ρ M)`
    pub fn expectation(&self, m: &ComplexMatrix) -> Complex64 {
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.matrix[(i, k)] * m[(k, i)];
            }
        }
        acc
    }

    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨ψ|ρ|ψ⟩`
    pub fn fidelity_with_pure(&self, psi: &PureState) -> f64 {
        psi.expectation(&self.matrix).re
    }

    pub fn is_valid(&self) -> bool {
        validate_density(&self.matrix).is_ok()
    }
}

pub(crate) fn validate_density(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::Shape(format!(
            "density matrix must be square and non-empty, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let herm = m.hermiticity_error();
    if herm > tol::HERMITIAN {
        return Err(Error::Validation(format!("not Hermitian (deviation {herm:e})")));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > tol::TRACE || tr.im.abs() > tol::TRACE {
        return Err(Error::Validation(format!("trace is {tr}, expected 1")));
    }
    let min = hermitian_eigenvalues(m)?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if min < -tol::PSD {
        return Err(Error::Validation(format!(
            "not positive semi-definite (min eigenvalue {min:e})"
        )));
    }
    Ok(())
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_trace() {
        let err = DensityMatrix::from_real_diagonal(&[0.5, 0.6]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let err = DensityMatrix::from_real_diagonal(&[1.1, -0.1]).unwrap_err();
        assert!(err.to_string().contains("positive"));
    }

    #[test]
    fn tolerates_rounding_noise() {
        DensityMatrix::from_real_diagonal(&[1.0 + 1e-12, -1e-12]).unwrap();
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]).unwrap();
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn pure_state_norm_checked() {
        assert!(PureState::new(vec![ONE, ONE]).is_err());
        let s = PureState::normalized(vec![ONE, ONE]).unwrap();
        assert!((s.fidelity(&PureState::plus()) - 1.0).abs() < 1e-15);
        assert!(PureState::normalized(vec![ZERO; 3]).is_err());
    }
}
