//! Hermitian eigensolver (cyclic complex Jacobi) and the functions built on it.
//!
//! Jacobi rotations are slow for large matrices but converge to full double
//! precision on every Hermitian input, including badly degenerate ones. The
//! simulator never goes beyond a few hundred rows.

use std::ops::Range;

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use super::states::{tol, PureState};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in descending order with orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<PureState>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[PureState] {
        &self.eigenvectors
    }

    /// `Σ_i λ_i |v_i⟩⟨v_i|`
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| Complex64::new(x, 0.0))
    }

    /// `Σ_i f(λ_i) |v_i⟩⟨v_i|`
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(*lambda);
            let a = v.amplitudes();
            for i in 0..n {
                let wi = w * a[i];
                for j in 0..n {
                    out[(i, j)] += wi * a[j].conj();
                }
            }
        }
        out
    }

    /// Index ranges of eigenvalue clusters separated by more than `gap`.
    pub fn clusters(&self, gap: f64) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.dim() {
            if i == self.dim() || self.eigenvalues[i - 1] - self.eigenvalues[i] > gap {
                out.push(start..i);
                start = i;
            }
        }
        out
    }

    /// Projector onto the span of the eigenvectors in `range`.
    pub fn projector(&self, range: Range<usize>) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for v in &self.eigenvectors[range] {
            out = &out + &v.projector();
        }
        out
    }

    /// Projector onto the degenerate eigenspace whose eigenvalue is nearest `value`.
    pub fn eigenspace_near(&self, value: f64) -> ComplexMatrix {
        let clusters = self.clusters(tol::DEGENERACY_GAP);
        let best = clusters
            .into_iter()
            .min_by(|a, b| {
                let da = (self.eigenvalues[a.start] - value).abs();
                let db = (self.eigenvalues[b.start] - value).abs();
                da.total_cmp(&db)
            })
            .expect("non-empty decomposition");
        self.projector(best)
    }

    /// True when any two eigenvalues fall within the degeneracy gap.
    pub fn has_degeneracy(&self) -> bool {
        self.clusters(tol::DEGENERACY_GAP).iter().any(|r| r.len() > 1)
    }
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let n = check_hermitian(h)?;
    let mut a = h.clone();
    a.hermitize();
    let mut v = ComplexMatrix::identity(n);
    jacobi(&mut a, Some(&mut v));

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));

    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = order
        .iter()
        .map(|&j| {
            let mut col = v.column(j);
            fix_phase(&mut col);
            PureState::from_raw(col)
        })
        .collect();
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    let mut a = h.clone();
    a.hermitize();
    jacobi(&mut a, None);
    let mut vals: Vec<f64> = (0..a.rows()).map(|i| a[(i, i)].re).collect();
    vals.sort_by(|x, y| y.total_cmp(x));
    Ok(vals)
}

/// `e^{-iht}` by full eigendecomposition of `h`.
pub fn matrix_exponential_oracle(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let decomp = hermitian_eig(h)?;
    Ok(decomp.map_spectrum(|lambda| Complex64::from_polar(1.0, -lambda * t)))
}

fn check_hermitian(h: &ComplexMatrix) -> Result<usize> {
    if !h.is_square() {
        return Err(Error::Shape(format!("{}x{} matrix is not square", h.rows(), h.cols())));
    }
    let herm = h.hermiticity_error();
    if herm > tol::HERMITIAN {
        return Err(Error::Validation(format!("matrix is not Hermitian (deviation {herm:e})")));
    }
    Ok(h.rows())
}

/// Largest-magnitude component (first on ties) made real positive.
fn fix_phase(v: &mut [Complex64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max - 1e-12)
        .expect("max exists");
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}

/// Diagonalizes `a` in place; accumulates rotations into `v` when given.
fn jacobi(a: &mut ComplexMatrix, mut v: Option<&mut ComplexMatrix>) {
    let n = a.rows();
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut prev_off = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        // stop at the rounding floor
        if off.sqrt() <= 1e-16 * scale || (off.sqrt() <= 1e-13 * scale && off >= prev_off) {
            break;
        }
        prev_off = off;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * b);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let e = apq / b;
                rotate(a, p, q, c, s, e);
                if let Some(v) = v.as_deref_mut() {
                    rotate_columns(v, p, q, c, s, e);
                }
            }
        }
    }
}

// A ← J† A J with J = [[c, s·e], [−s·ē, c]] on the (p, q) plane.
fn rotate(a: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, e: Complex64) {
    let n = a.rows();
    rotate_columns(a, p, q, c, s, e);
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * e * s;
        a[(q, k)] = apk * e.conj() * s + aqk * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}

fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, e: Complex64) {
    for k in 0..m.rows() {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * c - mkq * e.conj() * s;
        m[(k, q)] = mkp * e * s + mkq * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::I;
    use crate::random::{seeded_hermitian, Seeded};

    #[test]
    fn maximally_mixed_qubit() {
        let d = hermitian_eig(&ComplexMatrix::diag(&[0.5, 0.5])).unwrap();
        assert_eq!(d.eigenvalues(), &[0.5, 0.5]);
        assert!(d.has_degeneracy());
    }

    #[test]
    fn diagonal_gives_basis_vectors() {
        let d = hermitian_eig(&ComplexMatrix::diag(&[0.25, 0.75])).unwrap();
        assert_eq!(d.eigenvalues(), &[0.75, 0.25]);
        assert_eq!(d.eigenvectors()[0], PureState::basis(2, 1));
        assert_eq!(d.eigenvectors()[1], PureState::basis(2, 0));
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut rng = Seeded::new(11);
        let h = seeded_hermitian(&mut rng, 8);
        let d = hermitian_eig(&h).unwrap();
        assert!((&d.reconstruct() - &h).frobenius_norm() <= 1e-10);
        for (i, vi) in d.eigenvectors().iter().enumerate() {
            for (j, vj) in d.eigenvectors().iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((vi.inner(vj) - expected).norm() < tol::ORTHONORMAL);
            }
        }
        assert!(d.eigenvalues().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn qubit_closed_form_eigenvalues() {
        // λ± = (a+d)/2 ± sqrt(((a−d)/2)² + |b|²)
        let mut rng = Seeded::new(3);
        for _ in 0..20 {
            let h = seeded_hermitian(&mut rng, 2);
            let a = h[(0, 0)].re;
            let dd = h[(1, 1)].re;
            let b = h[(0, 1)].norm();
            let mid = 0.5 * (a + dd);
            let rad = (0.25 * (a - dd) * (a - dd) + b * b).sqrt();
            let got = hermitian_eigenvalues(&h).unwrap();
            assert!((got[0] - (mid + rad)).abs() < 1e-10);
            assert!((got[1] - (mid - rad)).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| if i < j { I } else { ZERO });
        assert!(matches!(hermitian_eig(&m), Err(Error::Validation(_))));
    }

    #[test]
    fn phase_convention_is_deterministic() {
        let mut rng = Seeded::new(5);
        let h = seeded_hermitian(&mut rng, 5);
        let d = hermitian_eig(&h).unwrap();
        for v in d.eigenvectors() {
            let a = v.amplitudes();
            let max = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let pivot = a.iter().position(|z| z.norm() >= max - 1e-12).unwrap();
            assert!(a[pivot].im.abs() < 1e-15 && a[pivot].re > 0.0);
        }
    }

    #[test]
    fn exponential_zero_is_identity() {
        let u = matrix_exponential_oracle(&ComplexMatrix::zeros(3, 3), 1.7).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn exponential_phase_on_eigenbasis() {
        let u = matrix_exponential_oracle(&ComplexMatrix::diag(&[1.0, 0.0]), std::f64::consts::PI)
            .unwrap();
        let expected = ComplexMatrix::diag(&[-1.0, 1.0]);
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }
}
