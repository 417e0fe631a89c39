use std::sync::atomic::{AtomicUsize, Ordering};

use super::eig::hermitian_eigenvalues;
use super::matrix::{ComplexMatrix, ONE};
use super::states::DensityMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_DIMENSION_CAP: usize = 4096;

static DIMENSION_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DIMENSION_CAP);

/// Largest total Hilbert-space dimension any operation may build.
pub fn dimension_cap() -> usize {
    DIMENSION_CAP.load(Ordering::Relaxed)
}

pub fn set_dimension_cap(cap: usize) {
    DIMENSION_CAP.store(cap.max(1), Ordering::Relaxed);
}

pub fn check_dimension(requested: usize) -> Result<()> {
    check_dimension_against(requested, dimension_cap())
}

pub(crate) fn check_dimension_against(requested: usize, cap: usize) -> Result<()> {
    if requested > cap {
        Err(Error::DimensionLimit { requested, cap })
    } else {
        Ok(())
    }
}

/// Which tensor factor to trace out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Kronecker product `a ⊗ b`, subject to the global dimension cap.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    tensor_capped(a, b, dimension_cap())
}

pub fn tensor_capped(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    let rows = a
        .rows()
        .checked_mul(b.rows())
        .ok_or(Error::DimensionLimit { requested: usize::MAX, cap })?;
    let cols = a
        .cols()
        .checked_mul(b.cols())
        .ok_or(Error::DimensionLimit { requested: usize::MAX, cap })?;
    check_dimension_against(rows.max(cols), cap)?;
    let (br, bc) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a[(i, j)];
            for k in 0..br {
                let dst = (i * br + k) * cols + j * bc;
                let src = b.row(k);
                for (o, bkl) in out.as_mut_slice()[dst..dst + bc].iter_mut().zip(src) {
                    *o = aij * bkl;
                }
            }
        }
    }
    Ok(out)
}

/// Partial trace of an operator on `d_a ⊗ d_b` over the chosen factor.
pub fn partial_trace(
    m: &ComplexMatrix,
    subsystem: Subsystem,
    d_a: usize,
    d_b: usize,
) -> Result<ComplexMatrix> {
    let n = d_a * d_b;
    if m.rows() != n || m.cols() != n {
        return Err(Error::Shape(format!(
            "partial trace over {d_a}x{d_b} needs a {n}x{n} matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(match subsystem {
        Subsystem::First => ComplexMatrix::from_fn(d_b, d_b, |k, l| {
            (0..d_a).map(|i| m[(i * d_b + k, i * d_b + l)]).sum()
        }),
        Subsystem::Second => ComplexMatrix::from_fn(d_a, d_a, |i, j| {
            (0..d_b).map(|k| m[(i * d_b + k, j * d_b + k)]).sum()
        }),
    })
}

/// Swap operator on `d ⊗ d`: `S|i⟩|j⟩ = |j⟩|i⟩`.
pub fn swap_operator(d: usize) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::Shape("swap operator needs d >= 1".into()));
    }
    let n = d.checked_mul(d).ok_or(Error::DimensionLimit {
        requested: usize::MAX,
        cap: dimension_cap(),
    })?;
    check_dimension(n)?;
    let mut s = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = ONE;
        }
    }
    Ok(s)
}

/// `‖m‖₁`, the sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.iter().map(|x| x.abs()).sum())
}

/// `½‖a − b‖₁`
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!("dimensions differ: {} vs {}", a.dim(), b.dim())));
    }
    let diff = a.matrix() - b.matrix();
    Ok((0.5 * trace_norm(&diff)?).clamp(0.0, 1.0))
}
