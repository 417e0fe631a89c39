//! Dense complex linear algebra: matrices, states, tensor products, partial
//! traces, Hermitian eigendecomposition, exponentials and distances.

mod eig;
pub mod io;
mod matrix;
mod ops;
mod states;

pub use eig::{hermitian_eig, hermitian_eigenvalues, matrix_exponential_oracle, SpectralDecomposition};
pub use matrix::ComplexMatrix;
pub(crate) use matrix::{I, ONE, ZERO};
pub use ops::{
    check_dimension, dimension_cap, partial_trace, set_dimension_cap, swap_operator, tensor,
    tensor_capped, trace_distance, trace_norm, Subsystem, DEFAULT_DIMENSION_CAP,
};
pub(crate) use states::{inner, l2_norm};
pub use states::{tol, DensityMatrix, PureState};
