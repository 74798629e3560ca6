//! Dense complex-matrix kernel: register shapes, states, norms, the Löwner
//! order and Hermitian spectral decompositions.
//!
//! Index layout: a [`RegisterShape`] lists subsystems in declaration order and
//! the first subsystem is the most significant digit of a row/column index.
//! `tensor(a, b)` therefore places `a` on the earlier subsystem, matching
//! `nalgebra`'s Kronecker product.

mod io;
pub(crate) mod ops;
pub mod random;
mod shape;
mod state;

pub use io::MatrixFile;
pub use ops::{
    dagger, eig_hermitian, embed_operator, hermitian_part, hermiticity_defect, identity, is_projector, lambda_max,
    lambda_min, loewner_leq, matrix_function, partial_trace_op, pinv_sqrt, positive_part, projector_onto, reorder,
    spectral_norm, sqrt_psd, tensor, trace_norm, trace_re, zero_entropy, Eigen,
};
pub use shape::RegisterShape;
pub use state::{partial_trace, trace_distance, DensityOperator, StateVector};

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense complex matrix, row/column indices laid out per [`RegisterShape`].
pub type CMatrix = DMatrix<Complex64>;

/// Numerical tolerances shared across modules.
pub mod tol {
    /// Hermiticity and positivity checks.
    pub const HERMITIAN: f64 = 1e-10;
    pub const PSD: f64 = 1e-10;
    /// Trace normalization of density operators.
    pub const TRACE: f64 = 1e-10;
    /// Normalization of state vectors.
    pub const STATE_NORM: f64 = 1e-12;
    /// Equality comparisons between computed quantities.
    pub const EQ: f64 = 1e-9;
    /// Default eigenvalue cutoff for rank and support computations.
    pub const RANK: f64 = 1e-8;
}

/// Default cap on the total dimension of any register shape.
pub const DEFAULT_DIM_CAP: usize = 256;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
