use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use super::ops::{eig_unchecked, hermitian_part, hermiticity_defect, partial_trace_op, trace_norm};
use super::{tol, CMatrix, RegisterShape};
use crate::error::{Error, Result};

/// Normalized pure state on a register shape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateVector {
    shape: RegisterShape,
    #[serde(serialize_with = "ser_cvec")]
    amplitudes: DVector<Complex64>,
}

fn ser_cvec<S: serde::Serializer>(v: &DVector<Complex64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
    pairs.serialize(s)
}

impl StateVector {
    pub fn new(shape: RegisterShape, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != shape.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dimension {}",
                amplitudes.len(),
                shape.dim()
            )));
        }
        let n2 = amplitudes.norm_squared();
        if (n2 - 1.0).abs() > tol::STATE_NORM {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { shape, amplitudes })
    }

    /// Normalizes `amplitudes` first; fails only on the zero vector.
    pub fn normalized(shape: RegisterShape, amplitudes: DVector<Complex64>) -> Result<Self> {
        let n = amplitudes.norm();
        if n == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(shape, amplitudes.unscale(n))
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn to_density(&self) -> DensityOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator {
            shape: self.shape.clone(),
            matrix: hermitian_part(&m),
        }
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// Positive semidefinite, unit-trace operator on a register shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    shape: RegisterShape,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, positivity and trace at the module tolerances
    /// and stores the exactly Hermitian part.
    pub fn new(shape: RegisterShape, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != shape.dim() || matrix.ncols() != shape.dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix {:?} for dimension {}",
                matrix.shape(),
                shape.dim()
            )));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > tol::HERMITIAN {
            return Err(Error::NotHermitian(defect));
        }
        let matrix = hermitian_part(&matrix);
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > tol::TRACE {
            return Err(Error::InvalidTrace(tr));
        }
        let min = eig_unchecked(&matrix).values.last().copied().unwrap_or(0.0);
        if min < -tol::PSD {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { shape, matrix })
    }

    /// Rescales a PSD matrix to unit trace before validating.
    pub fn from_unnormalized(shape: RegisterShape, matrix: CMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidTrace(tr));
        }
        Self::new(shape, matrix.unscale(tr))
    }

    pub fn maximally_mixed(shape: RegisterShape) -> Self {
        let d = shape.dim();
        Self {
            shape,
            matrix: CMatrix::identity(d, d).unscale(d as f64),
        }
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn reduced(&self, keep: &[&str]) -> Result<DensityOperator> {
        partial_trace(self, keep)
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        Ok(Self {
            shape: self.shape.join(&other.shape)?,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// Convex combination `Σ p_i ρ_i` of states sharing a shape.
    pub fn mix(parts: &[(f64, &DensityOperator)]) -> Result<DensityOperator> {
        let first = parts.first().ok_or_else(|| Error::Input("empty mixture".into()))?.1;
        let mut m = CMatrix::zeros(first.dim(), first.dim());
        for (p, rho) in parts {
            if rho.shape != first.shape {
                return Err(Error::DimensionMismatch("mixture of different shapes".into()));
            }
            m += rho.matrix.scale(*p);
        }
        Self::new(first.shape.clone(), m)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_unchecked(&self.matrix).values
    }
}

/// Reduced state on the subsystems in `keep`.
pub fn partial_trace(rho: &DensityOperator, keep: &[&str]) -> Result<DensityOperator> {
    let (m, shape) = partial_trace_op(&rho.matrix, &rho.shape, keep)?;
    Ok(DensityOperator {
        shape,
        matrix: hermitian_part(&m),
    })
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.shape != sigma.shape {
        return Err(Error::DimensionMismatch(
            "trace distance between different shapes".into(),
        ));
    }
    Ok((0.5 * trace_norm(&(&rho.matrix - &sigma.matrix))).clamp(0.0, 1.0))
}
