use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{identity, lambda_min, spectral_norm, tol, CMatrix, DensityOperator, MatrixFile, RegisterShape};

/// Positive operators on one register summing to the identity.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "PovmFile", try_from = "PovmFile")]
pub struct Povm {
    shape: RegisterShape,
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(shape: RegisterShape, elements: Vec<CMatrix>) -> Result<Self> {
        let d = shape.dim();
        if elements.is_empty() {
            return Err(Error::Input("a POVM needs at least one element".into()));
        }
        let mut sum = CMatrix::zeros(d, d);
        for e in &elements {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "POVM element is {}x{}, register has dimension {d}",
                    e.nrows(),
                    e.ncols()
                )));
            }
            let low = lambda_min(e)?;
            if low < -tol::PSD {
                return Err(Error::NotPsd(low));
            }
            sum += e;
        }
        let defect = spectral_norm(&(sum - identity(d)));
        if defect > tol::EQ {
            return Err(Error::NotComplete(defect));
        }
        Ok(Self { shape, elements })
    }

    /// Projective measurement in the columns of a unitary.
    pub fn from_basis(shape: RegisterShape, basis: &CMatrix) -> Result<Self> {
        let elements = (0..basis.ncols())
            .map(|k| {
                let v = basis.column(k);
                v * v.adjoint()
            })
            .collect();
        Self::new(shape, elements)
    }

    pub fn computational(shape: RegisterShape) -> Result<Self> {
        let d = shape.dim();
        Self::from_basis(shape, &identity(d))
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }
}

#[derive(Serialize, Deserialize)]
struct PovmFile {
    shape: RegisterShape,
    elements: Vec<MatrixFile>,
}

impl From<Povm> for PovmFile {
    fn from(p: Povm) -> Self {
        let elements = p.elements.iter().map(|e| MatrixFile::from_matrix(None, e)).collect();
        Self {
            shape: p.shape,
            elements,
        }
    }
}

impl TryFrom<PovmFile> for Povm {
    type Error = Error;

    fn try_from(f: PovmFile) -> Result<Self> {
        let elements = f.elements.iter().map(MatrixFile::to_matrix).collect::<Result<_>>()?;
        Povm::new(f.shape, elements)
    }
}

/// Classical-quantum state `Σ_x P(x) |x⟩⟨x| ⊗ ρ_B^x`.
#[derive(Clone, Debug)]
pub struct CqState {
    labels: Vec<String>,
    weights: Vec<f64>,
    states: Vec<DensityOperator>,
}

impl CqState {
    pub fn new(labels: Vec<String>, weights: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        if labels.is_empty() || labels.len() != weights.len() || labels.len() != states.len() {
            return Err(Error::Input(
                "labels, weights and conditional states must be non-empty and aligned".into(),
            ));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        if let Some(w) = weights.iter().find(|w| **w < 0.0 || !w.is_finite()) {
            return Err(Error::Input(format!("invalid probability weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol::TRACE {
            return Err(Error::InvalidTrace(total));
        }
        let shape = states[0].shape();
        if states.iter().any(|s| s.shape() != shape) {
            return Err(Error::DimensionMismatch("conditional states differ in shape".into()));
        }
        Ok(Self {
            labels,
            weights,
            states,
        })
    }

    /// Uniform distribution over `states`, labelled `0, 1, ...`.
    pub fn uniform(states: Vec<DensityOperator>) -> Result<Self> {
        let k = states.len();
        let labels = (0..k).map(|i| i.to_string()).collect();
        Self::new(labels, vec![1.0 / k as f64; k], states)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    /// Score operators `P(x) ρ_B^x`.
    pub fn score_operators(&self) -> Vec<CMatrix> {
        self.weights
            .iter()
            .zip(&self.states)
            .map(|(w, s)| s.matrix() * crate::quantum::cr(*w))
            .collect()
    }

    pub fn shape(&self) -> &RegisterShape {
        self.states[0].shape()
    }
}
