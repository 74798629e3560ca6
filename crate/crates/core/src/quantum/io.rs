use serde::{Deserialize, Serialize};

use super::{c, CMatrix, DensityOperator, RegisterShape};
use crate::error::{Error, Result};

/// JSON payload `{"shape": [["A",2],["B",2]], "re": [[..]], "im": [[..]]}`.
/// `shape` may be omitted for operators that are not tied to registers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<RegisterShape>,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(shape: Option<RegisterShape>, m: &CMatrix) -> Self {
        let re = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect())
            .collect();
        let im = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect())
            .collect();
        Self { shape, re, im }
    }

    pub fn from_density(rho: &DensityOperator) -> Self {
        Self::from_matrix(Some(rho.shape().clone()), rho.matrix())
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, Vec::len);
        if self.re.iter().any(|r| r.len() != cols) {
            return Err(Error::Input("ragged `re` rows".into()));
        }
        let im_present = !self.im.is_empty();
        if im_present && (self.im.len() != rows || self.im.iter().any(|r| r.len() != cols)) {
            return Err(Error::Input("`im` does not match `re` dimensions".into()));
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| {
            c(self.re[i][j], if im_present { self.im[i][j] } else { 0.0 })
        }))
    }

    /// Validates against the density-operator invariants.
    pub fn to_density(&self) -> Result<DensityOperator> {
        let shape = self
            .shape
            .clone()
            .ok_or_else(|| Error::Input("state file needs a `shape`".into()))?;
        DensityOperator::new(shape, self.to_matrix()?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
