use serde::{Deserialize, Serialize};

use super::DEFAULT_DIM_CAP;
use crate::error::{Error, Result};

/// Ordered list of labelled subsystems. A subsystem of dimension 1 is an
/// "empty" register.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(String, usize)>", into = "Vec<(String, usize)>")]
pub struct RegisterShape {
    subsystems: Vec<(String, usize)>,
}

impl RegisterShape {
    pub fn new<S: Into<String>>(subsystems: Vec<(S, usize)>) -> Result<Self> {
        Self::with_cap(subsystems, DEFAULT_DIM_CAP)
    }

    pub fn with_cap<S: Into<String>>(subsystems: Vec<(S, usize)>, cap: usize) -> Result<Self> {
        let subsystems: Vec<(String, usize)> = subsystems.into_iter().map(|(l, d)| (l.into(), d)).collect();
        if subsystems.is_empty() {
            return Err(Error::Input("register shape needs at least one subsystem".into()));
        }
        let mut total: usize = 1;
        for (i, (label, dim)) in subsystems.iter().enumerate() {
            if *dim == 0 {
                return Err(Error::Input(format!("subsystem `{label}` has dimension 0")));
            }
            if subsystems[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
            total = total.saturating_mul(*dim);
        }
        if total > cap {
            return Err(Error::CapExceeded(format!("total dimension {total} > cap {cap}")));
        }
        Ok(Self { subsystems })
    }

    /// Single-subsystem shape.
    pub fn single(label: &str, dim: usize) -> Result<Self> {
        Self::new(vec![(label, dim)])
    }

    /// `count` qubits labelled `prefix0, prefix1, ...`.
    pub fn qubits(prefix: &str, count: usize) -> Result<Self> {
        Self::new((0..count).map(|i| (format!("{prefix}{i}"), 2)).collect())
    }

    pub fn dim(&self) -> usize {
        self.subsystems.iter().map(|(_, d)| d).product()
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn subsystems(&self) -> &[(String, usize)] {
        &self.subsystems
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.subsystems.iter().map(|(l, _)| l.as_str())
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.subsystems[self.index_of(label)?].1)
    }

    /// Product dimension of the named subsystems.
    pub fn dim_of_set(&self, labels: &[&str]) -> Result<usize> {
        labels.iter().try_fold(1usize, |acc, l| Ok(acc * self.dim_of(l)?))
    }

    /// Sub-shape restricted to `labels`, kept in declaration order. Returns
    /// the trivial shape `[("_", 1)]` when `labels` is empty.
    pub fn restrict(&self, labels: &[&str]) -> Result<Self> {
        for l in labels {
            self.index_of(l)?;
        }
        let kept: Vec<(String, usize)> = self
            .subsystems
            .iter()
            .filter(|(l, _)| labels.contains(&l.as_str()))
            .cloned()
            .collect();
        if kept.is_empty() {
            return Ok(Self {
                subsystems: vec![("_".to_string(), 1)],
            });
        }
        Ok(Self { subsystems: kept })
    }

    /// Labels not in `labels`, in declaration order.
    pub fn complement(&self, labels: &[&str]) -> Vec<&str> {
        self.labels().filter(|l| !labels.contains(l)).collect()
    }

    /// Digits of a flat index, most significant subsystem first.
    pub(crate) fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.subsystems.len()];
        for (slot, (_, d)) in out.iter_mut().zip(&self.subsystems).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    /// Concatenation `self ⊗ other`.
    pub fn join(&self, other: &RegisterShape) -> Result<Self> {
        let mut subs = self.subsystems.clone();
        subs.extend(other.subsystems.iter().cloned());
        Self::new(subs)
    }
}

impl TryFrom<Vec<(String, usize)>> for RegisterShape {
    type Error = Error;
    fn try_from(v: Vec<(String, usize)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RegisterShape> for Vec<(String, usize)> {
    fn from(s: RegisterShape) -> Self {
        s.subsystems
    }
}

/// Split flat indices of `shape` into (index over `selected`, index over the
/// rest); both sub-indices follow the order of `selected` / declaration order.
pub(crate) fn split_indices(shape: &RegisterShape, selected: &[usize]) -> Vec<(usize, usize)> {
    let dims: Vec<usize> = shape.subsystems.iter().map(|(_, d)| *d).collect();
    let rest: Vec<usize> = (0..dims.len()).filter(|i| !selected.contains(i)).collect();
    (0..shape.dim())
        .map(|flat| {
            let digits = shape.digits(flat);
            let sel = selected.iter().fold(0, |acc, &i| acc * dims[i] + digits[i]);
            let oth = rest.iter().fold(0, |acc, &i| acc * dims[i] + digits[i]);
            (sel, oth)
        })
        .collect()
}
