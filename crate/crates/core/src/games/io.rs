use serde::{Deserialize, Serialize};

use super::{AttackGame, BinaryPovmFamily};
use crate::error::Result;
use crate::quantum::{DensityOperator, MatrixFile};

/// Register assignment and accepting effects of a game:
/// `{"a": ["A"], "a_prime": [], "b": ["B"], "povms": [{"label": "0", "e1": {...}}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    #[serde(default)]
    pub a: Vec<String>,
    #[serde(default)]
    pub a_prime: Vec<String>,
    pub b: Vec<String>,
    pub povms: Vec<LabelledEffect>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelledEffect {
    pub label: String,
    pub e1: MatrixFile,
}

impl FamilyFile {
    pub fn from_game(g: &AttackGame) -> Self {
        let povms = g
            .family()
            .labels()
            .iter()
            .enumerate()
            .map(|(j, label)| LabelledEffect {
                label: label.clone(),
                e1: MatrixFile::from_matrix(None, g.family().accepting(j)),
            })
            .collect();
        Self {
            a: g.a().iter().map(|s| s.to_string()).collect(),
            a_prime: g.a_prime().iter().map(|s| s.to_string()).collect(),
            b: g.b().iter().map(|s| s.to_string()).collect(),
            povms,
        }
    }

    pub fn into_game(self, state: DensityOperator) -> Result<AttackGame> {
        let b_refs: Vec<&str> = self.b.iter().map(String::as_str).collect();
        let b_shape = state.shape().restrict(&b_refs)?;
        let labels = self.povms.iter().map(|p| p.label.clone()).collect();
        let e1 = self
            .povms
            .iter()
            .map(|p| p.e1.to_matrix())
            .collect::<Result<Vec<_>>>()?;
        let family = BinaryPovmFamily::from_accepting(b_shape, labels, e1)?;
        AttackGame::new(state, self.a, self.a_prime, self.b, family)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
