use std::f64::consts::PI;

use rand::Rng;

use crate::error::Result;
use crate::measurement::Povm;
use crate::quantum::random::{haar_vector, random_unitary, seeded};
use crate::quantum::{c, hermitian_part, pinv_sqrt, CMatrix, RegisterShape};

/// Columns `ω^{jk}/√d`.
pub fn fourier_basis(d: usize) -> CMatrix {
    let norm = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |j, k| {
        let phase = 2.0 * PI * (j * k) as f64 / d as f64;
        c(norm * phase.cos(), norm * phase.sin())
    })
}

pub fn random_projective<R: Rng + ?Sized>(shape: &RegisterShape, rng: &mut R) -> Result<Povm> {
    Povm::from_basis(shape.clone(), &random_unitary(shape.dim(), rng))
}

/// `F_i = S^{-1/2} v_i v_i† S^{-1/2}` for random vectors `v_i`.
pub fn random_rank1_povm<R: Rng + ?Sized>(shape: &RegisterShape, outcomes: usize, rng: &mut R) -> Result<Povm> {
    let d = shape.dim();
    let outcomes = outcomes.max(d);
    let vectors: Vec<_> = (0..outcomes)
        .map(|_| haar_vector(d, rng) * c(0.5 + rng.random::<f64>(), 0.0))
        .collect();
    let mut s = CMatrix::zeros(d, d);
    for v in &vectors {
        s += v * v.adjoint();
    }
    let (inv_sqrt, _) = pinv_sqrt(&hermitian_part(&s), 0.0)?;
    let elements = vectors
        .iter()
        .map(|v| {
            let w = &inv_sqrt * v;
            hermitian_part(&(&w * w.adjoint()))
        })
        .collect();
    Povm::new(shape.clone(), elements)
}

/// Computational and Fourier bases, then alternating random projective
/// bases and random rank-1 POVMs with `d..=d²` outcomes, `budget` in total.
pub fn search_family(shape: &RegisterShape, budget: usize, seed: u64) -> Result<Vec<Povm>> {
    let d = shape.dim();
    let mut out = Vec::with_capacity(budget);
    if budget == 0 {
        return Ok(out);
    }
    out.push(Povm::computational(shape.clone())?);
    if budget > 1 && d > 1 {
        out.push(Povm::from_basis(shape.clone(), &fourier_basis(d))?);
    }
    let mut rng = seeded(seed);
    while out.len() < budget {
        if out.len() % 2 == 0 {
            out.push(random_projective(shape, &mut rng)?);
        } else {
            let k = rng.random_range(d..=d * d);
            out.push(random_rank1_povm(shape, k, &mut rng)?);
        }
    }
    Ok(out)
}
