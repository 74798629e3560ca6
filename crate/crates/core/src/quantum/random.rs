//! Seeded random matrices and states. All samplers take an explicit RNG so a
//! single top-level seed reproduces every run.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::{c, cr, CMatrix, DensityOperator, RegisterShape, StateVector};
use crate::error::Result;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent child seed; used to fan one seed out over trials.
pub fn child_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gauss<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gauss(rng))
}

/// Haar-random unit vector.
pub fn haar_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<Complex64> {
    let v = DVector::from_fn(d, |_, _| gauss(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { cr(1.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, d, rng);
    (&g + g.adjoint()) * cr(0.5)
}

/// Full-rank random positive semidefinite matrix with trace 1.
pub fn random_psd<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    random_psd_rank(d, d, rng)
}

/// Random PSD matrix of the given rank, normalized to trace 1.
pub fn random_psd_rank<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, rank.max(1), rng);
    let m = &g * g.adjoint();
    let t = m.trace().re;
    m * cr(1.0 / t)
}

/// Random orthogonal projector of the given rank.
pub fn random_projector<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> CMatrix {
    let u = random_unitary(d, rng);
    let cols = u.columns(0, rank);
    cols * cols.adjoint()
}

/// Binary POVM element `E₁ = U diag(u) U†` with `u_i` uniform in `[0,1]`.
pub fn random_effect<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let u = random_unitary(d, rng);
    let diag = CMatrix::from_diagonal(&DVector::from_fn(d, |_, _| cr(rng.random::<f64>())));
    &u * diag * u.adjoint()
}

/// Haar-random pure state on `shape`.
pub fn haar_state<R: Rng + ?Sized>(shape: &RegisterShape, rng: &mut R) -> Result<StateVector> {
    StateVector::new(shape.clone(), haar_vector(shape.dim(), rng))
}

/// Random mixed state of the given rank (induced measure).
pub fn random_density<R: Rng + ?Sized>(shape: &RegisterShape, rank: usize, rng: &mut R) -> Result<DensityOperator> {
    DensityOperator::new(shape.clone(), random_psd_rank(shape.dim(), rank, rng))
}

/// Uniform point on the probability simplex (flat Dirichlet).
pub fn dirichlet_flat<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let g: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = g.iter().sum();
    g.into_iter().map(|x| x / s).collect()
}
