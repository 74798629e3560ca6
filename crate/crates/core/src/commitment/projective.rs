//! Best projective measurement for `max Σ_y tr(F_y K_y)`.
//!
//! A projective measurement is an orthonormal basis with each basis vector
//! assigned to the outcome that scores it best, so the objective of a basis
//! `{u_i}` is `Σ_i max_y ⟨u_i|K_y|u_i⟩`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::random::{random_unitary, seeded};
use crate::quantum::{c, eig_hermitian, hermitian_part, spectral_norm, CMatrix};

/// Angular resolution of the search net, in degrees.
pub const NET_STEP_DEGREES: f64 = 2.0;

pub struct ProjectiveSearch {
    pub value: f64,
    /// Projectors per outcome, in the order of the score operators.
    pub projectors: Vec<CMatrix>,
    /// Upper bound on `(true projective optimum) − value`.
    pub error: f64,
}

fn vector_score(u: &DVector<Complex64>, ks: &[CMatrix]) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (y, k) in ks.iter().enumerate() {
        let v = (u.adjoint() * k * u)[(0, 0)].re;
        if v > best.0 {
            best = (v, y);
        }
    }
    best
}

fn basis_value(basis: &CMatrix, ks: &[CMatrix]) -> f64 {
    (0..basis.ncols())
        .map(|i| vector_score(&basis.column(i).into_owned(), ks).0)
        .sum()
}

fn assignment(basis: &CMatrix, ks: &[CMatrix]) -> Vec<CMatrix> {
    let d = basis.nrows();
    let mut out = vec![CMatrix::zeros(d, d); ks.len()];
    for i in 0..basis.ncols() {
        let u = basis.column(i).into_owned();
        let (_, y) = vector_score(&u, ks);
        out[y] += &u * u.adjoint();
    }
    out
}

fn qubit_basis(theta: f64, phi: f64) -> CMatrix {
    let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = Complex64::from_polar(1.0, phi);
    CMatrix::from_row_slice(2, 2, &[c(ct, 0.0), -(e.conj() * st), e * st, c(ct, 0.0)])
}

/// Exhaustive net search for a qubit, multi-start Givens sweeps for
/// dimensions 3 and 4. `relaxation` is a certified upper bound on the POVM
/// optimum and caps the reported error.
pub fn best_projective(ks: &[CMatrix], relaxation: f64, seed: u64) -> Result<ProjectiveSearch> {
    let d = ks.first().map_or(0, CMatrix::nrows);
    if d == 0 || d > 4 || ks.len() > 4 {
        return Err(Error::CapExceeded(format!(
            "projective brute force supports dim ≤ 4 and ≤ 4 outcomes, got dim {d}, {} outcomes",
            ks.len()
        )));
    }
    let ks: Vec<CMatrix> = ks.iter().map(hermitian_part).collect();
    let norm = ks.iter().map(spectral_norm).fold(0.0, f64::max);
    let step = NET_STEP_DEGREES.to_radians();

    let (basis, net_bound) = match d {
        1 => (CMatrix::identity(1, 1), 0.0),
        2 => {
            let mut best = (f64::NEG_INFINITY, CMatrix::identity(2, 2));
            let n_theta = (std::f64::consts::PI / step).round() as usize;
            let n_phi = (2.0 * std::f64::consts::PI / step).round() as usize;
            for i in 0..=n_theta {
                for j in 0..n_phi {
                    let b = qubit_basis(i as f64 * step, j as f64 * step);
                    let v = basis_value(&b, &ks);
                    if v > best.0 {
                        best = (v, b);
                    }
                }
            }
            // Every Bloch direction is within angle `step` of a net point
            // (half a step in each coordinate); each basis vector then moves
            // by at most 2 sin(step/2) in trace norm.
            (best.1, 4.0 * (step / 2.0).sin() * norm)
        }
        _ => (givens_search(&ks, seed)?, f64::INFINITY),
    };
    let value = basis_value(&basis, &ks);
    let error = net_bound.min((relaxation - value).max(0.0));
    Ok(ProjectiveSearch {
        value,
        projectors: assignment(&basis, &ks),
        error,
    })
}

fn rotate(basis: &CMatrix, i: usize, j: usize, theta: f64, phi: f64) -> CMatrix {
    let mut out = basis.clone();
    let e = Complex64::from_polar(1.0, phi);
    let (ct, st) = (theta.cos(), theta.sin());
    let ui = basis.column(i).into_owned();
    let uj = basis.column(j).into_owned();
    out.set_column(i, &(&ui * c(ct, 0.0) + &uj * (e * st)));
    out.set_column(j, &(&uj * c(ct, 0.0) - &ui * (e.conj() * st)));
    out
}

fn givens_search(ks: &[CMatrix], seed: u64) -> Result<CMatrix> {
    let d = ks[0].nrows();
    let mut starts = vec![CMatrix::identity(d, d)];
    for k in ks {
        starts.push(eig_hermitian(k)?.vectors);
    }
    for a in 0..ks.len() {
        for b in (a + 1)..ks.len() {
            starts.push(eig_hermitian(&hermitian_part(&(&ks[a] - &ks[b])))?.vectors);
        }
    }
    let mut rng = seeded(seed);
    for _ in 0..8 {
        starts.push(random_unitary(d, &mut rng));
    }
    let n_theta = (180.0 / NET_STEP_DEGREES) as usize;
    let thetas: Vec<f64> = (1..n_theta)
        .map(|i| (i as f64 * NET_STEP_DEGREES - 90.0).to_radians())
        .collect();
    let phis: Vec<f64> = (0..2 * n_theta)
        .map(|i| (i as f64 * NET_STEP_DEGREES).to_radians())
        .collect();
    let mut best = (f64::NEG_INFINITY, CMatrix::identity(d, d));
    for start in starts {
        let mut basis = start;
        let mut value = basis_value(&basis, ks);
        for _sweep in 0..20 {
            let before = value;
            for i in 0..d {
                for j in (i + 1)..d {
                    if let Some((gain, theta, phi)) = best_pair_rotation(&basis, ks, i, j, &thetas, &phis) {
                        if gain > 1e-15 {
                            basis = rotate(&basis, i, j, theta, phi);
                            value = basis_value(&basis, ks);
                        }
                    }
                }
            }
            if value <= before + 1e-13 {
                break;
            }
        }
        if value > best.0 {
            best = (value, basis);
        }
    }
    Ok(best.1)
}

/// Best grid rotation in the `(i, j)` plane. Rotating by `(θ, φ)` changes
/// the two diagonal scores to `c²a + s²b ± 2cs Re(e^{iφ} z)` with
/// `a = ⟨u_i|K|u_i⟩`, `b = ⟨u_j|K|u_j⟩`, `z = ⟨u_i|K|u_j⟩`.
fn best_pair_rotation(
    basis: &CMatrix,
    ks: &[CMatrix],
    i: usize,
    j: usize,
    thetas: &[f64],
    phis: &[f64],
) -> Option<(f64, f64, f64)> {
    let ui = basis.column(i).into_owned();
    let uj = basis.column(j).into_owned();
    let entries: Vec<(f64, f64, Complex64)> = ks
        .iter()
        .map(|k| {
            let ki = k * &ui;
            let kj = k * &uj;
            (ui.dotc(&ki).re, uj.dotc(&kj).re, ui.dotc(&kj))
        })
        .collect();
    let current = entries.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max)
        + entries.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let mut best: Option<(f64, f64, f64)> = None;
    for &theta in thetas {
        let (s, c) = theta.sin_cos();
        for &phi in phis {
            let e = Complex64::from_polar(1.0, phi);
            let (mut top_i, mut top_j) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for &(a, b, z) in &entries {
                let cross = 2.0 * c * s * (e * z).re;
                top_i = top_i.max(c * c * a + s * s * b + cross);
                top_j = top_j.max(c * c * b + s * s * a - cross);
            }
            let gain = top_i + top_j - current;
            if best.is_none_or(|b| gain > b.0) {
                best = Some((gain, theta, phi));
            }
        }
    }
    best
}
