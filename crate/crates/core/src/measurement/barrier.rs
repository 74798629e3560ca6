//! Log-barrier path following for the two program shapes used here:
//!
//! ```text
//! minimize tr Y   subject to   I_m ⊗ Y − K_j ⪰ 0   (j = 1..J)
//! ```
//!
//! `m = 1` is minimum-error discrimination, `m = d_A` is the conditional
//! min-entropy program. `Y` is parametrized by `d²` real coordinates; each
//! Newton step solves the dense `d² × d²` system by Cholesky.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::quantum::ops::eig_unchecked;
use crate::quantum::{c, cr, CMatrix};

pub(crate) struct BarrierProblem<'a> {
    pub d: usize,
    pub m: usize,
    pub ks: &'a [CMatrix],
}

pub(crate) struct BarrierSolution {
    pub y: CMatrix,
    /// `μ S_j⁻¹` at the final iterate: approximately a feasible point of the
    /// conjugate program.
    pub duals: Vec<CMatrix>,
    pub iterations: usize,
}

fn coords_len(d: usize) -> usize {
    d * d
}

/// `Y = Σ y_a B_a` with basis: diagonal units, `E_ij + E_ji`, `i(E_ij − E_ji)`.
pub(crate) fn herm_from_coords(y: &DVector<f64>, d: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        out[(i, i)] = cr(y[i]);
    }
    let mut a = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let (s, t) = (y[a], y[a + 1]);
            out[(i, j)] = c(s, t);
            out[(j, i)] = c(s, -t);
            a += 2;
        }
    }
    out
}

/// `tr(N B_a)` for every basis element, `N` Hermitian.
fn pair_with_basis(n: &CMatrix, d: usize) -> DVector<f64> {
    let mut out = DVector::zeros(coords_len(d));
    for i in 0..d {
        out[i] = n[(i, i)].re;
    }
    let mut a = d;
    for i in 0..d {
        for j in (i + 1)..d {
            out[a] = 2.0 * n[(i, j)].re;
            out[a + 1] = 2.0 * n[(i, j)].im;
            a += 2;
        }
    }
    out
}

fn lift(y: &CMatrix, m: usize) -> CMatrix {
    if m == 1 {
        y.clone()
    } else {
        CMatrix::identity(m, m).kronecker(y)
    }
}

/// `Tr_m` over the leading factor of an `(m·d) × (m·d)` matrix.
fn trace_out_leading(w: &CMatrix, m: usize, d: usize) -> CMatrix {
    if m == 1 {
        return w.clone();
    }
    let mut out = CMatrix::zeros(d, d);
    for l in 0..m {
        out += w.view((l * d, l * d), (d, d));
    }
    out
}

struct Factored {
    inverses: Vec<CMatrix>,
    logdet: f64,
}

fn factor(problem: &BarrierProblem, y: &CMatrix) -> Option<Factored> {
    let ly = lift(y, problem.m);
    let mut inverses = Vec::with_capacity(problem.ks.len());
    let mut logdet = 0.0;
    for k in problem.ks {
        let s = &ly - k;
        let eig = eig_unchecked(&((&s + s.adjoint()) * cr(0.5)));
        if !eig.values.iter().all(|v| *v > 0.0 && v.is_finite()) {
            return None;
        }
        logdet += eig.values.iter().map(|v| v.ln()).sum::<f64>();
        inverses.push(eig.reconstruct_with(|v| 1.0 / v));
    }
    Some(Factored { inverses, logdet })
}

fn objective(y: &CMatrix, f: &Factored, mu: f64) -> f64 {
    y.trace().re - mu * f.logdet
}

fn gradient_hessian(problem: &BarrierProblem, f: &Factored, mu: f64) -> (DVector<f64>, DMatrix<f64>) {
    let (d, m) = (problem.d, problem.m);
    let n = coords_len(d);
    let mut grad = DVector::zeros(n);
    for i in 0..d {
        grad[i] = 1.0;
    }
    let mut hess = DMatrix::<f64>::zeros(n, n);
    for w in &f.inverses {
        grad -= pair_with_basis(&trace_out_leading(w, m, d), d) * mu;
        // G[i][j] = Tr_m[ W (I ⊗ E_ij) W ]
        let mut g = vec![CMatrix::zeros(d, d); d * d];
        for i in 0..d {
            for j in 0..d {
                let gij = &mut g[i * d + j];
                for l in 0..m {
                    for k in 0..m {
                        for p in 0..d {
                            let left = w[(l * d + p, k * d + i)];
                            if left.norm_sqr() == 0.0 {
                                continue;
                            }
                            for q in 0..d {
                                gij[(p, q)] += left * w[(k * d + j, l * d + q)];
                            }
                        }
                    }
                }
            }
        }
        let mut col = 0;
        let push = |nmat: CMatrix, col: usize, hess: &mut DMatrix<f64>| {
            let v = pair_with_basis(&nmat, d) * mu;
            for r in 0..n {
                hess[(r, col)] += v[r];
            }
        };
        for i in 0..d {
            push(g[i * d + i].clone(), col, &mut hess);
            col += 1;
        }
        for i in 0..d {
            for j in (i + 1)..d {
                push(&g[i * d + j] + &g[j * d + i], col, &mut hess);
                push((&g[i * d + j] - &g[j * d + i]) * c(0.0, 1.0), col + 1, &mut hess);
                col += 2;
            }
        }
    }
    let sym = (&hess + hess.transpose()) * 0.5;
    (grad, sym)
}

fn newton_direction(grad: &DVector<f64>, hess: &DMatrix<f64>) -> Option<DVector<f64>> {
    let n = grad.len();
    let scale = (0..n).map(|i| hess[(i, i)].abs()).fold(0.0f64, f64::max).max(1e-300);
    let mut reg = 0.0;
    for _ in 0..12 {
        let mut h = hess.clone();
        for i in 0..n {
            h[(i, i)] += reg * scale;
        }
        if let Some(ch) = Cholesky::new(h) {
            let dir = ch.solve(&(-grad));
            if dir.iter().all(|x| x.is_finite()) {
                return Some(dir);
            }
        }
        reg = if reg == 0.0 { 1e-14 } else { reg * 100.0 };
    }
    None
}

/// Newton centering at a fixed `μ` from a strictly feasible `y0`, for at
/// most `max_iter` steps. Callers decrease `μ` between calls.
pub(crate) fn center(problem: &BarrierProblem, y0: CMatrix, mu: f64, max_iter: usize) -> BarrierSolution {
    let d = problem.d;
    let mut y = y0;
    let mut iterations = 0;
    let mut fac = factor(problem, &y).expect("initial point must be strictly feasible");
    while iterations < max_iter.min(60) {
        iterations += 1;
        let (grad, hess) = gradient_hessian(problem, &fac, mu);
        let Some(dir) = newton_direction(&grad, &hess) else {
            break;
        };
        let decrement = -grad.dot(&dir);
        if decrement.is_nan() || decrement <= 1e-15 * (1.0 + y.trace().re.abs()) {
            break;
        }
        let step = herm_from_coords(&dir, d);
        let f0 = objective(&y, &fac, mu);
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-12 {
            let cand = &y + &step * cr(t);
            if let Some(fc) = factor(problem, &cand) {
                if objective(&cand, &fc, mu) <= f0 - 0.25 * t * decrement || decrement < 1e-12 {
                    y = cand;
                    fac = fc;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted || decrement < 1e-11 * mu.min(1.0) {
            break;
        }
    }
    let duals = fac.inverses.iter().map(|w| w * cr(mu)).collect();
    BarrierSolution { y, duals, iterations }
}
