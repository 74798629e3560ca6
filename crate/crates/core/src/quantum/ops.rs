use nalgebra::linalg::SymmetricEigen;
use nalgebra::DVector;
use num_complex::Complex64;

use super::shape::split_indices;
use super::{cr, tol, CMatrix, RegisterShape};
use crate::error::{Error, Result};

/// Hermitian spectral decomposition, eigenvalues in descending order and the
/// matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    /// `V f(Λ) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let d = self.values.len();
        let mut out = CMatrix::zeros(d, d);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            let v = self.vectors.column(k);
            out += (v * v.adjoint()) * cr(w);
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|x| x)
    }
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// Kronecker product; `a` acts on the more significant subsystem.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}

/// Largest entry-wise deviation `|M - M†|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(M + M†)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * cr(0.5)
}

fn check_hermitian(m: &CMatrix, tolerance: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
    let defect = hermiticity_defect(m);
    if defect > tolerance * scale {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

pub fn eig_hermitian(m: &CMatrix) -> Result<Eigen> {
    check_hermitian(m, tol::HERMITIAN)?;
    Ok(eig_unchecked(&hermitian_part(m)))
}

pub(crate) fn eig_unchecked(h: &CMatrix) -> Eigen {
    let n = h.nrows();
    if n == 0 {
        return Eigen {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let se = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Eigen { values, vectors }
}

pub fn lambda_min(m: &CMatrix) -> Result<f64> {
    Ok(*eig_hermitian(m)?.values.last().unwrap_or(&0.0))
}

pub fn lambda_max(m: &CMatrix) -> Result<f64> {
    Ok(*eig_hermitian(m)?.values.first().unwrap_or(&0.0))
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if hermiticity_defect(m) < 1e-13 {
        return eig_unchecked(&hermitian_part(m)).values.iter().map(|x| x.abs()).sum();
    }
    m.clone().svd(false, false).singular_values.sum()
}

/// `X ≤ Y` in the Löwner order: `λ_min(Y - X) ≥ -tol`.
pub fn loewner_leq(x: &CMatrix, y: &CMatrix, tolerance: f64) -> Result<bool> {
    if x.shape() != y.shape() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", x.shape(), y.shape())));
    }
    check_hermitian(x, tol::HERMITIAN)?;
    check_hermitian(y, tol::HERMITIAN)?;
    Ok(lambda_min(&hermitian_part(&(y - x)))? >= -tolerance)
}

/// `Σ_{λ>0} λ v v†`.
pub fn positive_part(m: &CMatrix) -> Result<CMatrix> {
    Ok(eig_hermitian(m)?.reconstruct_with(|x| x.max(0.0)))
}

/// Apply `f` to the spectrum of a Hermitian matrix.
pub fn matrix_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    Ok(eig_hermitian(m)?.reconstruct_with(f))
}

pub fn sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    matrix_function(m, |x| x.max(0.0).sqrt())
}

/// Pseudo-inverse square root on the support (eigenvalues above
/// `rank_tol`), together with the support projector.
pub fn pinv_sqrt(m: &CMatrix, rank_tol: f64) -> Result<(CMatrix, CMatrix)> {
    let e = eig_hermitian(m)?;
    let inv = e.reconstruct_with(|x| if x > rank_tol { 1.0 / x.sqrt() } else { 0.0 });
    let proj = e.reconstruct_with(|x| if x > rank_tol { 1.0 } else { 0.0 });
    Ok((inv, proj))
}

/// `lg` of the number of eigenvalues above `rank_tol`.
pub fn zero_entropy(m: &CMatrix, rank_tol: f64) -> Result<f64> {
    let rank = eig_hermitian(m)?.values.iter().filter(|&&x| x > rank_tol).count();
    Ok((rank.max(1) as f64).log2())
}

/// Worst of `|P² - P|` and `|P - P†|`, entry-wise.
pub fn is_projector(p: &CMatrix) -> f64 {
    if !p.is_square() {
        return f64::INFINITY;
    }
    let sq = p * p - p;
    let idem = sq.iter().map(|z| z.norm()).fold(0.0, f64::max);
    idem.max(hermiticity_defect(p))
}

/// Rank-1 projector onto the span of `v`.
pub fn projector_onto(v: &DVector<Complex64>) -> CMatrix {
    let n2 = v.norm_squared();
    (v * v.adjoint()) * cr(1.0 / n2)
}

fn label_indices(shape: &RegisterShape, labels: &[&str]) -> Result<Vec<usize>> {
    let mut idx = Vec::with_capacity(labels.len());
    for l in labels {
        let i = shape.index_of(l)?;
        if idx.contains(&i) {
            return Err(Error::DuplicateLabel(l.to_string()));
        }
        idx.push(i);
    }
    Ok(idx)
}

/// Partial trace of an arbitrary operator laid out per `shape`, keeping the
/// subsystems in `keep` (output in declaration order).
pub fn partial_trace_op(m: &CMatrix, shape: &RegisterShape, keep: &[&str]) -> Result<(CMatrix, RegisterShape)> {
    if m.nrows() != shape.dim() || m.ncols() != shape.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator {:?} vs shape dimension {}",
            m.shape(),
            shape.dim()
        )));
    }
    let mut kept = label_indices(shape, keep)?;
    kept.sort_unstable();
    let out_shape = shape.restrict(keep)?;
    let split = split_indices(shape, &kept);
    let d_rest = shape.dim() / out_shape.dim();
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); d_rest];
    for (flat, &(k, r)) in split.iter().enumerate() {
        groups[r].push((flat, k));
    }
    let mut out = CMatrix::zeros(out_shape.dim(), out_shape.dim());
    for group in &groups {
        for &(fi, ki) in group {
            for &(fj, kj) in group {
                out[(ki, kj)] += m[(fi, fj)];
            }
        }
    }
    Ok((out, out_shape))
}

/// Lift `op`, whose tensor factors are the subsystems `op_labels` in the
/// given order, to `op ⊗ I_rest` on the full `shape`.
pub fn embed_operator(op: &CMatrix, op_labels: &[&str], shape: &RegisterShape) -> Result<CMatrix> {
    let sel = label_indices(shape, op_labels)?;
    let d_sel: usize = sel.iter().map(|&i| shape.subsystems()[i].1).product();
    if op.nrows() != d_sel || op.ncols() != d_sel {
        return Err(Error::DimensionMismatch(format!(
            "operator {:?} vs subsystems of dimension {d_sel}",
            op.shape()
        )));
    }
    let split = split_indices(shape, &sel);
    let d_rest = shape.dim() / d_sel;
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); d_rest];
    for (flat, &(s, r)) in split.iter().enumerate() {
        groups[r].push((flat, s));
    }
    let mut out = CMatrix::zeros(shape.dim(), shape.dim());
    for group in &groups {
        for &(fi, si) in group {
            for &(fj, sj) in group {
                out[(fi, fj)] = op[(si, sj)];
            }
        }
    }
    Ok(out)
}

/// Permute subsystems so that `first` (in the given order) leads and the
/// remaining subsystems follow in declaration order.
pub fn reorder(m: &CMatrix, shape: &RegisterShape, first: &[&str]) -> Result<(CMatrix, RegisterShape)> {
    if m.nrows() != shape.dim() || m.ncols() != shape.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator {:?} vs shape dimension {}",
            m.shape(),
            shape.dim()
        )));
    }
    let sel = label_indices(shape, first)?;
    let rest: Vec<usize> = (0..shape.len()).filter(|i| !sel.contains(i)).collect();
    let order: Vec<(String, usize)> = sel
        .iter()
        .chain(&rest)
        .map(|&i| shape.subsystems()[i].clone())
        .collect();
    let new_shape = RegisterShape::with_cap(order, usize::MAX)?;
    let d_rest: usize = rest.iter().map(|&i| shape.subsystems()[i].1).product();
    let perm: Vec<usize> = split_indices(shape, &sel)
        .into_iter()
        .map(|(s, r)| s * d_rest + r)
        .collect();
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[(perm[i], perm[j])] = m[(i, j)];
        }
    }
    Ok((out, new_shape))
}
