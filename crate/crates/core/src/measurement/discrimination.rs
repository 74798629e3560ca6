use serde::{Deserialize, Serialize};

use super::barrier::{self, BarrierProblem};
use super::Povm;
use crate::error::{Error, Result};
use crate::quantum::{
    cr, eig_hermitian, hermitian_part, identity, lambda_max, lambda_min, pinv_sqrt, tol, trace_re, CMatrix,
    RegisterShape,
};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Score operators `K_j`; the program is `max Σ_j tr(F_j K_j)` over POVMs.
#[derive(Clone, Debug)]
pub struct DiscriminationInstance {
    shape: RegisterShape,
    score_operators: Vec<CMatrix>,
}

impl DiscriminationInstance {
    pub fn new(shape: RegisterShape, score_operators: Vec<CMatrix>) -> Result<Self> {
        if score_operators.is_empty() {
            return Err(Error::Input("discrimination needs at least one score operator".into()));
        }
        let d = shape.dim();
        for k in &score_operators {
            if k.nrows() != d || k.ncols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "score operator is {}x{}, register has dimension {d}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            check_psd(k)?;
        }
        Ok(Self { shape, score_operators })
    }

    /// Shape-less convenience constructor (single register labelled `A`).
    pub fn from_operators(score_operators: Vec<CMatrix>) -> Result<Self> {
        let d = score_operators.first().map_or(1, CMatrix::nrows);
        Self::new(RegisterShape::single("A", d)?, score_operators)
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn score_operators(&self) -> &[CMatrix] {
        &self.score_operators
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    /// `Σ_j tr(F_j K_j)`.
    pub fn objective(&self, povm: &[CMatrix]) -> f64 {
        povm.iter()
            .zip(&self.score_operators)
            .map(|(f, k)| trace_re(&(f * k)))
            .sum()
    }

    /// Whether `Y ⪰ K_j` for every `j` within `tolerance`.
    pub fn dual_feasible(&self, y: &CMatrix, tolerance: f64) -> Result<bool> {
        Ok(self.dual_violation(y)? <= tolerance)
    }

    fn dual_violation(&self, y: &CMatrix) -> Result<f64> {
        let mut worst = f64::NEG_INFINITY;
        for k in &self.score_operators {
            worst = worst.max(lambda_max(&hermitian_part(&(k - y)))?);
        }
        Ok(worst)
    }
}

fn check_psd(k: &CMatrix) -> Result<()> {
    let low = lambda_min(k)?;
    if low < -tol::PSD {
        return Err(Error::NotPsd(low));
    }
    Ok(())
}

/// Primal POVM and dual witness `Y ⪰ K_j`, whose values bracket the optimum.
#[derive(Clone, Debug)]
pub struct SolverCertificate {
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub primal_povm: Povm,
    pub dual_witness: CMatrix,
    pub iterations: usize,
    pub converged: bool,
}

/// The JSON form of a certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SolverCertificate {
    pub fn summary(&self) -> CertificateSummary {
        CertificateSummary {
            primal: self.primal_value,
            dual: self.dual_value,
            gap: self.gap,
            iterations: self.iterations,
            converged: self.converged,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.summary())?)
    }
}

/// Closed form for two score operators: `tr K1 + tr (K0 − K1)₊`, attained by
/// the projector onto the positive eigenspace of `K0 − K1`.
pub fn binary_optimal(k0: &CMatrix, k1: &CMatrix) -> Result<(f64, Povm)> {
    if k0.shape() != k1.shape() || k0.nrows() != k0.ncols() {
        return Err(Error::DimensionMismatch(
            "binary_optimal needs equal square operators".into(),
        ));
    }
    check_psd(k0)?;
    check_psd(k1)?;
    let d = k0.nrows();
    let eig = eig_hermitian(&hermitian_part(&(k0 - k1)))?;
    let f0 = eig.reconstruct_with(|v| if v > 0.0 { 1.0 } else { 0.0 });
    let f1 = identity(d) - &f0;
    let positive: f64 = eig.values.iter().filter(|v| **v > 0.0).sum();
    let value = trace_re(k1) + positive;
    let povm = Povm::new(RegisterShape::single("A", d)?, vec![f0, f1])?;
    Ok((value, povm))
}

/// Optimal value of `max Σ_j tr(F_j K_j)` with a duality certificate.
///
/// Interior-point path following on the dual `min tr Y, Y ⪰ K_j`; the primal
/// is read off the central path and renormalized to an exact POVM, and the
/// dual is repaired to exact feasibility. A run that exhausts `max_iter`
/// returns its best certificate with `converged = false`.
pub fn optimal_discrimination(
    inst: &DiscriminationInstance,
    tolerance: f64,
    max_iter: usize,
) -> Result<SolverCertificate> {
    let d = inst.dim();
    let ks = inst.score_operators();
    let shape = inst.shape().clone();

    if ks.len() == 1 {
        let value = trace_re(&ks[0]);
        return Ok(SolverCertificate {
            primal_value: value,
            dual_value: value,
            gap: 0.0,
            primal_povm: Povm::new(shape, vec![identity(d)])?,
            dual_witness: ks[0].clone(),
            iterations: 0,
            converged: true,
        });
    }

    let scale = ks
        .iter()
        .map(|k| lambda_max(k).map(|v| v.max(0.0)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);
    if scale == 0.0 || d == 1 {
        let values: Vec<f64> = ks.iter().map(|k| trace_re(k).max(0.0)).collect();
        let best = (0..values.len()).fold(0, |b, j| if values[j] > values[b] { j } else { b });
        let mut elements = vec![CMatrix::zeros(d, d); ks.len()];
        elements[best] = identity(d);
        return Ok(SolverCertificate {
            primal_value: values[best],
            dual_value: values[best],
            gap: 0.0,
            primal_povm: Povm::new(shape, elements)?,
            dual_witness: identity(d) * cr(values[best]),
            iterations: 0,
            converged: true,
        });
    }

    let scaled: Vec<CMatrix> = ks.iter().map(|k| hermitian_part(k) * cr(1.0 / scale)).collect();
    let problem = BarrierProblem { d, m: 1, ks: &scaled };
    let barrier_dim = (ks.len() * d) as f64;
    let target = (tolerance / scale).min(1e-11);

    let mut y = identity(d) * cr(2.0);
    let mut mu = 1.0;
    let mu_floor = 1e-3 * target / barrier_dim;
    let mut iterations = 0;
    let mut best: Option<(f64, f64, Vec<CMatrix>, CMatrix)> = None;
    loop {
        let sol = barrier::center(&problem, y, mu, max_iter.saturating_sub(iterations));
        iterations += sol.iterations;
        y = sol.y.clone();
        let (primal, povm) = renormalized_primal(&sol.duals, &scaled)?;
        let (dual, witness) = best_dual(&scaled, &sol.y, &povm)?;
        if best.as_ref().is_none_or(|b| dual - primal < b.1 - b.0) {
            best = Some((primal, dual, povm, witness));
        }
        let gap = best.as_ref().map_or(f64::INFINITY, |b| b.1 - b.0);
        if gap <= target || iterations >= max_iter || mu <= mu_floor {
            break;
        }
        mu *= 0.1;
    }

    let (primal, dual, povm, witness) = best.expect("at least one barrier pass");
    let primal_value = primal * scale;
    let dual_value = dual * scale;
    let gap = dual_value - primal_value;
    Ok(SolverCertificate {
        primal_value,
        dual_value,
        gap,
        primal_povm: Povm::new(shape, povm)?,
        dual_witness: witness * cr(scale),
        iterations,
        converged: gap <= tolerance,
    })
}

/// `F_j ↦ S^{-1/2} F_j S^{-1/2}` with `S = Σ F_j`, then the objective value.
fn renormalized_primal(raw: &[CMatrix], ks: &[CMatrix]) -> Result<(f64, Vec<CMatrix>)> {
    let d = ks[0].nrows();
    let mut sum = CMatrix::zeros(d, d);
    for f in raw {
        sum += f;
    }
    let (inv_sqrt, _) = pinv_sqrt(&hermitian_part(&sum), 0.0)?;
    let povm: Vec<CMatrix> = raw
        .iter()
        .map(|f| hermitian_part(&(&inv_sqrt * f * &inv_sqrt)))
        .collect();
    let value = povm.iter().zip(ks).map(|(f, k)| trace_re(&(f * k))).sum();
    Ok((value, povm))
}

/// The cheaper of two exactly feasible duals: the barrier iterate and the
/// symmetrized-product repair `½Σ(F_j K_j + K_j F_j)`, each shifted by the
/// largest residual violation.
fn best_dual(ks: &[CMatrix], y_barrier: &CMatrix, povm: &[CMatrix]) -> Result<(f64, CMatrix)> {
    let d = ks[0].nrows();
    let mut y0 = CMatrix::zeros(d, d);
    for (f, k) in povm.iter().zip(ks) {
        y0 += f * k + k * f;
    }
    let y0 = hermitian_part(&(y0 * cr(0.5)));
    let mut best: Option<(f64, CMatrix)> = None;
    for cand in [hermitian_part(y_barrier), y0] {
        let repaired = repair(ks, cand)?;
        let value = trace_re(&repaired);
        if best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, repaired));
        }
    }
    Ok(best.expect("two candidates"))
}

fn repair(ks: &[CMatrix], y: CMatrix) -> Result<CMatrix> {
    let d = y.nrows();
    let mut shift = 0.0f64;
    for k in ks {
        shift = shift.max(lambda_max(&hermitian_part(&(k - &y)))?);
    }
    // Round-off slack so the Löwner check passes after the shift.
    let shift = if shift > 0.0 {
        shift * (1.0 + 1e-12) + 1e-15
    } else {
        0.0
    };
    Ok(y + identity(d) * cr(shift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{c, projector_onto, random, tensor};
    use nalgebra::DVector;

    fn ket(v: &[(f64, f64)]) -> DVector<num_complex::Complex64> {
        DVector::from_iterator(v.len(), v.iter().map(|(a, b)| c(*a, *b)))
    }

    fn theta_ops() -> (CMatrix, CMatrix) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let k0 = projector_onto(&ket(&[(1.0, 0.0), (0.0, 0.0)])) * cr(0.5);
        let k1 = projector_onto(&ket(&[(s, 0.0), (s, 0.0)])) * cr(0.5);
        (k0, k1)
    }

    #[test]
    fn binary_identical_and_orthogonal() {
        let rho = identity(2) * cr(0.5);
        let (v, _) = binary_optimal(&(&rho * cr(0.5)), &(&rho * cr(0.5))).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let k0 = projector_onto(&ket(&[(1.0, 0.0), (0.0, 0.0)])) * cr(0.5);
        let k1 = projector_onto(&ket(&[(0.0, 0.0), (1.0, 0.0)])) * cr(0.5);
        let (v, _) = binary_optimal(&k0, &k1).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binary_theta_guessing() {
        let (k0, k1) = theta_ops();
        let (v, povm) = binary_optimal(&k0, &k1).unwrap();
        let expected = (std::f64::consts::PI / 8.0).cos().powi(2);
        assert!((v - expected).abs() < 1e-12);
        assert!((v - 0.853553).abs() < 1e-6);
        for f in povm.elements() {
            assert!(crate::quantum::is_projector(f) < 1e-9);
        }
    }

    #[test]
    fn general_matches_binary() {
        let mut rng = random::seeded(7);
        for d in [2, 3, 4] {
            let k0 = random::random_psd_rank(d, d, &mut rng) * cr(0.4);
            let k1 = random::random_psd_rank(d, 1, &mut rng) * cr(0.6);
            let (v, _) = binary_optimal(&k0, &k1).unwrap();
            let inst = DiscriminationInstance::from_operators(vec![k0, k1]).unwrap();
            let cert = optimal_discrimination(&inst, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            assert!(cert.converged, "gap {}", cert.gap);
            assert!((cert.primal_value - v).abs() < 1e-7);
            assert!(cert.primal_value <= cert.dual_value + 1e-12);
        }
    }

    #[test]
    fn single_operator() {
        let mut rng = random::seeded(1);
        let k = random::random_psd(3, &mut rng);
        let inst = DiscriminationInstance::from_operators(vec![k.clone()]).unwrap();
        let cert = optimal_discrimination(&inst, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((cert.primal_value - trace_re(&k)).abs() < 1e-12);
        assert_eq!(cert.gap, 0.0);
    }

    #[test]
    fn bell_measurement_value_one() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bells = [
            ket(&[(s, 0.0), (0.0, 0.0), (0.0, 0.0), (s, 0.0)]),
            ket(&[(s, 0.0), (0.0, 0.0), (0.0, 0.0), (-s, 0.0)]),
            ket(&[(0.0, 0.0), (s, 0.0), (s, 0.0), (0.0, 0.0)]),
            ket(&[(0.0, 0.0), (s, 0.0), (-s, 0.0), (0.0, 0.0)]),
        ];
        let ks = bells.iter().map(|b| projector_onto(b) * cr(0.25)).collect();
        let inst = DiscriminationInstance::from_operators(ks).unwrap();
        let cert = optimal_discrimination(&inst, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(cert.converged);
        assert!((cert.primal_value - 1.0).abs() < 1e-7);
        assert!(inst.dual_feasible(&cert.dual_witness, 1e-9).unwrap());
    }

    #[test]
    fn certificate_json_shape() {
        let (k0, k1) = theta_ops();
        let inst = DiscriminationInstance::from_operators(vec![k0, k1]).unwrap();
        let cert = optimal_discrimination(&inst, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let v: serde_json::Value = serde_json::from_str(&cert.to_json().unwrap()).unwrap();
        for key in ["primal", "dual", "gap", "iterations", "converged"] {
            assert!(v.get(key).is_some());
        }
    }

    #[test]
    fn product_score_operators() {
        let a = identity(2) * cr(0.5);
        let mut rng = random::seeded(3);
        let ks: Vec<CMatrix> = (0..3)
            .map(|_| tensor(&a, &random::random_psd_rank(2, 1, &mut rng)) * cr(1.0 / 3.0))
            .collect();
        let inst = DiscriminationInstance::from_operators(ks).unwrap();
        let cert = optimal_discrimination(&inst, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(cert.converged, "gap {}", cert.gap);
    }

    #[test]
    fn rejects_non_psd() {
        let k = CMatrix::from_diagonal(&DVector::from_vec(vec![cr(1.0), cr(-0.1)]));
        assert!(matches!(
            DiscriminationInstance::from_operators(vec![k]),
            Err(Error::NotPsd(_))
        ));
    }
}
