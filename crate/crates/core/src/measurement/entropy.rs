use serde::{Deserialize, Serialize};

use super::barrier::{self, BarrierProblem};
use super::discrimination::{
    optimal_discrimination, DiscriminationInstance, SolverCertificate, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use super::CqState;
use crate::error::{Error, Result};
use crate::quantum::{
    cr, hermitian_part, identity, lambda_max, pinv_sqrt, reorder, tensor, trace_re, CMatrix, DensityOperator,
};

/// `P_guess(X|B)`: discrimination of the score operators `P(x) ρ_B^x`.
pub fn guessing_probability(cq: &CqState) -> Result<SolverCertificate> {
    guessing_probability_with(cq, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub fn guessing_probability_with(cq: &CqState, tolerance: f64, max_iter: usize) -> Result<SolverCertificate> {
    let inst = DiscriminationInstance::new(cq.shape().clone(), cq.score_operators())?;
    optimal_discrimination(&inst, tolerance, max_iter)
}

/// Certified interval for a conditional min-entropy, with the feasible
/// `σ_B` (`I_A ⊗ σ_B ⪰ ρ_AB`) that certifies `lower`.
#[derive(Clone, Debug)]
pub struct HminBracket {
    pub lower: f64,
    pub upper: f64,
    pub sigma: CMatrix,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HminSummary {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl HminBracket {
    pub fn value(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn summary(&self) -> HminSummary {
        HminSummary {
            lower: self.lower,
            upper: self.upper,
            iterations: self.iterations,
            converged: self.converged,
        }
    }
}

/// `Hmin(X|B) = −lg P_guess(X|B)`, bracketed by the guessing certificate.
pub fn hmin_cq(cq: &CqState) -> Result<HminBracket> {
    let cert = guessing_probability(cq)?;
    Ok(HminBracket {
        lower: -cert.dual_value.log2(),
        upper: -cert.primal_value.log2(),
        sigma: cert.dual_witness,
        iterations: cert.iterations,
        converged: cert.converged,
    })
}

/// `Hmin(A|B) = −lg min{tr σ_B : I_A ⊗ σ_B ⪰ ρ_AB}` where `A` is the set of
/// subsystems `a_labels` and `B` everything else.
///
/// Lower side: a repaired, exactly feasible `σ_B`. Upper side: a
/// renormalized conjugate point `Z ⪰ 0` with `Tr_A Z = I_B`, whose value
/// `tr(Zρ)` never exceeds the optimum.
pub fn hmin_general(rho: &DensityOperator, a_labels: &[&str], tolerance: f64, max_iter: usize) -> Result<HminBracket> {
    if a_labels.is_empty() {
        return Err(Error::Input("hmin_general needs a non-empty A register".into()));
    }
    let (m, _) = reorder(rho.matrix(), rho.shape(), a_labels)?;
    let d_a = rho.shape().dim_of_set(a_labels)?;
    let d_b = rho.dim() / d_a;
    let scale = lambda_max(&m)?;
    let k = hermitian_part(&m) * cr(1.0 / scale);
    let ks = [k.clone()];
    let problem = BarrierProblem {
        d: d_b,
        m: d_a,
        ks: &ks,
    };

    let mut y = identity(d_b) * cr(2.0);
    let mut mu = 1.0;
    let mu_floor = 1e-5 * tolerance / (d_a * d_b) as f64;
    let mut iterations = 0;
    let mut best: Option<(f64, f64, CMatrix)> = None;
    loop {
        let sol = barrier::center(&problem, y, mu, max_iter.saturating_sub(iterations));
        iterations += sol.iterations;
        y = sol.y.clone();

        let sigma = repair_sigma(&k, &sol.y, d_a)?;
        let lower = -(trace_re(&sigma) * scale).log2();
        let z = &sol.duals[0];
        let t = trace_out_leading(z, d_a, d_b);
        let (t_inv_sqrt, _) = pinv_sqrt(&hermitian_part(&t), 0.0)?;
        let lift = tensor(&identity(d_a), &t_inv_sqrt);
        let z = hermitian_part(&(&lift * z * &lift));
        let upper = -(trace_re(&(&z * &k)) * scale).log2();

        let take = match &best {
            None => true,
            Some((lo, up, _)) => lower > *lo || upper < *up,
        };
        if take {
            let (lo, up, s) = match best.take() {
                None => (lower, upper, sigma.clone() * cr(scale)),
                Some((lo, up, s)) => {
                    let s = if lower > lo { sigma.clone() * cr(scale) } else { s };
                    (lo.max(lower), up.min(upper), s)
                }
            };
            best = Some((lo, up, s));
        }
        let (lo, up, _) = best.as_ref().expect("set above");
        if up - lo <= tolerance || iterations >= max_iter || mu <= mu_floor {
            break;
        }
        mu *= 0.1;
    }
    let (lower, upper, sigma) = best.expect("at least one barrier pass");
    Ok(HminBracket {
        lower,
        upper,
        sigma,
        iterations,
        converged: upper - lower <= tolerance,
    })
}

fn trace_out_leading(z: &CMatrix, d_a: usize, d_b: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d_b, d_b);
    for l in 0..d_a {
        out += z.view((l * d_b, l * d_b), (d_b, d_b));
    }
    out
}

fn repair_sigma(k: &CMatrix, sigma: &CMatrix, d_a: usize) -> Result<CMatrix> {
    let sigma = hermitian_part(sigma);
    let lifted = tensor(&identity(d_a), &sigma);
    let shift = lambda_max(&hermitian_part(&(k - lifted)))?;
    let d_b = sigma.nrows();
    if shift > 0.0 {
        Ok(sigma + identity(d_b) * cr(shift * (1.0 + 1e-12) + 1e-15))
    } else {
        Ok(sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{c, loewner_leq, projector_onto, random, RegisterShape, StateVector};
    use nalgebra::DVector;

    fn pure(shape: RegisterShape, amps: &[f64]) -> DensityOperator {
        let v = DVector::from_iterator(amps.len(), amps.iter().map(|a| c(*a, 0.0)));
        StateVector::normalized(shape, v).unwrap().to_density()
    }

    #[test]
    fn cq_trivial_cases() {
        let b = RegisterShape::single("B", 1).unwrap();
        let one = DensityOperator::maximally_mixed(b.clone());
        let cq = CqState::uniform(vec![one.clone(); 8]).unwrap();
        assert!((hmin_cq(&cq).unwrap().value() - 3.0).abs() < 1e-7);
        let det = CqState::new(vec!["x".into()], vec![1.0], vec![one]).unwrap();
        assert!(hmin_cq(&det).unwrap().value().abs() < 1e-9);
    }

    #[test]
    fn cq_theta_guessing() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = RegisterShape::single("B", 2).unwrap();
        let cq = CqState::uniform(vec![pure(q.clone(), &[1.0, 0.0]), pure(q, &[s, s])]).unwrap();
        let gamma = (std::f64::consts::PI / 8.0).cos().powi(2);
        let cert = guessing_probability(&cq).unwrap();
        assert!((cert.primal_value - gamma).abs() < 1e-7);
        let h = hmin_cq(&cq).unwrap();
        assert!((h.value() - (1.0 / gamma).log2()).abs() < 1e-6);
        assert!((h.value() - 0.2284).abs() < 1e-4);
    }

    #[test]
    fn general_product_with_uniform_a() {
        let mut rng = random::seeded(11);
        let rho_b = random::random_density(&RegisterShape::single("B", 2).unwrap(), 2, &mut rng).unwrap();
        let rho_a = DensityOperator::maximally_mixed(RegisterShape::single("A", 2).unwrap());
        let rho = rho_a.tensor(&rho_b).unwrap();
        let h = hmin_general(&rho, &["A"], 1e-7, 10_000).unwrap();
        assert!(h.converged, "{h:?}");
        assert!(h.lower <= 1.0 + 1e-9 && h.upper >= 1.0 - 1e-9);
    }

    #[test]
    fn general_maximally_entangled() {
        let shape = RegisterShape::new(vec![("A", 2), ("B", 2)]).unwrap();
        let rho = pure(shape, &[1.0, 0.0, 0.0, 1.0]);
        let h = hmin_general(&rho, &["A"], 1e-7, 10_000).unwrap();
        assert!(h.converged, "{h:?}");
        assert!((h.value() + 1.0).abs() < 1e-7);
        let lifted = tensor(&identity(2), &h.sigma);
        assert!(loewner_leq(rho.matrix(), &lifted, 1e-9).unwrap());
    }

    #[test]
    fn general_matches_cq() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = RegisterShape::single("B", 2).unwrap();
        let states = vec![pure(q.clone(), &[1.0, 0.0]), pure(q, &[s, s])];
        let cq = CqState::uniform(states.clone()).unwrap();
        let x0 = projector_onto(&DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]));
        let x1 = identity(2) - &x0;
        let joint = tensor(&x0, states[0].matrix()) * cr(0.5) + tensor(&x1, states[1].matrix()) * cr(0.5);
        let shape = RegisterShape::new(vec![("X", 2), ("B", 2)]).unwrap();
        let rho = DensityOperator::new(shape, joint).unwrap();
        let general = hmin_general(&rho, &["X"], 1e-7, 10_000).unwrap();
        let cqv = hmin_cq(&cq).unwrap();
        assert!((general.value() - cqv.value()).abs() < 1e-7);
    }

    #[test]
    fn a_after_b_in_declaration_order() {
        let shape = RegisterShape::new(vec![("B", 2), ("A", 2)]).unwrap();
        let mut rng = random::seeded(5);
        let rho_b = random::random_density(&RegisterShape::single("B", 2).unwrap(), 1, &mut rng).unwrap();
        let rho_a = DensityOperator::maximally_mixed(RegisterShape::single("A", 2).unwrap());
        let rho = DensityOperator::new(shape, rho_b.tensor(&rho_a).unwrap().matrix().clone()).unwrap();
        let h = hmin_general(&rho, &["A"], 1e-7, 10_000).unwrap();
        assert!((h.value() - 1.0).abs() < 1e-7);
    }
}
