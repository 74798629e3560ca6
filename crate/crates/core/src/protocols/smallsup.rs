//! States supported on a Hamming ball around `0^n` in basis `θ_t̄`,
//! `Σ_{y ∈ B^δ(0^n)} α_y |ξ^y⟩_A |y⟩_θ`, and the binding checks on them.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::encoding::bb84_overlap;
use crate::coding::{binary_entropy, Bits, HammingBall, LinearCode};
use crate::error::{Error, Result};
use crate::measurement::{optimal_discrimination, DiscriminationInstance, DEFAULT_MAX_ITER};
use crate::quantum::random::{dirichlet_flat, haar_vector, seeded};
use crate::quantum::{tol, zero_entropy, CMatrix, RegisterShape, StateVector};

pub const MAX_SMALLSUP_QUBITS: usize = 10;
pub const MAX_SIDE_DIM: usize = 16;

#[derive(Clone, Debug)]
pub struct SmallSupState {
    pub theta: Bits,
    pub delta: f64,
    /// Ball members `y`, in order of increasing weight.
    pub support: Vec<Bits>,
    pub alphas: Vec<Complex64>,
    pub side: Vec<DVector<Complex64>>,
}

impl SmallSupState {
    pub fn new(theta: Bits, delta: f64, alphas: Vec<Complex64>, side: Vec<DVector<Complex64>>) -> Result<Self> {
        let n = theta.len();
        if n == 0 || n > MAX_SMALLSUP_QUBITS {
            return Err(Error::CapExceeded(format!(
                "small-support states need 1 ≤ n ≤ {MAX_SMALLSUP_QUBITS}"
            )));
        }
        let support = HammingBall::new(Bits::zeros(n), delta)?.members()?;
        if alphas.len() != support.len() || side.len() != support.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes and {} side states for a ball of size {}",
                alphas.len(),
                side.len(),
                support.len()
            )));
        }
        let dim_a = side.first().map_or(1, DVector::len);
        if dim_a > MAX_SIDE_DIM || side.iter().any(|v| v.len() != dim_a) {
            return Err(Error::DimensionMismatch(format!(
                "side states must share a dimension ≤ {MAX_SIDE_DIM}"
            )));
        }
        for v in &side {
            if (v.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::NotNormalized(v.norm_squared()));
            }
        }
        let norm: f64 = alphas.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            theta,
            delta,
            support,
            alphas,
            side,
        })
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn dim_a(&self) -> usize {
        self.side[0].len()
    }

    /// `G_{yy'} = α_y α*_{y'} ⟨ξ^{y'}|ξ^y⟩`, Bob's reduced state in the
    /// basis `{|y⟩_θ}`.
    pub fn gram(&self) -> CMatrix {
        let m = self.support.len();
        CMatrix::from_fn(m, m, |i, j| {
            self.alphas[i] * self.alphas[j].conj() * self.side[j].dotc(&self.side[i])
        })
    }

    /// `ρ_A = Σ_y |α_y|² |ξ^y⟩⟨ξ^y|`.
    pub fn rho_a(&self) -> CMatrix {
        let d = self.dim_a();
        let mut out = CMatrix::zeros(d, d);
        for (a, v) in self.alphas.iter().zip(&self.side) {
            out += v * v.adjoint() * Complex64::new(a.norm_sqr(), 0.0);
        }
        out
    }

    /// `H_0(A) = lg rank ρ_A`.
    pub fn h0_a(&self) -> Result<f64> {
        zero_entropy(&self.rho_a(), tol::RANK)
    }

    /// `⟨0^n|_{θ''} |y⟩_θ` for each support member.
    pub fn overlaps(&self, theta2: &Bits) -> Vec<f64> {
        let zero = Bits::zeros(self.n());
        self.support
            .iter()
            .map(|y| bb84_overlap(&zero, theta2, y, &self.theta))
            .collect()
    }

    /// `tr((I ⊗ |0^n⟩⟨0^n|_{θ''}) φ)`.
    pub fn acceptance(&self, theta2: &Bits) -> f64 {
        let c = self.overlaps(theta2);
        let g = self.gram();
        let mut acc = 0.0;
        for i in 0..c.len() {
            for j in 0..c.len() {
                acc += (g[(i, j)] * c[i] * c[j]).re;
            }
        }
        acc
    }

    /// `Tr_B[(I ⊗ |0^n⟩⟨0^n|_{θ''}) φ] = |v⟩⟨v|` with `v = Σ_y α_y c_y ξ^y`.
    pub fn score_operator(&self, theta2: &Bits) -> CMatrix {
        let c = self.overlaps(theta2);
        let mut v = DVector::zeros(self.dim_a());
        for ((a, xi), cy) in self.alphas.iter().zip(&self.side).zip(&c) {
            v += xi * (a * *cy);
        }
        &v * v.adjoint()
    }

    /// Full vector on `A ⊗ q0 … q{n−1}`.
    pub fn to_state_vector(&self) -> Result<StateVector> {
        let n = self.n();
        let dim_b = 1usize << n;
        let mut labels = vec![("A".to_string(), self.dim_a())];
        labels.extend((0..n).map(|i| (format!("q{i}"), 2)));
        let shape = RegisterShape::with_cap(labels, self.dim_a() * dim_b)?;
        let mut amps = DVector::zeros(self.dim_a() * dim_b);
        for ((y, a), xi) in self.support.iter().zip(&self.alphas).zip(&self.side) {
            let ket = super::encoding::bb84_encode(y, &self.theta)?;
            for (ia, xa) in xi.iter().enumerate() {
                for (ib, yb) in ket.amplitudes().iter().enumerate() {
                    amps[ia * dim_b + ib] += a * xa * yb;
                }
            }
        }
        StateVector::new(shape, amps)
    }
}

/// Haar-random side states and flat-Dirichlet weights with random phases.
pub fn sample_smallsup_state(theta: &Bits, delta: f64, dim_a: usize, seed: u64) -> Result<SmallSupState> {
    if dim_a == 0 || dim_a > MAX_SIDE_DIM {
        return Err(Error::CapExceeded(format!(
            "side dimension {dim_a} outside 1..={MAX_SIDE_DIM}"
        )));
    }
    if theta.len() > MAX_SMALLSUP_QUBITS {
        return Err(Error::CapExceeded(format!(
            "small-support states need n ≤ {MAX_SMALLSUP_QUBITS}"
        )));
    }
    let size = HammingBall::new(Bits::zeros(theta.len()), delta)?.size() as usize;
    let mut rng = seeded(seed);
    let weights = dirichlet_flat(size, &mut rng);
    let alphas = weights
        .iter()
        .map(|w| Complex64::from_polar(w.sqrt(), rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    let side = (0..size).map(|_| haar_vector(dim_a, &mut rng)).collect();
    SmallSupState::new(*theta, delta, alphas, side)
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma3Report {
    pub theta_prime: Bits,
    /// Largest acceptance over `θ'' ≠ θ'` with syndrome `s`; 0 if none.
    pub worst_value: f64,
    pub worst_theta: Option<Bits>,
    /// `2^{−d/2}(Σ_y |α_y|)²`, the intermediate step of the argument.
    pub intermediate_bound: f64,
    /// `2^{−d/2 + n h(δ)}`.
    pub bound: f64,
    pub pass: bool,
}

pub fn lemma3_bound_check(state: &SmallSupState, code: &LinearCode, s: &Bits) -> Result<Lemma3Report> {
    let n = state.n();
    if code.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "code length {} for {n} qubits",
            code.n()
        )));
    }
    let theta_prime = code.nearest_coset_rep(s, &state.theta)?;
    let mut worst = (0.0, None);
    for t in code.coset(s)? {
        if t == theta_prime {
            continue;
        }
        let v = state.acceptance(&t);
        if worst.1.is_none() || v > worst.0 {
            worst = (v, Some(t));
        }
    }
    let half_d = -(code.d() as f64) / 2.0;
    let l1: f64 = state.alphas.iter().map(|a| a.norm()).sum();
    let bound = 2f64.powf(half_d + n as f64 * binary_entropy(state.delta)?);
    Ok(Lemma3Report {
        theta_prime,
        worst_value: worst.0,
        worst_theta: worst.1,
        intermediate_bound: 2f64.powf(half_d) * l1 * l1,
        bound,
        pass: worst.0 <= bound + 1e-9,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtractionReport {
    /// Extracted bit `g(θ') ⊕ w`.
    pub c: bool,
    /// Number of openings `θ''` of the other bit.
    pub openings: usize,
    /// Certified upper bound on the adaptive success of opening `1 − c`.
    pub adaptive_upper: f64,
    pub non_adaptive: f64,
    pub h0_a: f64,
    pub lemma3_bound: f64,
    /// `2^{H_0(A)} · lemma3_bound`.
    pub chain_bound: f64,
    /// `2^{−n(τ/2 − 2h(δ))}` with `τ = d/n`.
    pub theorem_bound: f64,
    pub theorem_vacuous: bool,
    pub pass: bool,
}

/// Opening the bit opposite to the extractor's against a small-support
/// state: adaptive success versus `2^{H_0(A)}` times non-adaptive success.
pub fn extraction_check(
    state: &SmallSupState,
    code: &LinearCode,
    g: &Bits,
    s: &Bits,
    w: bool,
    tol: f64,
) -> Result<ExtractionReport> {
    let lemma = lemma3_bound_check(state, code, s)?;
    let c = g.dot(&lemma.theta_prime) ^ w;
    let others: Vec<Bits> = code.coset(s)?.into_iter().filter(|t| (g.dot(t) ^ w) != c).collect();
    let h0_a = state.h0_a()?;
    let (adaptive_upper, non_adaptive) = if others.is_empty() {
        (0.0, 0.0)
    } else {
        let ks: Vec<CMatrix> = others.iter().map(|t| state.score_operator(t)).collect();
        let na = others.iter().map(|t| state.acceptance(t)).fold(0.0, f64::max);
        let cert = optimal_discrimination(&DiscriminationInstance::from_operators(ks)?, tol, DEFAULT_MAX_ITER)?;
        (cert.dual_value, na)
    };
    let n = state.n() as f64;
    let tau = code.d() as f64 / n;
    let theorem_bound = 2f64.powf(-n * (tau / 2.0 - 2.0 * binary_entropy(state.delta)?));
    let chain_bound = 2f64.powf(h0_a) * lemma.bound;
    let slack = 1e-6;
    Ok(ExtractionReport {
        c,
        openings: others.len(),
        adaptive_upper,
        non_adaptive,
        h0_a,
        lemma3_bound: lemma.bound,
        chain_bound,
        theorem_bound,
        theorem_vacuous: theorem_bound >= 1.0,
        pass: adaptive_upper <= 2f64.powf(h0_a) * non_adaptive + slack && adaptive_upper <= chain_bound + slack,
    })
}
