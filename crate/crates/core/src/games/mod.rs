//! Attack games: an index `j` is announced and the binary measurement `E^j`
//! on register `B` must answer 1. Non-adaptive, semi-adaptive and adaptive
//! success probabilities, and the bounds relating them.

mod bell;
mod io;

pub use bell::{bell_counterexample, random_game};
pub use io::FamilyFile;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{imax_from_scores, search_family, zero_entropy_of};
use crate::measurement::{
    optimal_discrimination, CertificateSummary, DiscriminationInstance, SolverCertificate, DEFAULT_MAX_ITER,
};
use crate::quantum::{
    embed_operator, hermitian_part, identity, lambda_min, partial_trace_op, reorder, spectral_norm, tol, trace_re,
    CMatrix, DensityOperator, RegisterShape,
};

pub const MAX_FAMILY_SIZE: usize = 64;

/// `{(E0^j, E1^j)}` on one register, `E0 + E1 = I`.
#[derive(Clone, Debug)]
pub struct BinaryPovmFamily {
    shape: RegisterShape,
    labels: Vec<String>,
    effects: Vec<(CMatrix, CMatrix)>,
}

impl BinaryPovmFamily {
    pub fn new(shape: RegisterShape, labels: Vec<String>, effects: Vec<(CMatrix, CMatrix)>) -> Result<Self> {
        if labels.is_empty() || labels.len() != effects.len() {
            return Err(Error::Input(
                "a family needs one label per non-empty effect pair".into(),
            ));
        }
        if labels.len() > MAX_FAMILY_SIZE {
            return Err(Error::CapExceeded(format!(
                "family of size {} exceeds {MAX_FAMILY_SIZE}",
                labels.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let d = shape.dim();
        for (e0, e1) in &effects {
            for e in [e0, e1] {
                if e.shape() != (d, d) {
                    return Err(Error::DimensionMismatch(format!(
                        "effect {:?} on a register of dimension {d}",
                        e.shape()
                    )));
                }
                let low = lambda_min(e)?;
                if low < -tol::PSD {
                    return Err(Error::NotPsd(low));
                }
            }
            let defect = spectral_norm(&(e0 + e1 - identity(d)));
            if defect > tol::EQ {
                return Err(Error::NotComplete(defect));
            }
        }
        Ok(Self { shape, labels, effects })
    }

    /// Family given by its accepting effects `E1^j`.
    pub fn from_accepting(shape: RegisterShape, labels: Vec<String>, e1: Vec<CMatrix>) -> Result<Self> {
        let d = shape.dim();
        let effects = e1.into_iter().map(|e| (identity(d) - &e, e)).collect();
        Self::new(shape, labels, effects)
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn accepting(&self, j: usize) -> &CMatrix {
        &self.effects[j].1
    }

    pub fn effects(&self) -> &[(CMatrix, CMatrix)] {
        &self.effects
    }
}

/// State on registers `A`, `A'`, `B` (each a set of subsystem labels, `A`
/// and `A'` possibly empty) and a family on `B`.
#[derive(Clone, Debug)]
pub struct AttackGame {
    state: DensityOperator,
    a: Vec<String>,
    a_prime: Vec<String>,
    b: Vec<String>,
    family: BinaryPovmFamily,
}

impl AttackGame {
    pub fn new(
        state: DensityOperator,
        a: Vec<String>,
        a_prime: Vec<String>,
        b: Vec<String>,
        family: BinaryPovmFamily,
    ) -> Result<Self> {
        let mut seen: Vec<&String> = Vec::new();
        for l in a.iter().chain(&a_prime).chain(&b) {
            if seen.contains(&l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
            state.shape().index_of(l)?;
            seen.push(l);
        }
        if seen.len() != state.shape().len() {
            return Err(Error::Input("registers A, A', B must cover every subsystem".into()));
        }
        let b_refs: Vec<&str> = b.iter().map(String::as_str).collect();
        let d_b = state.shape().dim_of_set(&b_refs)?;
        if family.shape().dim() != d_b {
            return Err(Error::DimensionMismatch(format!(
                "family on dimension {}, register B has dimension {d_b}",
                family.shape().dim()
            )));
        }
        Ok(Self {
            state,
            a,
            a_prime,
            b,
            family,
        })
    }

    pub fn state(&self) -> &DensityOperator {
        &self.state
    }

    pub fn family(&self) -> &BinaryPovmFamily {
        &self.family
    }

    pub fn a(&self) -> Vec<&str> {
        self.a.iter().map(String::as_str).collect()
    }

    pub fn a_prime(&self) -> Vec<&str> {
        self.a_prime.iter().map(String::as_str).collect()
    }

    pub fn b(&self) -> Vec<&str> {
        self.b.iter().map(String::as_str).collect()
    }

    fn a_all(&self) -> Vec<&str> {
        self.a.iter().chain(&self.a_prime).map(String::as_str).collect()
    }

    /// `ρ_B`.
    pub fn rho_b(&self) -> Result<CMatrix> {
        Ok(partial_trace_op(self.state.matrix(), self.state.shape(), &self.b())?.0)
    }

    /// `K_j = Tr_B[(I ⊗ E1^j) ρ]` restricted to the subsystems `keep`.
    pub fn score_operators(&self, keep: &[&str]) -> Result<(Vec<CMatrix>, RegisterShape)> {
        let shape = self.state.shape();
        let b = self.b();
        let mut out = Vec::with_capacity(self.family.len());
        let mut kept_shape = shape.restrict(keep)?;
        for j in 0..self.family.len() {
            let lifted = embed_operator(self.family.accepting(j), &b, shape)?;
            let (k, s) = partial_trace_op(&hermitian_part(&(lifted * self.state.matrix())), shape, keep)?;
            out.push(hermitian_part(&k));
            kept_shape = s;
        }
        Ok((out, kept_shape))
    }
}

/// `max_j tr(E1^j ρ_B)` and the first maximizing index.
pub fn non_adaptive_success(g: &AttackGame) -> Result<(f64, usize)> {
    let rho_b = g.rho_b()?;
    let mut best = (f64::NEG_INFINITY, 0);
    for j in 0..g.family.len() {
        let v = trace_re(&(g.family.accepting(j) * &rho_b));
        if v > best.0 {
            best = (v, j);
        }
    }
    Ok(best)
}

fn discrimination_over(g: &AttackGame, keep: &[&str], tolerance: f64) -> Result<SolverCertificate> {
    let (ks, shape) = g.score_operators(keep)?;
    let inst = DiscriminationInstance::new(shape, ks)?;
    optimal_discrimination(&inst, tolerance, DEFAULT_MAX_ITER)
}

/// `max_{F} Σ_j tr((F_j ⊗ E1^j) ρ)` with `F` a POVM on `AA'`.
pub fn adaptive_success(g: &AttackGame, tolerance: f64) -> Result<SolverCertificate> {
    discrimination_over(g, &g.a_all(), tolerance)
}

/// Adaptive success when only `A'` may be measured.
pub fn semi_adaptive_success(g: &AttackGame, tolerance: f64) -> Result<SolverCertificate> {
    discrimination_over(g, &g.a_prime(), tolerance)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    /// A failure here is a documented property of the game, not a defect.
    pub expected_violation: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GameResult {
    pub p_na: f64,
    pub best_j: String,
    pub p_semi: f64,
    pub p_adaptive: f64,
    pub h0_a: f64,
    pub a_prime_classical: bool,
    pub certificates: GameCertificates,
    pub bound_checks: Vec<BoundCheck>,
    /// Set when check (i) fails on a game with quantum `A'`, where it is not
    /// claimed to hold.
    pub expected_violation: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GameCertificates {
    pub semi: CertificateSummary,
    pub adaptive: CertificateSummary,
}

impl GameResult {
    pub fn all_pass(&self) -> bool {
        self.bound_checks.iter().all(|c| c.pass || c.expected_violation)
    }
}

/// Whether the state is block diagonal in the computational basis of `labels`.
pub fn is_classical_on(state: &DensityOperator, labels: &[&str]) -> Result<bool> {
    if labels.is_empty() {
        return Ok(true);
    }
    let (m, _) = reorder(state.matrix(), state.shape(), labels)?;
    let d = state.shape().dim_of_set(labels)?;
    let rest = state.dim() / d;
    for z in 0..d {
        for w in 0..d {
            if z != w {
                let block = m.view((z * rest, w * rest), (rest, rest));
                if block.iter().any(|v| v.norm() >= 1e-10) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

pub const DEFAULT_GAME_TOL: f64 = 1e-6;

/// Non-adaptive, semi-adaptive and adaptive values with the bound checks:
/// (i) `P^A ≤ 2^{H_0(A)} P^{semi}` (claimed when `A'` is empty or
/// classical), (ii) for searched measurements `M` on `AA'`, the strategy
/// induced by `M` succeeds with probability at most `2^{λ(M)} P^{NA}`, and
/// (iii) the chain `P^{NA} ≤ P^{semi} ≤ P^A`.
pub fn verify_main_theorem(g: &AttackGame, tolerance: f64, search_budget: usize, seed: u64) -> Result<GameResult> {
    let (p_na, best_j) = non_adaptive_success(g)?;
    let semi = semi_adaptive_success(g, 1e-7)?;
    let adaptive = adaptive_success(g, 1e-7)?;
    let a = g.a();
    let h0_a = if a.is_empty() {
        0.0
    } else {
        zero_entropy_of(&g.state, &a)?
    };
    let a_prime_classical = is_classical_on(&g.state, &g.a_prime())?;
    let mut checks = Vec::new();

    let lhs = adaptive.dual_value;
    let rhs = 2f64.powf(h0_a) * semi.primal_value;
    let pass = lhs <= rhs + tolerance;
    checks.push(BoundCheck {
        name: "(i) adaptive <= 2^H0(A) * semi".into(),
        lhs,
        rhs,
        pass,
        expected_violation: !pass && !a_prime_classical,
    });

    let a_all = g.a_all();
    if !a_all.is_empty() {
        let rho_b = g.rho_b()?;
        let shape_aa = g.state.shape().restrict(&a_all)?;
        let aa_labels: Vec<&str> = shape_aa.labels().collect();
        let mut candidates = search_family(&shape_aa, search_budget, seed)?;
        candidates.push(adaptive.primal_povm.clone());
        let mut worst_ratio = f64::NEG_INFINITY;
        let mut worst = (0.0, 0.0);
        for povm in &candidates {
            let scores = outcome_scores_on_b(g, &aa_labels, povm.elements())?;
            let lambda = imax_from_scores(&scores, &rho_b)?.value;
            let induced: f64 = scores
                .iter()
                .map(|k| {
                    (0..g.family.len())
                        .map(|j| trace_re(&(g.family.accepting(j) * k)))
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .sum();
            let bound = 2f64.powf(lambda) * p_na;
            if induced - bound > worst_ratio {
                worst_ratio = induced - bound;
                worst = (induced, bound);
            }
        }
        checks.push(BoundCheck {
            name: "(ii) induced strategy <= 2^lambda(M) * non-adaptive".into(),
            lhs: worst.0,
            rhs: worst.1,
            pass: worst.0 <= worst.1 + tolerance,
            expected_violation: false,
        });
    }

    checks.push(BoundCheck {
        name: "(iii) non-adaptive <= semi".into(),
        lhs: p_na,
        rhs: semi.dual_value,
        pass: p_na <= semi.dual_value + 1e-8,
        expected_violation: false,
    });
    checks.push(BoundCheck {
        name: "(iii) semi <= adaptive".into(),
        lhs: semi.primal_value,
        rhs: adaptive.dual_value,
        pass: semi.primal_value <= adaptive.dual_value + 1e-8,
        expected_violation: false,
    });

    let expected_violation = checks.iter().any(|c| c.expected_violation);
    Ok(GameResult {
        p_na,
        best_j: g.family.labels()[best_j].clone(),
        p_semi: semi.primal_value,
        p_adaptive: adaptive.primal_value,
        h0_a,
        a_prime_classical,
        certificates: GameCertificates {
            semi: semi.summary(),
            adaptive: adaptive.summary(),
        },
        bound_checks: checks,
        expected_violation,
    })
}

/// `Tr_{AA'}[(F_x ⊗ I) ρ]` for a POVM whose tensor factors are `labels`.
fn outcome_scores_on_b(g: &AttackGame, labels: &[&str], povm: &[CMatrix]) -> Result<Vec<CMatrix>> {
    let shape = g.state.shape();
    let b = g.b();
    povm.iter()
        .map(|f| {
            let lifted = embed_operator(f, labels, shape)?;
            let (k, _) = partial_trace_op(&hermitian_part(&(lifted * g.state.matrix())), shape, &b)?;
            Ok(hermitian_part(&k))
        })
        .collect()
}
