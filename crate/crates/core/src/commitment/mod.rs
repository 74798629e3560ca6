//! Non-interactive commitments with projective verification: binding
//! probabilities, the opening-projector construction, the cheat state built
//! from them, and the bounded-storage reduction.
//!
//! Worst-case non-adaptive advantage: for projectors `V, V'`,
//! `max_ρ tr((V + V')ρ) = ‖V + V'‖` (the top eigenvalue of a PSD operator),
//! so `ε_NA = max_{y0, y1} ‖V_{y0} + V_{y1}‖ − 1`.

mod projective;

pub use projective::{best_projective, ProjectiveSearch, NET_STEP_DEGREES};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{optimal_discrimination, DiscriminationInstance, DEFAULT_MAX_ITER};
use crate::quantum::ops::eig_unchecked;
use crate::quantum::random::{child_seed, haar_state, seeded};
use crate::quantum::{
    embed_operator, hermitian_part, identity, is_projector, partial_trace_op, reorder, spectral_norm, tensor, trace_re,
    CMatrix, DensityOperator, MatrixFile, RegisterShape, StateVector,
};

/// Projector residual tolerated by the scheme and strategy constructors.
pub const PROJECTOR_TOL: f64 = 1e-9;

/// Verification projectors `V_{x,y}` on Bob's register for each opening
/// label `y ∈ Y_b`, for a fixed commitment message `x`.
#[derive(Clone, Debug)]
pub struct ProjectiveCommitmentScheme {
    shape: RegisterShape,
    openings: [Vec<(String, CMatrix)>; 2],
}

impl ProjectiveCommitmentScheme {
    pub fn new(shape: RegisterShape, open0: Vec<(String, CMatrix)>, open1: Vec<(String, CMatrix)>) -> Result<Self> {
        let d = shape.dim();
        for list in [&open0, &open1] {
            if list.is_empty() {
                return Err(Error::Input("each bit needs at least one opening".into()));
            }
            for (i, (label, v)) in list.iter().enumerate() {
                if list[..i].iter().any(|(l, _)| l == label) {
                    return Err(Error::DuplicateLabel(label.clone()));
                }
                if v.shape() != (d, d) {
                    return Err(Error::DimensionMismatch(format!(
                        "verification projector {:?} on dimension {d}",
                        v.shape()
                    )));
                }
                let r = is_projector(v);
                if r > PROJECTOR_TOL {
                    return Err(Error::NotProjector(r));
                }
            }
        }
        Ok(Self {
            shape,
            openings: [open0, open1],
        })
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn openings(&self, b: usize) -> &[(String, CMatrix)] {
        &self.openings[b]
    }

    pub fn projectors(&self, b: usize) -> Vec<CMatrix> {
        self.openings[b].iter().map(|(_, v)| v.clone()).collect()
    }

    /// `max_{y0, y1} ‖V_{y0} + V_{y1}‖ − 1`, clipped at 0.
    pub fn eps_na(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (_, v0) in &self.openings[0] {
            for (_, v1) in &self.openings[1] {
                worst = worst.max(spectral_norm(&(v0 + v1)) - 1.0);
            }
        }
        worst.max(0.0)
    }
}

/// A projective measurement on Alice's register per bit, one outcome per
/// opening label.
#[derive(Clone, Debug)]
pub struct OpeningStrategy {
    measurements: [Vec<CMatrix>; 2],
}

impl OpeningStrategy {
    pub fn new(f0: Vec<CMatrix>, f1: Vec<CMatrix>) -> Result<Self> {
        for f in [&f0, &f1] {
            let d = f.first().map_or(0, CMatrix::nrows);
            let mut sum = CMatrix::zeros(d, d);
            for p in f {
                if p.shape() != (d, d) {
                    return Err(Error::DimensionMismatch("strategy elements differ in shape".into()));
                }
                let r = is_projector(p);
                if r > PROJECTOR_TOL {
                    return Err(Error::NotProjector(r));
                }
                sum += p;
            }
            let defect = spectral_norm(&(sum - identity(d)));
            if defect > PROJECTOR_TOL {
                return Err(Error::NotComplete(defect));
            }
        }
        Ok(Self { measurements: [f0, f1] })
    }

    pub fn measurement(&self, b: usize) -> &[CMatrix] {
        &self.measurements[b]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BindingMode {
    NonAdaptive,
    PovmRelaxation,
    ProjectiveBruteforce,
}

#[derive(Clone, Debug, Serialize)]
pub struct BindingReport {
    pub p0: f64,
    pub p1: f64,
    /// `p0 + p1 − 1`, clipped at 0.
    pub epsilon: f64,
    pub mode: BindingMode,
    /// Certified upper bounds on `p0`, `p1` (equal to the values when exact).
    pub upper: [f64; 2],
    /// Net-resolution error per bit in brute-force mode.
    pub net_error: Option<[f64; 2]>,
    pub cheat_state: Option<StateVector>,
}

fn report(p: [f64; 2], upper: [f64; 2], mode: BindingMode, net_error: Option<[f64; 2]>) -> BindingReport {
    BindingReport {
        p0: p[0],
        p1: p[1],
        epsilon: (p[0] + p[1] - 1.0).max(0.0),
        mode,
        upper,
        net_error,
        cheat_state: None,
    }
}

/// `P_b^{NA} = max_{y_b} tr(V_{y_b} ρ_B)`.
pub fn na_binding(scheme: &ProjectiveCommitmentScheme, rho_b: &CMatrix) -> Result<BindingReport> {
    if rho_b.shape() != (scheme.dim(), scheme.dim()) {
        return Err(Error::DimensionMismatch(
            "ρ_B does not match the scheme register".into(),
        ));
    }
    let mut p = [0.0; 2];
    for (b, pb) in p.iter_mut().enumerate() {
        *pb = scheme.openings[b]
            .iter()
            .map(|(_, v)| trace_re(&(v * rho_b)))
            .fold(f64::NEG_INFINITY, f64::max);
    }
    Ok(report(p, p, BindingMode::NonAdaptive, None))
}

/// `K_{y_b} = Tr_B[(I ⊗ V_{y_b}) ρ_AB]` on `A`, with `A` the subsystems
/// `a_labels` and `B` the rest.
pub fn binding_scores(
    scheme: &ProjectiveCommitmentScheme,
    rho: &DensityOperator,
    a_labels: &[&str],
    b: usize,
) -> Result<Vec<CMatrix>> {
    let (m, _) = reorder(rho.matrix(), rho.shape(), a_labels)?;
    let d_a = rho.shape().dim_of_set(a_labels)?;
    if rho.dim() / d_a != scheme.dim() {
        return Err(Error::DimensionMismatch("register B does not match the scheme".into()));
    }
    let two = RegisterShape::new(vec![("A", d_a), ("B", scheme.dim())])?;
    scheme.openings[b]
        .iter()
        .map(|(_, v)| {
            let lifted = embed_operator(v, &["B"], &two)?;
            Ok(hermitian_part(&partial_trace_op(&(lifted * &m), &two, &["A"])?.0))
        })
        .collect()
}

/// Adaptive binding probabilities against an adversary holding `A`.
pub fn adaptive_binding(
    scheme: &ProjectiveCommitmentScheme,
    rho: &DensityOperator,
    a_labels: &[&str],
    mode: BindingMode,
    seed: u64,
) -> Result<BindingReport> {
    if a_labels.is_empty() || mode == BindingMode::NonAdaptive {
        let rest = rho.shape().complement(a_labels);
        let (rho_b, _) = partial_trace_op(rho.matrix(), rho.shape(), &rest)?;
        return na_binding(scheme, &rho_b);
    }
    let mut p = [0.0; 2];
    let mut upper = [0.0; 2];
    let mut errors = [0.0; 2];
    let mut found: Vec<Vec<CMatrix>> = Vec::new();
    for b in 0..2 {
        let ks = binding_scores(scheme, rho, a_labels, b)?;
        let inst = DiscriminationInstance::from_operators(ks.clone())?;
        let cert = optimal_discrimination(&inst, 1e-9, DEFAULT_MAX_ITER)?;
        match mode {
            BindingMode::PovmRelaxation => {
                p[b] = cert.dual_value;
                upper[b] = cert.dual_value;
            }
            BindingMode::ProjectiveBruteforce => {
                let search = best_projective(&ks, cert.dual_value, child_seed(seed, b as u64))?;
                p[b] = search.value;
                errors[b] = search.error;
                upper[b] = search.value + search.error;
                found.push(search.projectors);
            }
            BindingMode::NonAdaptive => unreachable!(),
        }
    }
    if mode == BindingMode::PovmRelaxation {
        return Ok(report(p, upper, mode, None));
    }
    let mut out = report(p, upper, mode, Some(errors));
    let f1 = found.pop().expect("two bits");
    let f0 = found.pop().expect("two bits");
    let (p0, p1) = opening_projectors(scheme, &OpeningStrategy::new(f0, f1)?)?;
    if let Some(phi0) = cheat_state(&p0, &p1)?.phi0 {
        let d_a = rho.dim() / scheme.dim();
        let shape = RegisterShape::new(vec![("A", d_a), ("B", scheme.dim())])?;
        out.cheat_state = Some(StateVector::normalized(shape, phi0)?);
    }
    Ok(out)
}

/// `ℙ_b = Σ_{y_b} F_{y_b} ⊗ V_{y_b}` on `A ⊗ B`.
pub fn opening_projectors(
    scheme: &ProjectiveCommitmentScheme,
    strategy: &OpeningStrategy,
) -> Result<(CMatrix, CMatrix)> {
    let mut out = Vec::with_capacity(2);
    for b in 0..2 {
        let fs = strategy.measurement(b);
        let vs = &scheme.openings[b];
        if fs.len() != vs.len() {
            return Err(Error::DimensionMismatch(format!(
                "strategy has {} outcomes for bit {b}, scheme has {} openings",
                fs.len(),
                vs.len()
            )));
        }
        let d = fs[0].nrows() * scheme.dim();
        let mut p = CMatrix::zeros(d, d);
        for (f, (_, v)) in fs.iter().zip(vs) {
            p += tensor(f, v);
        }
        let r = is_projector(&p);
        if r > PROJECTOR_TOL {
            return Err(Error::NotProjector(r));
        }
        out.push(p);
    }
    let p1 = out.pop().expect("two");
    let p0 = out.pop().expect("two");
    Ok((p0, p1))
}

#[derive(Clone, Debug, Serialize)]
pub struct NormLemmaCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `‖X + Y‖ ≤ 1 + ‖XY‖` for projectors.
pub fn norm_lemma_check(x: &CMatrix, y: &CMatrix) -> Result<NormLemmaCheck> {
    for p in [x, y] {
        let r = is_projector(p);
        if r > PROJECTOR_TOL {
            return Err(Error::NotProjector(r));
        }
    }
    let lhs = spectral_norm(&(x + y));
    let rhs = 1.0 + spectral_norm(&(x * y));
    Ok(NormLemmaCheck {
        lhs,
        rhs,
        pass: lhs <= rhs + 1e-9,
    })
}

#[derive(Clone, Debug)]
pub struct CheatState {
    /// Unit vector in the range of `ℙ0`; `None` when `ℙ1ℙ0 = 0`.
    pub phi0: Option<DVector<num_complex::Complex64>>,
    /// `‖ℙ1ℙ0‖`.
    pub eps: f64,
}

/// `φ` = top right-singular vector of `ℙ1ℙ0`, `φ0 = ℙ0φ/‖ℙ0φ‖`: opens 0
/// with certainty and 1 with probability `‖ℙ1ℙ0‖²`.
pub fn cheat_state(p0: &CMatrix, p1: &CMatrix) -> Result<CheatState> {
    if p0.shape() != p1.shape() {
        return Err(Error::DimensionMismatch(
            "cheat_state projectors differ in shape".into(),
        ));
    }
    // Top eigenvector of ℙ0ℙ1ℙ0 = (ℙ1ℙ0)†(ℙ1ℙ0).
    let gram = hermitian_part(&(p0 * p1 * p0));
    let eig = eig_unchecked(&gram);
    let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    if top <= 1e-24 {
        return Ok(CheatState { phi0: None, eps: 0.0 });
    }
    let phi = eig.vectors.column(0).into_owned();
    let projected = p0 * &phi;
    let norm = projected.norm();
    let phi0 = projected / num_complex::Complex64::new(norm, 0.0);
    let eps = (p1 * &phi0).norm() * norm;
    Ok(CheatState { phi0: Some(phi0), eps })
}

/// `⟨φ|P|φ⟩`.
pub fn acceptance(p: &CMatrix, phi: &DVector<num_complex::Complex64>) -> f64 {
    (phi.adjoint() * p * phi)[(0, 0)].re
}

#[derive(Clone, Debug, Serialize)]
pub struct StorageTrial {
    pub alpha: f64,
    pub bound: f64,
    /// Net error of the two brute-force searches: the true projective
    /// `α` lies in `[alpha, alpha + slack]`.
    pub slack: f64,
    pub pass: bool,
    /// False for relaxation-mode values, which may exceed the projective
    /// optimum and are reported for diagnosis only.
    pub assertable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StorageReport {
    pub q: usize,
    pub eps_na: f64,
    pub bound: f64,
    pub mode: BindingMode,
    pub trials: Vec<StorageTrial>,
    pub pass: bool,
}

/// Samples adversary states with a `q`-qubit register `A` and checks
/// `p0 + p1 − 1 ≤ 2^{q/2} √ε_NA`. The first trial is the worst
/// non-adaptive state padded with `|0⟩_A`; the rest are Haar random.
pub fn storage_reduction_check(
    scheme: &ProjectiveCommitmentScheme,
    q: usize,
    eps_na: f64,
    trials: usize,
    mode: BindingMode,
    seed: u64,
) -> Result<StorageReport> {
    if q > 2 {
        return Err(Error::CapExceeded(format!("storage check supports q ≤ 2, got {q}")));
    }
    let bound = 2f64.powf(q as f64 / 2.0) * eps_na.sqrt();
    let d_a = 1usize << q;
    let shape = RegisterShape::new(vec![("A", d_a), ("B", scheme.dim())])?;
    let mut out = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = seeded(child_seed(seed, t as u64));
        let rho = if t == 0 {
            worst_na_state(scheme, &shape)?
        } else {
            haar_state(&shape, &mut rng)?.to_density()
        };
        let r = adaptive_binding(scheme, &rho, &["A"], mode, child_seed(seed, 1_000 + t as u64))?;
        let alpha = r.p0 + r.p1 - 1.0;
        let slack = r.net_error.map_or(0.0, |e| e[0] + e[1]);
        let assertable = mode != BindingMode::PovmRelaxation;
        out.push(StorageTrial {
            alpha,
            bound,
            slack,
            pass: alpha <= bound + 1e-9,
            assertable,
        });
    }
    let pass = out.iter().all(|t| t.pass || !t.assertable);
    Ok(StorageReport {
        q,
        eps_na,
        bound,
        mode,
        trials: out,
        pass,
    })
}

/// `|0⟩_A` tensored with the top eigenvector of the worst `V_{y0} + V_{y1}`.
fn worst_na_state(scheme: &ProjectiveCommitmentScheme, shape: &RegisterShape) -> Result<DensityOperator> {
    let mut best = (f64::NEG_INFINITY, CMatrix::zeros(1, 1));
    for (_, v0) in &scheme.openings[0] {
        for (_, v1) in &scheme.openings[1] {
            let s = v0 + v1;
            let n = spectral_norm(&s);
            if n > best.0 {
                best = (n, s);
            }
        }
    }
    let eig = crate::quantum::eig_hermitian(&hermitian_part(&best.1))?;
    let top = eig.vectors.column(0).into_owned();
    let d_a = shape.dim() / scheme.dim();
    let mut a = DVector::zeros(d_a);
    a[0] = num_complex::Complex64::new(1.0, 0.0);
    let amps = a.kronecker(&top);
    Ok(StateVector::normalized(shape.clone(), amps)?.to_density())
}

/// JSON form: `{"register": [["B", 2]], "openings": [[{"label": .., "projector": {..}}], [..]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchemeFile {
    pub register: RegisterShape,
    pub openings: [Vec<OpeningEntry>; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OpeningEntry {
    pub label: String,
    pub projector: MatrixFile,
}

impl SchemeFile {
    pub fn from_scheme(s: &ProjectiveCommitmentScheme) -> Self {
        let side = |b: usize| {
            s.openings[b]
                .iter()
                .map(|(l, v)| OpeningEntry {
                    label: l.clone(),
                    projector: MatrixFile::from_matrix(None, v),
                })
                .collect()
        };
        Self {
            register: s.shape.clone(),
            openings: [side(0), side(1)],
        }
    }

    pub fn to_scheme(&self) -> Result<ProjectiveCommitmentScheme> {
        let side = |b: usize| -> Result<Vec<(String, CMatrix)>> {
            self.openings[b]
                .iter()
                .map(|e| Ok((e.label.clone(), e.projector.to_matrix()?)))
                .collect()
        };
        ProjectiveCommitmentScheme::new(self.register.clone(), side(0)?, side(1)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
