//! The BCJL commitment and its stored-qubit variant BCJL_δ: verification
//! projectors, non-adaptive binding by enumeration, the sampling argument
//! relating the two, and exact hiding at small n.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::encoding::{bb84_encode, bb84_overlap};
use crate::coding::{binary_entropy, Bits, HammingBall, LinearCode};
use crate::commitment::ProjectiveCommitmentScheme;
use crate::error::{Error, Result};
use crate::measurement::{guessing_probability, CqState};
use crate::quantum::random::seeded;
use crate::quantum::{spectral_norm, trace_norm, CMatrix, DensityOperator, RegisterShape};

pub const MAX_VERIFIER_QUBITS: usize = 10;
pub const MAX_NA_QUBITS: usize = 8;
pub const MAX_HIDING_QUBITS: usize = 6;
pub const MAX_QUANTUM_HIDING_QUBITS: usize = 5;

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn random_bits<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Bits {
    Bits::new(n, rng.random::<u64>() & low_mask(n)).expect("masked to length")
}

fn check_lengths(x: &Bits, theta: &Bits) -> Result<()> {
    if x.len() != theta.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} values with {} bases",
            x.len(),
            theta.len()
        )));
    }
    Ok(())
}

/// `V^δ_{x,θ} = Σ_{z ∈ B^δ(x)} |z⟩⟨z|_θ`.
pub fn bcjl_verifier(x: &Bits, theta: &Bits, delta: f64) -> Result<CMatrix> {
    check_lengths(x, theta)?;
    if x.len() > MAX_VERIFIER_QUBITS {
        return Err(Error::CapExceeded(format!(
            "verifier on {} qubits, cap {MAX_VERIFIER_QUBITS}",
            x.len()
        )));
    }
    let dim = 1usize << x.len();
    let mut v = CMatrix::zeros(dim, dim);
    for z in HammingBall::new(*x, delta)?.members()? {
        let ket = bb84_encode(&z, theta)?;
        v += ket.amplitudes() * ket.amplitudes().adjoint();
    }
    Ok(v)
}

/// `M_{zz'} = ⟨z|_θ |z'⟩_{θ'}` over the two balls. Since the kets in each
/// ball are orthonormal, `‖V V'‖ = ‖M‖`.
pub fn verifier_overlaps(x: &Bits, theta: &Bits, x2: &Bits, theta2: &Bits, delta: f64) -> Result<CMatrix> {
    check_lengths(x, theta)?;
    check_lengths(x2, theta2)?;
    let left = HammingBall::new(*x, delta)?.members()?;
    let right = HammingBall::new(*x2, delta)?.members()?;
    Ok(CMatrix::from_fn(left.len(), right.len(), |i, j| {
        Complex64::new(bb84_overlap(&left[i], theta, &right[j], theta2), 0.0)
    }))
}

/// `max |⟨z|_θ |z'⟩_{θ'}| · √(|B^δ(x)| |B^δ(x')|)`.
pub fn verifier_overlap_bound(overlaps: &CMatrix) -> f64 {
    let max = overlaps.iter().map(|z| z.norm()).fold(0.0, f64::max);
    max * ((overlaps.nrows() * overlaps.ncols()) as f64).sqrt()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BcjlInstance {
    pub code: crate::coding::CodeFile,
    pub delta: f64,
    pub g: Bits,
    pub s: Bits,
    pub w: bool,
}

impl BcjlInstance {
    pub fn new(code: &LinearCode, delta: f64, g: Bits, s: Bits, w: bool) -> Result<Self> {
        if g.len() != code.n() || s.len() != code.n() - code.k() {
            return Err(Error::DimensionMismatch(
                "hash or syndrome length does not match the code".into(),
            ));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::Input(format!("δ = {delta} outside [0, 1]")));
        }
        Ok(Self {
            code: crate::coding::CodeFile::from_code(code),
            delta,
            g,
            s,
            w,
        })
    }

    pub fn code(&self) -> Result<LinearCode> {
        self.code.to_code()
    }

    /// Strings `x` with syndrome `s` and `g(x) ⊕ w = b`.
    pub fn openings(&self, b: bool) -> Result<Vec<Bits>> {
        Ok(self
            .code()?
            .coset(&self.s)?
            .into_iter()
            .filter(|x| (self.g.dot(x) ^ self.w) == b)
            .collect())
    }

    /// `1 + 2^{−d/2 + δn + h(δ)n}`.
    pub fn na_bound(&self) -> Result<f64> {
        let code = self.code()?;
        let n = code.n() as f64;
        Ok(1.0 + 2f64.powf(-(code.d() as f64) / 2.0 + self.delta * n + binary_entropy(self.delta)? * n))
    }

    /// The commitment seen as a non-interactive scheme, restricted to the
    /// listed bases.
    pub fn scheme(&self, thetas: &[Bits]) -> Result<ProjectiveCommitmentScheme> {
        let n = self.code()?.n();
        let shape = RegisterShape::with_cap((0..n).map(|i| (format!("q{i}"), 2)).collect(), 1 << MAX_VERIFIER_QUBITS)?;
        let side = |b: bool| -> Result<Vec<(String, CMatrix)>> {
            let mut out = Vec::new();
            for x in self.openings(b)? {
                for t in thetas {
                    out.push((format!("{x}/{t}"), bcjl_verifier(&x, t, self.delta)?));
                }
            }
            Ok(out)
        };
        ProjectiveCommitmentScheme::new(shape, side(false)?, side(true)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ThetaSet {
    /// Every pair of bases.
    Full,
    /// Uniformly sampled `(x, θ), (x', θ')` pairs.
    Sampled { pairs: usize, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct BcjlNaReport {
    /// `max ‖V + V'‖` over the evaluated hash-opposite pairs.
    pub max_sum: f64,
    pub bound: f64,
    pub pass: bool,
    pub theta_set: ThetaSet,
    pub pairs_evaluated: usize,
    pub total_pairs: f64,
    pub best: Option<[(Bits, Bits); 2]>,
    /// Pairs where `‖VV'‖` exceeded the overlap bound, and the smallest
    /// `bound − ‖VV'‖` seen.
    pub overlap_violations: usize,
    pub worst_overlap_slack: f64,
}

/// Worst-case `p0 + p1` against non-adaptive adversaries. Uses
/// `max_ρ tr((V + V')ρ) = ‖V + V'‖ = 1 + ‖VV'‖` for projectors.
pub fn bcjl_na_binding(instance: &BcjlInstance, theta_set: &ThetaSet, budget: usize) -> Result<BcjlNaReport> {
    let code = instance.code()?;
    let n = code.n();
    if n > MAX_NA_QUBITS {
        return Err(Error::CapExceeded(format!(
            "non-adaptive enumeration on n = {n} > {MAX_NA_QUBITS}"
        )));
    }
    let zero = instance.openings(false)?;
    let one = instance.openings(true)?;
    let total_pairs = (zero.len() * one.len()) as f64 * 4f64.powi(n as i32);
    let mut best = (1.0, None);
    let mut evaluated = 0;
    let (mut violations, mut worst_slack) = (0, f64::INFINITY);
    let mut consider = |x: &Bits, t: &Bits, x2: &Bits, t2: &Bits| -> Result<()> {
        evaluated += 1;
        let m = verifier_overlaps(x, t, x2, t2, instance.delta)?;
        let product = spectral_norm(&m);
        let slack = verifier_overlap_bound(&m) - product;
        worst_slack = worst_slack.min(slack);
        violations += usize::from(slack < -1e-12);
        let value = 1.0 + product;
        if value > best.0 || best.1.is_none() {
            best = (value, Some([(*x, *t), (*x2, *t2)]));
        }
        Ok(())
    };
    match theta_set {
        ThetaSet::Full => {
            if total_pairs > budget as f64 {
                return Err(Error::Input(format!(
                    "{total_pairs} opening pairs exceed the budget {budget}; declare a sampled θ set"
                )));
            }
            for x in &zero {
                for x2 in &one {
                    for t in Bits::all(n) {
                        for t2 in Bits::all(n) {
                            consider(x, &t, x2, &t2)?;
                        }
                    }
                }
            }
        }
        ThetaSet::Sampled { pairs, seed } => {
            let mut rng = seeded(*seed);
            if !zero.is_empty() && !one.is_empty() {
                for _ in 0..*pairs {
                    let x = zero[rng.random_range(0..zero.len())];
                    let x2 = one[rng.random_range(0..one.len())];
                    let (t, t2) = (random_bits(n, &mut rng), random_bits(n, &mut rng));
                    consider(&x, &t, &x2, &t2)?;
                }
            }
        }
    }
    let max_sum = if best.1.is_some() { best.0 } else { 0.0 };
    let bound = instance.na_bound()?;
    Ok(BcjlNaReport {
        max_sum,
        bound,
        pass: max_sum <= bound + 1e-9 && violations == 0,
        theta_set: theta_set.clone(),
        pairs_evaluated: evaluated,
        total_pairs,
        best: best.1,
        overlap_violations: violations,
        worst_overlap_slack: worst_slack,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceStats {
    pub n: usize,
    pub delta: f64,
    pub mismatches: usize,
    /// `d(x, x̂) > δn`; otherwise the run is excluded.
    pub precondition_met: bool,
    pub runs: usize,
    pub hits: usize,
    pub frequency: f64,
    /// `2^{−m}` for `m` mismatches.
    pub exact: f64,
    /// `2^{−δn}`.
    pub bound: f64,
    pub sigma: f64,
    pub pass: bool,
}

/// Monte Carlo of the event "every position where Bob's basis matches
/// agrees", for strings at distance `mismatches`.
pub fn bcjl_equivalence_mc(
    delta: f64,
    n: usize,
    mismatches: usize,
    runs: usize,
    seed: u64,
) -> Result<EquivalenceStats> {
    if n == 0 || n > 64 || mismatches > n || !(0.0..=1.0).contains(&delta) {
        return Err(Error::Input(format!(
            "invalid equivalence parameters n = {n}, m = {mismatches}, δ = {delta}"
        )));
    }
    let precondition_met = mismatches as f64 > delta * n as f64;
    let bound = 2f64.powf(-delta * n as f64);
    // Each mismatched position shares Bob's basis independently with
    // probability ½, and one shared mismatch breaks agreement.
    let exact = 0.5f64.powi(mismatches as i32);
    let mut rng = seeded(seed);
    let mut hits = 0;
    for _ in 0..runs {
        let x = random_bits(n, &mut rng);
        let mut x_hat = x;
        for i in sample(&mut rng, n, mismatches) {
            x_hat = x_hat.with(i, !x.get(i));
        }
        let theta = random_bits(n, &mut rng);
        let theta_hat = random_bits(n, &mut rng);
        let matched = !(theta.mask() ^ theta_hat.mask()) & low_mask(n);
        hits += usize::from((x.mask() ^ x_hat.mask()) & matched == 0);
    }
    let runs_f = runs.max(1) as f64;
    let frequency = hits as f64 / runs_f;
    let sigma = (bound * (1.0 - bound) / runs_f).sqrt();
    Ok(EquivalenceStats {
        n,
        delta,
        mismatches,
        precondition_met,
        runs,
        hits,
        frequency,
        exact,
        bound,
        sigma,
        pass: !precondition_met || frequency <= bound + 3.0 * sigma,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HidingVariant {
    /// Bob measures each qubit in a random basis on arrival.
    MeasuredBob,
    /// Bob keeps the qubits.
    QuantumBob,
}

#[derive(Clone, Debug, Serialize)]
pub struct HidingReport {
    pub n: usize,
    pub k: usize,
    pub variant: HidingVariant,
    pub exact_distance: f64,
    /// `n lg(1/γ) − (n − k)`.
    pub hmin_used: f64,
    /// `2^{−½(hmin_used − 1)}`: privacy amplification plus the triangle
    /// inequality between the two commitments.
    pub bound: f64,
    pub vacuous: bool,
}

/// Guessing probability of `x_i` from `|x_i⟩_θ` with a uniform basis.
pub fn bb84_bit_guessing() -> Result<f64> {
    let states = [false, true]
        .iter()
        .map(|&x| {
            let zero = bb84_encode(&Bits::new(1, u64::from(x))?, &Bits::zeros(1))?.to_density();
            let one = bb84_encode(&Bits::new(1, u64::from(x))?, &Bits::new(1, 1)?)?.to_density();
            DensityOperator::new(
                zero.shape().clone(),
                (zero.matrix() + one.matrix()) * Complex64::new(0.5, 0.0),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(guessing_probability(&CqState::uniform(states)?)?.primal_value)
}

/// Statistical distance between Bob's views of commitments to 0 and 1.
/// Both bases are uniform and independent of everything else, so for the
/// measured variant each `x̂_i` is `x_i` through a binary symmetric channel
/// with flip probability ¼, and for the quantum variant Bob's qubit given
/// `x_i` is `½(|x_i⟩⟨x_i| + H|x_i⟩⟨x_i|H)`.
pub fn bcjl_hiding_exact(code: &LinearCode, variant: HidingVariant) -> Result<HidingReport> {
    let n = code.n();
    let cap = match variant {
        HidingVariant::MeasuredBob => MAX_HIDING_QUBITS,
        HidingVariant::QuantumBob => MAX_QUANTUM_HIDING_QUBITS,
    };
    if n > cap {
        return Err(Error::CapExceeded(format!("exact hiding on n = {n} > {cap}")));
    }
    let size = 1usize << n;
    let syn_size = 1usize << (n - code.k());
    let syndromes: Vec<usize> = Bits::all(n)
        .map(|x| Ok(code.syndrome(&x)?.mask() as usize))
        .collect::<Result<_>>()?;
    let weight = 1.0 / (size * size) as f64;
    let exact_distance = match variant {
        HidingVariant::MeasuredBob => {
            let mut total = 0.0;
            for g in Bits::all(n) {
                for x_hat in Bits::all(n) {
                    // p[s][w] for b = 0; b = 1 swaps w.
                    let mut p = vec![[0.0f64; 2]; syn_size];
                    for x in Bits::all(n) {
                        let flips = x.distance(&x_hat) as i32;
                        let ch = 0.25f64.powi(flips) * 0.75f64.powi(n as i32 - flips);
                        p[syndromes[x.mask() as usize]][usize::from(g.dot(&x))] += weight * ch;
                    }
                    total += p.iter().map(|row| (row[0] - row[1]).abs()).sum::<f64>();
                }
            }
            total
        }
        HidingVariant::QuantumBob => {
            let single = |bit: bool| -> CMatrix {
                let a = bb84_encode(&Bits::new(1, u64::from(bit)).unwrap(), &Bits::zeros(1)).unwrap();
                let b = bb84_encode(&Bits::new(1, u64::from(bit)).unwrap(), &Bits::new(1, 1).unwrap()).unwrap();
                (a.to_density().matrix() + b.to_density().matrix()) * Complex64::new(0.5, 0.0)
            };
            let rho_of = |x: &Bits| -> CMatrix {
                (0..n).fold(CMatrix::identity(1, 1), |acc, i| acc.kronecker(&single(x.get(i))))
            };
            let states: Vec<CMatrix> = Bits::all(n).map(|x| rho_of(&x)).collect();
            let mut total = 0.0;
            for g in Bits::all(n) {
                let mut blocks = vec![CMatrix::zeros(size, size); syn_size];
                for x in Bits::all(n) {
                    let sign = if g.dot(&x) { -1.0 } else { 1.0 };
                    blocks[syndromes[x.mask() as usize]] +=
                        &states[x.mask() as usize] * Complex64::new(sign * weight, 0.0);
                }
                // Blocks w = 0 and w = 1 contribute equally.
                total += blocks.iter().map(trace_norm).sum::<f64>();
            }
            total
        }
    };
    let gamma = bb84_bit_guessing()?;
    let hmin_used = n as f64 * (1.0 / gamma).log2() - (n - code.k()) as f64;
    let bound = 2f64.powf(-0.5 * (hmin_used - 1.0));
    Ok(HidingReport {
        n,
        k: code.k(),
        variant,
        exact_distance,
        hmin_used,
        bound,
        vacuous: bound >= 1.0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BcjlRun {
    pub b: bool,
    pub x: Bits,
    pub theta: Bits,
    pub theta_hat: Bits,
    pub x_hat: Bits,
    pub g: Bits,
    pub s: Bits,
    pub w: bool,
}

/// Honest commit with Bob measuring on arrival.
pub fn bcjl_commit(code: &LinearCode, b: bool, seed: u64) -> Result<BcjlRun> {
    let n = code.n();
    let mut rng = seeded(seed);
    let x = random_bits(n, &mut rng);
    let theta = random_bits(n, &mut rng);
    let theta_hat = random_bits(n, &mut rng);
    let mut x_hat = x;
    for i in 0..n {
        if theta.get(i) != theta_hat.get(i) {
            x_hat = x_hat.with(i, rng.random_bool(0.5));
        }
    }
    let g = random_bits(n, &mut rng);
    let s = code.syndrome(&x)?;
    Ok(BcjlRun {
        b,
        x,
        theta,
        theta_hat,
        x_hat,
        w: g.dot(&x) ^ b,
        g,
        s,
    })
}

pub fn bcjl_reveal(code: &LinearCode, run: &BcjlRun, x: &Bits, theta: &Bits, b: bool) -> Result<bool> {
    check_lengths(x, theta)?;
    let matched = !(theta.mask() ^ run.theta_hat.mask()) & low_mask(code.n());
    let consistent = (x.mask() ^ run.x_hat.mask()) & matched == 0;
    Ok(code.syndrome(x)? == run.s && consistent && (run.g.dot(x) ^ run.w) == b)
}

/// BCJL_δ reveal: Bob measures the stored qubits `|run.x⟩_{run.θ}` in the
/// announced basis and accepts within distance `δn`.
pub fn bcjl_delta_reveal<R: Rng + ?Sized>(
    code: &LinearCode,
    run: &BcjlRun,
    x: &Bits,
    theta: &Bits,
    b: bool,
    delta: f64,
    rng: &mut R,
) -> Result<bool> {
    check_lengths(x, theta)?;
    let n = code.n();
    let mut x_hat = run.x;
    for i in 0..n {
        if theta.get(i) != run.theta.get(i) {
            x_hat = x_hat.with(i, rng.random_bool(0.5));
        }
    }
    let close = HammingBall::new(*x, delta)?.contains(&x_hat);
    Ok(code.syndrome(x)? == run.s && close && (run.g.dot(x) ^ run.w) == b)
}

/// `|x⟩_θ` as a column, for callers building states by hand.
pub fn bb84_ket(x: &Bits, theta: &Bits) -> Result<DVector<Complex64>> {
    Ok(bb84_encode(x, theta)?.amplitudes().clone())
}
