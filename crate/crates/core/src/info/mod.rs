//! Max-accessible information: exact values for a fixed measurement,
//! certified lower bounds by measurement search, and the zero-entropy upper
//! bound.

mod search;

pub use search::{fourier_basis, random_projective, random_rank1_povm, search_family};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::Povm;
use crate::quantum::{
    cr, embed_operator, hermitian_part, identity, lambda_max, lambda_min, partial_trace_op, pinv_sqrt, reorder,
    spectral_norm, tol, zero_entropy, CMatrix, DensityOperator, RegisterShape,
};

/// A measurement on the subsystems `target` of a larger register.
#[derive(Clone, Debug, Serialize)]
pub struct MeasurementDescriptor {
    pub target: Vec<String>,
    pub povm: Povm,
}

impl MeasurementDescriptor {
    pub fn new(target: Vec<String>, povm: Povm) -> Self {
        Self { target, povm }
    }

    fn target_refs(&self) -> Vec<&str> {
        self.target.iter().map(String::as_str).collect()
    }
}

/// Smallest `c ≥ 0` with `K ⪯ c ρ`.
pub fn dmax_relative(k: &CMatrix, rho: &CMatrix) -> Result<f64> {
    if k.shape() != rho.shape() {
        return Err(Error::DimensionMismatch(
            "dmax_relative operands differ in shape".into(),
        ));
    }
    let (inv_sqrt, support) = pinv_sqrt(&hermitian_part(rho), tol::RANK)?;
    let outside = identity(rho.nrows()) - &support;
    let leak = spectral_norm(&(&outside * k * &outside));
    if leak > tol::RANK * spectral_norm(k).max(1.0) {
        return Err(Error::Unbounded(leak));
    }
    Ok(lambda_max(&hermitian_part(&(&inv_sqrt * k * &inv_sqrt)))?.max(0.0))
}

/// Unnormalized post-measurement operators `K_x = Tr_target[(F_x ⊗ I) ρ]`
/// and the reduced state on the remaining subsystems.
pub fn measurement_scores(m: &MeasurementDescriptor, rho: &DensityOperator) -> Result<(Vec<CMatrix>, CMatrix)> {
    let target = m.target_refs();
    let shape = rho.shape();
    let d_target = shape.dim_of_set(&target)?;
    if d_target != m.povm.dim() {
        return Err(Error::DimensionMismatch(format!(
            "measurement of dimension {} on subsystems of dimension {d_target}",
            m.povm.dim()
        )));
    }
    let rest = shape.complement(&target);
    let mut ks = Vec::with_capacity(m.povm.len());
    for f in m.povm.elements() {
        let lifted = embed_operator(f, &target, shape)?;
        let (k, _) = partial_trace_op(&hermitian_part(&(lifted * rho.matrix())), shape, &rest)?;
        ks.push(hermitian_part(&k));
    }
    let (rho_b, _) = partial_trace_op(rho.matrix(), shape, &rest)?;
    Ok((ks, rho_b))
}

/// Exact minimal `λ` for one measurement, with its optimal `σ_X`.
#[derive(Clone, Debug, Serialize)]
pub struct ImaxValue {
    pub value: f64,
    pub sigma: Vec<f64>,
    /// Per-outcome domination constants `c_x`.
    pub constants: Vec<f64>,
}

pub fn imax_for_measurement(m: &MeasurementDescriptor, rho: &DensityOperator) -> Result<ImaxValue> {
    let (ks, rho_b) = measurement_scores(m, rho)?;
    imax_from_scores(&ks, &rho_b)
}

pub(crate) fn imax_from_scores(ks: &[CMatrix], rho_b: &CMatrix) -> Result<ImaxValue> {
    let constants = ks.iter().map(|k| dmax_relative(k, rho_b)).collect::<Result<Vec<_>>>()?;
    let total: f64 = constants.iter().sum();
    let sigma = constants.iter().map(|c| c / total).collect();
    Ok(ImaxValue {
        value: total.log2(),
        sigma,
        constants,
    })
}

/// `min_x λ_min(2^λ σ(x) ρ_B − K_x)`: non-negative exactly when the
/// domination `M(ρ) ⪯ 2^λ σ_X ⊗ ρ_B` holds.
pub fn domination_slack(m: &MeasurementDescriptor, rho: &DensityOperator, lambda: f64, sigma: &[f64]) -> Result<f64> {
    let (ks, rho_b) = measurement_scores(m, rho)?;
    if sigma.len() != ks.len() {
        return Err(Error::DimensionMismatch("σ_X length differs from outcome count".into()));
    }
    let scale = 2f64.powf(lambda);
    let mut worst = f64::INFINITY;
    for (k, s) in ks.iter().zip(sigma) {
        worst = worst.min(lambda_min(&hermitian_part(&(&rho_b * cr(scale * s) - k)))?);
    }
    Ok(worst)
}

/// Lower bound by search, upper bound `H_0(A)`.
#[derive(Clone, Debug, Serialize)]
pub struct ImaxEstimate {
    pub lower_bound: f64,
    pub witness_measurement: MeasurementDescriptor,
    pub witness_sigma: Vec<f64>,
    pub upper_bound: f64,
    pub measurements_evaluated: usize,
}

pub const DEFAULT_SEARCH_BUDGET: usize = 200;

fn labels_vec(labels: &[&str]) -> Vec<String> {
    labels.iter().map(|s| s.to_string()).collect()
}

/// `H_0` of the reduced state on `labels`.
pub fn zero_entropy_of(rho: &DensityOperator, labels: &[&str]) -> Result<f64> {
    let reduced = rho.reduced(labels)?;
    zero_entropy(reduced.matrix(), tol::RANK)
}

/// Lower bound on `I_max^acc(B; A)` over the search family plus `extra`;
/// upper bound `H_0(A)`.
pub fn imax_acc_bounds(
    rho: &DensityOperator,
    a_labels: &[&str],
    budget: usize,
    seed: u64,
    extra: &[MeasurementDescriptor],
) -> Result<ImaxEstimate> {
    let shape_a = rho.shape().restrict(a_labels)?;
    let family = search_family(&shape_a, budget, seed)?;
    let mut best: Option<(ImaxValue, MeasurementDescriptor)> = None;
    let mut evaluated = 0;
    let candidates = family
        .into_iter()
        .map(|p| MeasurementDescriptor::new(labels_vec(a_labels), p))
        .chain(extra.iter().cloned());
    for m in candidates {
        let v = imax_for_measurement(&m, rho)?;
        evaluated += 1;
        if best.as_ref().is_none_or(|(b, _)| v.value > b.value) {
            best = Some((v, m));
        }
    }
    let (value, witness) = best.ok_or_else(|| Error::Input("empty measurement search".into()))?;
    Ok(ImaxEstimate {
        lower_bound: value.value,
        witness_measurement: witness,
        witness_sigma: value.sigma,
        upper_bound: zero_entropy_of(rho, a_labels)?,
        measurements_evaluated: evaluated,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchBounds {
    pub z: usize,
    pub probability: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalConditionalReport {
    pub branches: Vec<BranchBounds>,
    pub max_lower: f64,
    pub max_upper: f64,
    /// `H_0(A)` of the unconditioned state.
    pub h0_a: f64,
    pub pass: bool,
}

/// Per-value bounds for a state with a classical register `z_label`:
/// `max_z` of the lower and upper bounds, each checked against `H_0(A)_ρ`.
pub fn classical_conditional_bound(
    rho: &DensityOperator,
    z_label: &str,
    a_labels: &[&str],
    budget: usize,
    seed: u64,
) -> Result<ClassicalConditionalReport> {
    let (m, ordered) = reorder(rho.matrix(), rho.shape(), &[z_label])?;
    let d_z = rho.shape().dim_of(z_label)?;
    let d_rest = rho.dim() / d_z;
    for z in 0..d_z {
        for w in 0..d_z {
            if z == w {
                continue;
            }
            let block = m.view((z * d_rest, w * d_rest), (d_rest, d_rest));
            let off = block.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if off >= 1e-10 {
                return Err(Error::Input(format!(
                    "register {z_label} is not classical: off-diagonal block ({z},{w}) has entry {off:e}"
                )));
            }
        }
    }
    let rest_shape = RegisterShape::with_cap(ordered.subsystems()[1..].to_vec(), usize::MAX)?;
    let h0_a = zero_entropy_of(rho, a_labels)?;
    let mut branches = Vec::new();
    for z in 0..d_z {
        let block = m.view((z * d_rest, z * d_rest), (d_rest, d_rest)).into_owned();
        let p = block.trace().re;
        if p <= tol::RANK {
            continue;
        }
        let branch = DensityOperator::from_unnormalized(rest_shape.clone(), block)?;
        let est = imax_acc_bounds(&branch, a_labels, budget, seed ^ z as u64, &[])?;
        branches.push(BranchBounds {
            z,
            probability: p,
            lower: est.lower_bound,
            upper: est.upper_bound,
        });
    }
    let max_lower = branches.iter().map(|b| b.lower).fold(f64::NEG_INFINITY, f64::max);
    let max_upper = branches.iter().map(|b| b.upper).fold(f64::NEG_INFINITY, f64::max);
    let pass = max_lower <= h0_a + 1e-8 && max_upper <= h0_a + 1e-8;
    Ok(ClassicalConditionalReport {
        branches,
        max_lower,
        max_upper,
        h0_a,
        pass,
    })
}

fn validate_kraus(kraus: &[CMatrix], d_in: usize) -> Result<usize> {
    let first = kraus.first().ok_or_else(|| Error::Input("empty Kraus list".into()))?;
    let d_out = first.nrows();
    let mut sum = CMatrix::zeros(d_in, d_in);
    for e in kraus {
        if e.ncols() != d_in || e.nrows() != d_out {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator {:?}, expected {d_out}x{d_in}",
                e.shape()
            )));
        }
        sum += e.adjoint() * e;
    }
    let defect = spectral_norm(&(sum - identity(d_in)));
    if defect > tol::EQ {
        return Err(Error::Input(format!(
            "Kraus operators are not trace preserving (defect {defect:e})"
        )));
    }
    Ok(d_out)
}

/// `(E ⊗ F)(ρ)` with `E` acting on `a_labels` and `F` on the rest; the output
/// shape is `[("A", d_A'), ("B", d_B')]`.
pub fn apply_local_channels(
    rho: &DensityOperator,
    a_labels: &[&str],
    kraus_a: &[CMatrix],
    kraus_b: &[CMatrix],
) -> Result<DensityOperator> {
    let (m, _) = reorder(rho.matrix(), rho.shape(), a_labels)?;
    let d_a = rho.shape().dim_of_set(a_labels)?;
    let d_b = rho.dim() / d_a;
    let out_a = validate_kraus(kraus_a, d_a)?;
    let out_b = validate_kraus(kraus_b, d_b)?;
    let mut out = CMatrix::zeros(out_a * out_b, out_a * out_b);
    for e in kraus_a {
        for f in kraus_b {
            let k = e.kronecker(f);
            out += &k * &m * k.adjoint();
        }
    }
    let shape = RegisterShape::new(vec![("A", out_a), ("B", out_b)])?;
    DensityOperator::new(shape, hermitian_part(&out))
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub h0_a_original: f64,
    pub max_value: f64,
    pub measurements_evaluated: usize,
    pub pass: bool,
}

/// Every searched measurement on the channel output stays within the
/// original `H_0(A)`.
pub fn local_channel_monotonicity_check(
    rho: &DensityOperator,
    a_labels: &[&str],
    kraus_a: &[CMatrix],
    kraus_b: &[CMatrix],
    budget: usize,
    seed: u64,
) -> Result<MonotonicityReport> {
    let h0 = zero_entropy_of(rho, a_labels)?;
    let out = apply_local_channels(rho, a_labels, kraus_a, kraus_b)?;
    let est = imax_acc_bounds(&out, &["A"], budget, seed, &[])?;
    Ok(MonotonicityReport {
        h0_a_original: h0,
        max_value: est.lower_bound,
        measurements_evaluated: est.measurements_evaluated,
        pass: est.lower_bound <= h0 + 1e-8,
    })
}

/// Kraus operators of `ρ ↦ (1−p)ρ + p I/d`.
pub fn depolarizing_kraus(d: usize, p: f64) -> Vec<CMatrix> {
    let w = (p / d as f64).sqrt();
    let mut out = vec![identity(d) * cr((1.0 - p).sqrt())];
    for i in 0..d {
        for j in 0..d {
            let mut e = CMatrix::zeros(d, d);
            e[(i, j)] = cr(w);
            out.push(e);
        }
    }
    out
}

/// Measure in the computational basis and replace the system by `|0⟩`.
pub fn measure_and_forget_kraus(d: usize) -> Vec<CMatrix> {
    (0..d)
        .map(|x| {
            let mut e = CMatrix::zeros(d, d);
            e[(0, x)] = cr(1.0);
            e
        })
        .collect()
}

pub fn identity_kraus(d: usize) -> Vec<CMatrix> {
    vec![identity(d)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{random, tensor};

    fn copy_state() -> DensityOperator {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = cr(0.5);
        m[(3, 3)] = cr(0.5);
        DensityOperator::new(RegisterShape::new(vec![("A", 2), ("B", 2)]).unwrap(), m).unwrap()
    }

    fn computational_on_a() -> MeasurementDescriptor {
        let a = RegisterShape::single("A", 2).unwrap();
        MeasurementDescriptor::new(vec!["A".into()], Povm::computational(a).unwrap())
    }

    #[test]
    fn dmax_trivial_cases() {
        let mut rng = random::seeded(1);
        let rho = random::random_density(&RegisterShape::single("B", 3).unwrap(), 3, &mut rng).unwrap();
        let k = rho.matrix() * cr(0.3);
        assert!((dmax_relative(&k, rho.matrix()).unwrap() - 0.3).abs() < 1e-10);
        assert!((dmax_relative(rho.matrix(), rho.matrix()).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dmax_rejects_support_violation() {
        let mut rho = CMatrix::zeros(2, 2);
        rho[(0, 0)] = cr(1.0);
        let k = identity(2) * cr(0.5);
        assert!(matches!(dmax_relative(&k, &rho), Err(Error::Unbounded(_))));
    }

    #[test]
    fn copy_state_has_one_bit() {
        let v = imax_for_measurement(&computational_on_a(), &copy_state()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-10);
        assert!(v.constants.iter().all(|c| (c - 1.0).abs() < 1e-10));
    }

    #[test]
    fn product_state_has_zero() {
        let mut rng = random::seeded(2);
        let a = random::random_density(&RegisterShape::single("A", 2).unwrap(), 2, &mut rng).unwrap();
        let b = random::random_density(&RegisterShape::single("B", 2).unwrap(), 2, &mut rng).unwrap();
        let rho = a.tensor(&b).unwrap();
        let m = MeasurementDescriptor::new(vec!["A".into()], random_rank1_povm(a.shape(), 3, &mut rng).unwrap());
        assert!(imax_for_measurement(&m, &rho).unwrap().value.abs() < 1e-9);
    }

    #[test]
    fn tightness_of_reported_value() {
        let rho = copy_state();
        let m = computational_on_a();
        let v = imax_for_measurement(&m, &rho).unwrap();
        assert!(domination_slack(&m, &rho, v.value, &v.sigma).unwrap() >= -1e-9);
        assert!(domination_slack(&m, &rho, v.value - 1e-4, &v.sigma).unwrap() < 0.0);
    }

    #[test]
    fn copy_state_bounds_meet() {
        let est = imax_acc_bounds(&copy_state(), &["A"], 20, 3, &[]).unwrap();
        assert!((est.lower_bound - 1.0).abs() < 1e-9);
        assert!((est.upper_bound - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classical_register_checks() {
        let z = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![cr(0.5), cr(0.5)]));
        let rho = DensityOperator::new(
            RegisterShape::new(vec![("Z", 2), ("A", 2), ("B", 2)]).unwrap(),
            tensor(&z, copy_state().matrix()),
        )
        .unwrap();
        let report = classical_conditional_bound(&rho, "Z", &["A"], 10, 1).unwrap();
        assert!(report.pass);
        assert!((report.max_lower - 1.0).abs() < 1e-9);

        let plus = CMatrix::from_element(2, 2, cr(0.5));
        let quantum_z = DensityOperator::new(
            RegisterShape::new(vec![("Z", 2), ("A", 2), ("B", 2)]).unwrap(),
            tensor(&plus, copy_state().matrix()),
        )
        .unwrap();
        assert!(classical_conditional_bound(&quantum_z, "Z", &["A"], 10, 1).is_err());
    }

    #[test]
    fn kraus_validation() {
        assert!(validate_kraus(&depolarizing_kraus(3, 0.4), 3).is_ok());
        assert!(validate_kraus(&measure_and_forget_kraus(2), 2).is_ok());
        assert!(validate_kraus(&[identity(2) * cr(0.9)], 2).is_err());
    }

    #[test]
    fn depolarizing_acts_as_expected() {
        let mut rng = random::seeded(8);
        let shape = RegisterShape::new(vec![("A", 2), ("B", 1)]).unwrap();
        let rho = random::random_density(&shape, 1, &mut rng).unwrap();
        let out = apply_local_channels(&rho, &["A"], &depolarizing_kraus(2, 0.3), &identity_kraus(1)).unwrap();
        let expected = rho.matrix() * cr(0.7) + identity(2) * cr(0.15);
        assert!((out.matrix() - expected).norm() < 1e-12);
    }
}
