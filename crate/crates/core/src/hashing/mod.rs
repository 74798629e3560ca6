//! Two-universal XOR-inner-product hashing and exact small-instance privacy
//! amplification.

use serde::Serialize;

use crate::coding::Bits;
use crate::error::{Error, Result};
use crate::measurement::{hmin_cq, CqState};
use crate::quantum::{cr, trace_norm, CMatrix};

/// `{g_r(x) = ⟨r, x⟩ mod 2 : r ∈ {0,1}^n}`, including `r = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct XorHashFamily {
    pub n: usize,
}

impl XorHashFamily {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 20 {
            return Err(Error::Input(format!("hash input length {n} outside 1..=20")));
        }
        Ok(Self { n })
    }

    pub fn size(&self) -> usize {
        1 << self.n
    }

    pub fn members(&self) -> impl Iterator<Item = Bits> {
        Bits::all(self.n)
    }

    pub fn eval(&self, r: &Bits, x: &Bits) -> Result<bool> {
        if r.len() != self.n || x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "hash of length {} applied to seed {} and input {}",
                self.n,
                r.len(),
                x.len()
            )));
        }
        Ok(r.dot(x))
    }

    /// Number of members with `g_r(x) = g_r(y)`.
    pub fn collision_count(&self, x: &Bits, y: &Bits) -> Result<usize> {
        let mut count = 0;
        for r in self.members() {
            if self.eval(&r, x)? == self.eval(&r, y)? {
                count += 1;
            }
        }
        Ok(count)
    }

    /// Mean collision frequency over the given pairs, enumerating all seeds.
    pub fn collision_test(&self, pairs: &[(Bits, Bits)]) -> Result<f64> {
        if pairs.is_empty() {
            return Ok(0.0);
        }
        let mut total = 0.0;
        for (x, y) in pairs {
            total += self.collision_count(x, y)? as f64 / self.size() as f64;
        }
        Ok(total / pairs.len() as f64)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PrivacyAmpReport {
    pub n: usize,
    pub exact_distance: f64,
    /// Certified lower end of `Hmin(X|E)`.
    pub hmin: f64,
    pub hmin_upper: f64,
    /// `½ · 2^{−(Hmin − 1)/2}` evaluated at the certified `hmin`.
    pub bound: f64,
    pub pass: bool,
}

/// Labels of `cq` read as equal-length bit strings.
fn bit_labels(cq: &CqState) -> Result<(usize, Vec<Bits>)> {
    let xs = cq
        .labels()
        .iter()
        .map(|l| l.parse::<Bits>())
        .collect::<Result<Vec<_>>>()?;
    let n = xs[0].len();
    if xs.iter().any(|x| x.len() != n) {
        return Err(Error::Input("cq labels must be bit strings of one length".into()));
    }
    Ok((n, xs))
}

/// Exact `D(ρ_{YGE}, I/2 ⊗ ρ_{GE})` for `Y = g_G(X)` with a uniform seed `G`:
/// `2^{−n} Σ_r ½‖ω_{r,0} − ω_{r,1}‖₁` with `ω_{r,y} = Σ_{x : g_r(x)=y} P(x) ρ_E^x`.
pub fn privacy_amp_distance(cq: &CqState) -> Result<f64> {
    let (n, xs) = bit_labels(cq)?;
    if n > 8 {
        return Err(Error::Input(format!(
            "exact privacy amplification limited to n ≤ 8, got {n}"
        )));
    }
    let family = XorHashFamily::new(n)?;
    let scores = cq.score_operators();
    let d = cq.shape().dim();
    let mut total = 0.0;
    for r in family.members() {
        let mut diff = CMatrix::zeros(d, d);
        for (x, k) in xs.iter().zip(&scores) {
            let sign = if family.eval(&r, x)? { -1.0 } else { 1.0 };
            diff += k * cr(sign);
        }
        total += 0.5 * trace_norm(&diff);
    }
    Ok(total / family.size() as f64)
}

pub fn privacy_amp_check(cq: &CqState, tolerance: f64) -> Result<PrivacyAmpReport> {
    let (n, _) = bit_labels(cq)?;
    let exact_distance = privacy_amp_distance(cq)?;
    let h = hmin_cq(cq)?;
    let bound = 0.5 * 2f64.powf(-(h.lower - 1.0) / 2.0);
    Ok(PrivacyAmpReport {
        n,
        exact_distance,
        hmin: h.lower,
        hmin_upper: h.upper,
        bound,
        pass: exact_distance <= bound + tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{DensityOperator, RegisterShape};

    fn empty_e() -> DensityOperator {
        DensityOperator::maximally_mixed(RegisterShape::single("E", 1).unwrap())
    }

    #[test]
    fn zero_seed_is_constant() {
        let f = XorHashFamily::new(4).unwrap();
        for x in Bits::all(4) {
            assert!(!f.eval(&Bits::zeros(4), &x).unwrap());
        }
    }

    #[test]
    fn collisions_exactly_half() {
        let f = XorHashFamily::new(4).unwrap();
        for x in Bits::all(4) {
            for y in Bits::all(4).filter(|y| *y != x) {
                assert_eq!(f.collision_count(&x, &y).unwrap(), 8);
            }
        }
    }

    #[test]
    fn uniform_two_bits_without_side_information() {
        let labels = Bits::all(2).map(|b| b.to_string()).collect();
        let cq = CqState::new(labels, vec![0.25; 4], vec![empty_e(); 4]).unwrap();
        let report = privacy_amp_check(&cq, 1e-9).unwrap();
        assert!((report.exact_distance - 0.125).abs() < 1e-12);
        assert!((report.bound - 0.5 * 2f64.powf(-0.5)).abs() < 1e-6);
        assert!(report.pass);
    }

    #[test]
    fn deterministic_source_is_vacuous_but_true() {
        let cq = CqState::new(vec!["101".into()], vec![1.0], vec![empty_e()]).unwrap();
        let report = privacy_amp_check(&cq, 1e-9).unwrap();
        assert!((report.exact_distance - 0.5).abs() < 1e-12);
        assert!(report.bound >= 0.5 * 2f64.sqrt() - 1e-6);
        assert!(report.pass);
    }
}
