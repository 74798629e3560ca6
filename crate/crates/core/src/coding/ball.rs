use serde::Serialize;

use super::Bits;
use crate::error::{Error, Result};

/// `h(δ) = −δ lg δ − (1−δ) lg(1−δ)`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Input(format!("binary entropy argument {delta} outside [0, 1]")));
    }
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(delta) + term(1.0 - delta))
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Strings within relative distance `δ` of a center: radius `⌊δn⌋`.
#[derive(Clone, Debug, Serialize)]
pub struct HammingBall {
    pub center: Bits,
    pub delta: f64,
}

impl HammingBall {
    pub fn new(center: Bits, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::Input(format!("ball radius fraction {delta} outside [0, 1]")));
        }
        Ok(Self { center, delta })
    }

    pub fn radius(&self) -> usize {
        (self.delta * self.center.len() as f64 + 1e-9).floor() as usize
    }

    pub fn contains(&self, x: &Bits) -> bool {
        x.len() == self.center.len() && x.distance(&self.center) as usize <= self.radius()
    }

    pub fn size(&self) -> f64 {
        let n = self.center.len();
        (0..=self.radius().min(n)).map(|i| binomial(n, i)).sum()
    }

    /// Members in order of increasing distance; only for `n ≤ 24`.
    pub fn members(&self) -> Result<Vec<Bits>> {
        let n = self.center.len();
        if n > 24 {
            return Err(Error::Input(format!("ball enumeration for n = {n} > 24")));
        }
        let mut out = Vec::with_capacity(self.size() as usize);
        for w in 0..=self.radius().min(n) {
            for flip in Bits::all(n).filter(|f| f.weight() as usize == w) {
                out.push(self.center.xor(&flip));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn ball_members_match_size() {
        let c: Bits = "0110100".parse().unwrap();
        let ball = HammingBall::new(c, 2.0 / 7.0).unwrap();
        assert_eq!(ball.radius(), 2);
        let members = ball.members().unwrap();
        assert_eq!(members.len() as f64, ball.size());
        assert_eq!(members.len(), 1 + 7 + 21);
        assert!(members.iter().all(|m| ball.contains(m)));
    }
}
