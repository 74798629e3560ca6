//! Binomial tails for the sampling phase.

use crate::coding::binomial;
use crate::error::{Error, Result};

/// `Pr[Bin(n, p) > m]`, summed exactly.
pub fn binomial_upper_tail(n: usize, p: f64, m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Input(format!("probability {p} outside [0, 1]")));
    }
    let start = if m < 0.0 { 0 } else { m.floor() as usize + 1 };
    Ok((start..=n)
        .map(|k| binomial(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32))
        .sum())
}

/// `2 exp(−2q²N)`.
pub fn hoeffding_two_sided(n: usize, q: f64) -> f64 {
    2.0 * (-2.0 * q * q * n as f64).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_edges() {
        assert_eq!(binomial_upper_tail(10, 0.3, 10.0).unwrap(), 0.0);
        assert!((binomial_upper_tail(10, 0.3, -1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((binomial_upper_tail(1, 0.3, 0.0).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn exact_tail_below_hoeffding() {
        for n in [10, 40, 64] {
            for q in [0.05, 0.1, 0.25] {
                let exact = binomial_upper_tail(n, q, 2.0 * q * n as f64).unwrap();
                assert!(exact <= hoeffding_two_sided(n, q));
            }
        }
    }
}
