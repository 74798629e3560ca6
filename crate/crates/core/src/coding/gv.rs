use serde::Serialize;

use super::{binary_entropy, LinearCode};
use crate::error::{Error, Result};
use crate::quantum::random::{child_seed, seeded};

#[derive(Clone, Debug, Serialize)]
pub struct GvReport {
    pub n: usize,
    pub k: usize,
    pub tau: f64,
    pub samples: usize,
    pub hits: usize,
    pub frequency: f64,
    /// Whether `rate < 1 − h(τ)`, the region where random codes are expected
    /// to reach relative distance `τ`.
    pub in_gv_region: bool,
}

/// Fraction of uniformly random `[n, ⌊rate·n⌋]` codes with `d ≥ τn`.
pub fn gilbert_varshamov_sample(n: usize, rate: f64, tau: f64, samples: usize, seed: u64) -> Result<GvReport> {
    if n == 0 || n > 20 {
        return Err(Error::Input(format!(
            "Gilbert–Varshamov sampling needs 1 ≤ n ≤ 20, got {n}"
        )));
    }
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::Input(format!("rate {rate} outside [0, 1]")));
    }
    let k = ((rate * n as f64) + 1e-9).floor() as usize;
    let in_gv_region = rate < 1.0 - binary_entropy(tau)?;
    let mut hits = 0;
    for i in 0..samples {
        let mut rng = seeded(child_seed(seed, i as u64));
        let code = LinearCode::random(n, k, &mut rng)?;
        if code.d() as f64 >= tau * n as f64 - 1e-9 {
            hits += 1;
        }
    }
    let frequency = if samples == 0 {
        0.0
    } else {
        hits as f64 / samples as f64
    };
    Ok(GvReport {
        n,
        k,
        tau,
        samples,
        hits,
        frequency,
        in_gv_region,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_regions() {
        assert_eq!(gilbert_varshamov_sample(12, 0.5, 0.0, 20, 1).unwrap().frequency, 1.0);
        let full = gilbert_varshamov_sample(8, 1.0, 2.0 / 8.0, 20, 1).unwrap();
        assert_eq!(full.frequency, 0.0);
        assert!(!full.in_gv_region);
    }

    #[test]
    fn desk_scale_gv_claim() {
        let r = gilbert_varshamov_sample(20, 0.6, 0.05, 50, 3).unwrap();
        assert!(r.in_gv_region);
        assert!(r.frequency >= 0.9);
    }
}
