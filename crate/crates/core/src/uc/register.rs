//! State-vector register with one-qubit measurements sampled by the Born rule.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use crate::coding::Bits;
use crate::error::{Error, Result};
use crate::protocols::bb84_encode;

/// Largest register kept as a full state vector in protocol runs.
pub const MAX_REGISTER_QUBITS: usize = 10;

#[derive(Clone, Debug)]
pub struct QubitRegister {
    n: usize,
    amps: DVector<Complex64>,
    measured: Vec<Option<bool>>,
}

impl QubitRegister {
    pub fn bb84(x: &Bits, theta: &Bits) -> Result<Self> {
        let n = x.len();
        if n > MAX_REGISTER_QUBITS {
            return Err(Error::CapExceeded(format!(
                "{n} qubits, register cap {MAX_REGISTER_QUBITS}"
            )));
        }
        let amps = bb84_encode(x, theta)?.amplitudes().clone();
        Ok(Self {
            n,
            amps,
            measured: vec![None; n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_measured(&self, i: usize) -> bool {
        self.measured[i].is_some()
    }

    /// Measures qubit `i` in the computational (`false`) or Hadamard
    /// (`true`) basis and collapses the register.
    pub fn measure<R: Rng + ?Sized>(&mut self, i: usize, hadamard: bool, rng: &mut R) -> Result<bool> {
        if i >= self.n {
            return Err(Error::Input(format!("qubit {i} of {}", self.n)));
        }
        if self.measured[i].is_some() {
            return Err(Error::Protocol(format!("qubit {i} was already measured")));
        }
        let bit = 1usize << (self.n - 1 - i);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut p0 = 0.0;
        for k in (0..self.amps.len()).filter(|k| k & bit == 0) {
            let (a0, a1) = (self.amps[k], self.amps[k | bit]);
            p0 += if hadamard {
                ((a0 + a1) * s).norm_sqr()
            } else {
                a0.norm_sqr()
            };
        }
        let outcome = !rng.random_bool(p0.clamp(0.0, 1.0));
        let p = if outcome { 1.0 - p0 } else { p0 };
        let scale = 1.0 / p.sqrt();
        for k in (0..self.amps.len()).filter(|k| k & bit == 0) {
            let (a0, a1) = (self.amps[k], self.amps[k | bit]);
            let (b0, b1) = match (hadamard, outcome) {
                (false, false) => (a0, Complex64::new(0.0, 0.0)),
                (false, true) => (Complex64::new(0.0, 0.0), a1),
                (true, false) => ((a0 + a1) * 0.5, (a0 + a1) * 0.5),
                (true, true) => ((a0 - a1) * 0.5, (a1 - a0) * 0.5),
            };
            self.amps[k] = b0 * scale;
            self.amps[k | bit] = b1 * scale;
        }
        self.measured[i] = Some(outcome);
        Ok(outcome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random::seeded;

    #[test]
    fn matching_basis_is_deterministic() {
        let mut rng = seeded(1);
        let x: Bits = "1011".parse().unwrap();
        let t: Bits = "0110".parse().unwrap();
        let mut r = QubitRegister::bb84(&x, &t).unwrap();
        for i in [2, 0, 3, 1] {
            assert_eq!(r.measure(i, t.get(i), &mut rng).unwrap(), x.get(i));
        }
        assert!(r.measure(0, false, &mut rng).is_err());
    }

    #[test]
    fn conjugate_basis_is_a_fair_coin() {
        let mut rng = seeded(2);
        let trials = 4000;
        let ones = (0..trials)
            .filter(|_| {
                let mut r = QubitRegister::bb84(&"01".parse().unwrap(), &"01".parse().unwrap()).unwrap();
                r.measure(1, false, &mut rng).unwrap()
            })
            .count();
        assert!((ones as f64 / trials as f64 - 0.5).abs() < 3.0 * (0.25 / trials as f64).sqrt());
    }

    #[test]
    fn post_measurement_state_is_basis_state() {
        let mut rng = seeded(3);
        let mut r = QubitRegister::bb84(&"0".parse().unwrap(), &"0".parse().unwrap()).unwrap();
        let first = r.measure(0, true, &mut rng).unwrap();
        let expected = bb84_encode(&Bits::from_bools(&[first]).unwrap(), &"1".parse().unwrap()).unwrap();
        assert!((expected.amplitudes().dotc(&r.amps).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn register_cap() {
        let big = Bits::zeros(11);
        assert!(matches!(QubitRegister::bb84(&big, &big), Err(Error::CapExceeded(_))));
    }
}
