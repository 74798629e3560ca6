//! BB84 / B92 product states. Basis bit 0 is the computational basis and 1
//! the Hadamard basis, so `|b⟩_0 = |b⟩` and `|0⟩_1 = |+⟩`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::coding::Bits;
use crate::error::{Error, Result};
use crate::measurement::{guessing_probability, CqState};
use crate::quantum::{DensityOperator, RegisterShape, StateVector};

/// Largest number of qubits encoded as an explicit state vector.
pub const MAX_ENCODED_QUBITS: usize = 12;

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn qubit(value: bool, basis: bool) -> [f64; 2] {
    match (basis, value) {
        (false, false) => [1.0, 0.0],
        (false, true) => [0.0, 1.0],
        (true, false) => [H, H],
        (true, true) => [H, -H],
    }
}

/// `⊗_i |x_i⟩_{θ_i}` on qubits `q0 … q{n−1}`.
pub fn bb84_encode(x: &Bits, theta: &Bits) -> Result<StateVector> {
    let n = x.len();
    if theta.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} values with {} bases",
            theta.len()
        )));
    }
    if n == 0 || n > MAX_ENCODED_QUBITS {
        return Err(Error::CapExceeded(format!(
            "encoding {n} qubits, cap {MAX_ENCODED_QUBITS}"
        )));
    }
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for i in 0..n {
        let q = qubit(x.get(i), theta.get(i));
        amps = amps.iter().flat_map(|a| q.map(|c| a * c)).collect();
    }
    let shape = RegisterShape::with_cap((0..n).map(|i| (format!("q{i}"), 2)).collect(), 1 << MAX_ENCODED_QUBITS)?;
    StateVector::new(shape, DVector::from_vec(amps))
}

/// `|0^N⟩_θ`.
pub fn b92_encode(theta: &Bits) -> Result<StateVector> {
    bb84_encode(&Bits::zeros(theta.len()), theta)
}

/// `⟨z|_θ |z'⟩_{θ'}` in closed form: same-basis positions must agree and
/// each mixed-basis position contributes `±1/√2`.
pub fn bb84_overlap(z: &Bits, theta: &Bits, z2: &Bits, theta2: &Bits) -> f64 {
    let mixed = theta.xor(theta2);
    let differ = z.xor(z2);
    if differ.mask() & !mixed.mask() != 0 {
        return 0.0;
    }
    let sign = if (z.mask() & z2.mask() & mixed.mask()).count_ones() % 2 == 1 {
        -1.0
    } else {
        1.0
    };
    sign * H.powi(mixed.weight() as i32)
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaGuessing {
    /// Single-qubit guessing probability of the basis from `|0⟩_θ`.
    pub gamma: f64,
    /// `N(lg(1/γ) − 2q − (1 − r))`.
    pub hmin_lower: f64,
    /// `2^{−½ hmin_lower}`.
    pub hiding_bound: f64,
}

/// Guessing probability of `θ ∈ {0,1}^N` from `|0^N⟩_θ`, by the SDP.
pub fn b92_guessing(n: usize) -> Result<f64> {
    let states = Bits::all(n)
        .map(|t| Ok(b92_encode(&t)?.to_density()))
        .collect::<Result<Vec<DensityOperator>>>()?;
    Ok(guessing_probability(&CqState::uniform(states)?)?.primal_value)
}

pub fn theta_guessing_analysis(n: usize, q: f64, r: f64) -> Result<ThetaGuessing> {
    if n == 0 || q < 0.0 || !(0.0..=1.0).contains(&r) {
        return Err(Error::Input(format!("invalid parameters N = {n}, q = {q}, r = {r}")));
    }
    let gamma = b92_guessing(1)?;
    let hmin_lower = n as f64 * ((1.0 / gamma).log2() - 2.0 * q - (1.0 - r));
    Ok(ThetaGuessing {
        gamma,
        hmin_lower,
        hiding_bound: 2f64.powf(-0.5 * hmin_lower),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn computational_and_hadamard() {
        let s = b92_encode(&"000".parse().unwrap()).unwrap();
        assert!((s.amplitudes()[0].re - 1.0).abs() < 1e-15);
        let s = b92_encode(&"1".parse().unwrap()).unwrap();
        assert!((s.amplitudes()[0].re - H).abs() < 1e-15 && (s.amplitudes()[1].re - H).abs() < 1e-15);
    }

    #[test]
    fn string_order_matches_register_order() {
        let s = bb84_encode(&"10".parse().unwrap(), &"00".parse().unwrap()).unwrap();
        assert!((s.amplitudes()[2].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn overlap_matches_state_vectors() {
        for (z, t, z2, t2) in [
            ("0110", "0011", "0101", "1010"),
            ("111", "101", "011", "110"),
            ("00", "00", "01", "00"),
        ] {
            let (z, t, z2, t2) = (
                z.parse().unwrap(),
                t.parse().unwrap(),
                z2.parse().unwrap(),
                t2.parse().unwrap(),
            );
            let a = bb84_encode(&z, &t).unwrap();
            let b = bb84_encode(&z2, &t2).unwrap();
            let direct = a.inner(&b);
            assert!((direct.re - bb84_overlap(&z, &t, &z2, &t2)).abs() < 1e-14);
            assert!(direct.im.abs() < 1e-15);
        }
    }

    #[test]
    fn gamma_is_cos_squared_pi_over_eight() {
        let g = theta_guessing_analysis(10, 0.0, 1.0).unwrap();
        let expected = (std::f64::consts::PI / 8.0).cos().powi(2);
        assert!((g.gamma - expected).abs() < 1e-8);
        assert!((g.hiding_bound - 2f64.powf(-5.0 * (1.0 / g.gamma).log2())).abs() < 1e-12);
    }

    #[test]
    fn oversize_rejected() {
        assert!(b92_encode(&Bits::zeros(13)).is_err());
    }
}
