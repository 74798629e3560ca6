use super::{AttackGame, BinaryPovmFamily};
use crate::error::Result;
use crate::quantum::random::{haar_state, random_effect, seeded};
use crate::quantum::{c, cr, tensor, CMatrix, DensityOperator, RegisterShape};

/// `ρ = ¼ Σ_z |β_z⟩⟨β_z|_{AA'} ⊗ |z⟩⟨z|_B` with `E1^j = |j⟩⟨j|_B`: a Bell
/// measurement on `AA'` wins with certainty, while `A'` alone (or nothing)
/// gives `¼`.
pub fn bell_counterexample() -> AttackGame {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bells: [[f64; 4]; 4] = [[s, 0.0, 0.0, s], [0.0, s, s, 0.0], [s, 0.0, 0.0, -s], [0.0, s, -s, 0.0]];
    let shape = RegisterShape::new(vec![("A", 2), ("A'", 2), ("B", 4)]).expect("fixed shape");
    let mut rho = CMatrix::zeros(16, 16);
    let mut e1 = Vec::with_capacity(4);
    for (z, amps) in bells.iter().enumerate() {
        let v = CMatrix::from_iterator(4, 1, amps.iter().map(|a| c(*a, 0.0)));
        let mut zz = CMatrix::zeros(4, 4);
        zz[(z, z)] = cr(1.0);
        rho += tensor(&(&v * v.adjoint()), &zz) * cr(0.25);
        e1.push(zz);
    }
    let state = DensityOperator::new(shape, rho).expect("valid state");
    let labels = ["00", "01", "10", "11"].iter().map(|s| s.to_string()).collect();
    let family = BinaryPovmFamily::from_accepting(RegisterShape::single("B", 4).expect("shape"), labels, e1)
        .expect("valid family");
    AttackGame::new(state, vec!["A".into()], vec!["A'".into()], vec!["B".into()], family).expect("valid game")
}

/// Haar-random pure state on `A ⊗ A' ⊗ B` and `outcomes` random binary
/// measurements on `B`. A register of dimension 1 is empty.
pub fn random_game(seed: u64, d_a: usize, d_a_prime: usize, d_b: usize, outcomes: usize) -> Result<AttackGame> {
    let mut rng = seeded(seed);
    let shape = RegisterShape::new(vec![("A", d_a), ("A'", d_a_prime), ("B", d_b)])?;
    let state = haar_state(&shape, &mut rng)?.to_density();
    let e1 = (0..outcomes).map(|_| random_effect(d_b, &mut rng)).collect();
    let labels = (0..outcomes).map(|j| j.to_string()).collect();
    let family = BinaryPovmFamily::from_accepting(RegisterShape::single("B", d_b)?, labels, e1)?;
    AttackGame::new(state, vec!["A".into()], vec!["A'".into()], vec!["B".into()], family)
}
