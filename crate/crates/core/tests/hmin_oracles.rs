use nalgebra::DVector;
use num_complex::Complex64;
use qadapt::measurement::{hmin_cq, hmin_general, CqState};
use qadapt::quantum::{identity, loewner_leq, random, tensor, CMatrix, DensityOperator, RegisterShape, StateVector};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn maximally_entangled_dual_grid() {
    let shape = RegisterShape::new(vec![("A", 2), ("B", 2)]).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let phi = StateVector::new(
        shape,
        DVector::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]),
    )
    .unwrap()
    .to_density();

    let steps: Vec<f64> = (0..=15).map(|i| i as f64 * 0.1).collect();
    let offs: Vec<f64> = (-5..=5).map(|i| i as f64 * 0.1).collect();
    let mut best = f64::INFINITY;
    for &a in &steps {
        for &e in &steps {
            if a + e >= best {
                continue;
            }
            for &b in &offs {
                for &im in &offs {
                    let sigma = CMatrix::from_row_slice(2, 2, &[c(a, 0.0), c(b, im), c(b, -im), c(e, 0.0)]);
                    if loewner_leq(phi.matrix(), &tensor(&identity(2), &sigma), 1e-12).unwrap() {
                        best = best.min(a + e);
                    }
                }
            }
        }
    }
    assert!((best - 2.0).abs() < 1e-12, "grid optimum {best}");

    let h = hmin_general(&phi, &["A"], 1e-7, 10_000).unwrap();
    assert!(h.converged);
    assert!((h.value() - (-best.log2())).abs() < 1e-7);
}

#[test]
fn general_agrees_with_cq_on_random_inputs() {
    let mut rng = random::seeded(2024);
    let b = RegisterShape::single("B", 2).unwrap();
    for trial in 0..10 {
        let k = 2 + trial % 3;
        let weights = random::dirichlet_flat(k, &mut rng);
        let states: Vec<DensityOperator> = (0..k)
            .map(|_| random::random_density(&b, 1 + trial % 2, &mut rng).unwrap())
            .collect();
        let cq = CqState::new((0..k).map(|x| x.to_string()).collect(), weights.clone(), states.clone()).unwrap();

        let mut joint = CMatrix::zeros(2 * k, 2 * k);
        for x in 0..k {
            let mut proj = CMatrix::zeros(k, k);
            proj[(x, x)] = c(1.0, 0.0);
            joint += tensor(&proj, states[x].matrix()) * c(weights[x], 0.0);
        }
        let shape = RegisterShape::new(vec![("X", k), ("B", 2)]).unwrap();
        let rho = DensityOperator::new(shape, joint).unwrap();

        let g = hmin_general(&rho, &["X"], 1e-7, 10_000).unwrap();
        let q = hmin_cq(&cq).unwrap();
        assert!(g.converged && q.converged);
        assert!(g.lower <= q.upper + 1e-9 && q.lower <= g.upper + 1e-9);
        assert!((g.value() - q.value()).abs() < 1e-7, "trial {trial}");
        let lifted = tensor(&identity(k), &g.sigma);
        assert!(loewner_leq(rho.matrix(), &lifted, 1e-9).unwrap());
    }
}

#[test]
fn random_bipartite_brackets_are_feasible() {
    let mut rng = random::seeded(77);
    for (da, db) in [(2, 2), (2, 3), (3, 2), (4, 4)] {
        let shape = RegisterShape::new(vec![("A", da), ("B", db)]).unwrap();
        let rho = random::random_density(&shape, 1 + da * db / 3, &mut rng).unwrap();
        let h = hmin_general(&rho, &["A"], 1e-7, 10_000).unwrap();
        assert!(h.converged, "{da}x{db}: [{}, {}]", h.lower, h.upper);
        let lifted = tensor(&identity(da), &h.sigma);
        assert!(loewner_leq(rho.matrix(), &lifted, 1e-9).unwrap());
        assert!(h.upper <= (da as f64).log2() + 1e-9);
        assert!(h.lower >= -(da as f64).log2() - 1e-9);
    }
}
