use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;

use qadapt::coding::{binary_entropy, Bits, HammingBall, LinearCode};
use qadapt::commitment::{storage_reduction_check, BindingMode};
use qadapt::protocols::{
    b92_encode, b92_guessing, bb84_ket, bcjl_equivalence_mc, bcjl_hiding_exact, bcjl_na_binding, bcjl_verifier,
    binomial_upper_tail, extraction_check, hoeffding_two_sided, lemma3_bound_check, sample_smallsup_state,
    simulate_commit_1cc, theta_guessing_analysis, verifier_overlap_bound, verifier_overlaps, BcjlInstance, Deviation,
    HidingVariant, OneCcParams, ScriptedAdversary, ThetaSet,
};
use qadapt::quantum::random::seeded;
use qadapt::quantum::{spectral_norm, CMatrix};

fn random_bits(n: usize, rng: &mut impl Rng) -> Bits {
    Bits::new(n, rng.random::<u64>() & ((1u64 << n) - 1)).unwrap()
}

#[test]
fn b92_overlaps_are_products() {
    let mut rng = seeded(4);
    for _ in 0..40 {
        let n = rng.random_range(1..=6);
        let (t, t2) = (random_bits(n, &mut rng), random_bits(n, &mut rng));
        let a = b92_encode(&t).unwrap();
        let b = b92_encode(&t2).unwrap();
        let expected = std::f64::consts::FRAC_PI_4.cos().powi(t.distance(&t2) as i32);
        assert!((a.inner(&b).re - expected).abs() < 1e-13);
    }
}

#[test]
fn joint_basis_guessing_is_multiplicative() {
    let gamma = theta_guessing_analysis(1, 0.01, 0.9).unwrap().gamma;
    assert!((gamma - 0.853553).abs() < 1e-6);
    for n in 2..=3 {
        let joint = b92_guessing(n).unwrap();
        assert!((joint - gamma.powi(n as i32)).abs() < 1e-7, "N = {n}: {joint}");
    }
}

#[test]
fn hiding_formula_edges() {
    let g = theta_guessing_analysis(20, 0.05, 0.9).unwrap();
    let per = (1.0 / g.gamma).log2();
    assert!((g.hmin_lower - 20.0 * (per - 0.1 - 0.1)).abs() < 1e-12);
    assert!((g.hiding_bound - 2f64.powf(-0.5 * g.hmin_lower)).abs() < 1e-15);
}

#[test]
fn side_register_rank_is_bounded_by_ball() {
    let mut rng = seeded(6);
    for seed in 0..30 {
        let n = rng.random_range(3..=8);
        let delta = [0.0, 0.125, 0.2, 0.34][seed as usize % 4];
        let dim_a = rng.random_range(1..=16);
        let st = sample_smallsup_state(&random_bits(n, &mut rng), delta, dim_a, seed).unwrap();
        let ball = HammingBall::new(Bits::zeros(n), delta).unwrap().size();
        assert!(st.h0_a().unwrap() <= ball.log2() + 1e-12);
        assert!(ball.log2() <= n as f64 * binary_entropy(delta).unwrap() + 1e-12 || delta > 0.5);
    }
}

/// `Σ_a |⟨a, 0^n_{θ''}|φ⟩|²` on the full state vector.
fn acceptance_by_vector(st: &qadapt::protocols::SmallSupState, theta2: &Bits) -> f64 {
    let phi = st.to_state_vector().unwrap();
    let ket = b92_encode(theta2).unwrap();
    let dim_b = 1usize << st.n();
    (0..st.dim_a())
        .map(|a| {
            phi.amplitudes()
                .rows(a * dim_b, dim_b)
                .dotc(ket.amplitudes())
                .norm_sqr()
        })
        .sum()
}

#[test]
fn lemma3_on_hamming_code() {
    let code = LinearCode::hamming74();
    let mut rng = seeded(11);
    for seed in 0..100u64 {
        let theta = random_bits(7, &mut rng);
        let st = sample_smallsup_state(&theta, 1.0 / 7.0, 1 + seed as usize % 4, seed).unwrap();
        let s = random_bits(3, &mut rng);
        let r = lemma3_bound_check(&st, &code, &s).unwrap();
        assert!(r.pass, "seed {seed}: {} > {}", r.worst_value, r.bound);
        assert!(r.worst_value <= r.intermediate_bound + 1e-12, "seed {seed}");
        assert_eq!(code.syndrome(&r.theta_prime).unwrap(), s);
        if seed < 5 {
            let t2 = r.worst_theta.unwrap();
            assert!((acceptance_by_vector(&st, &t2) - r.worst_value).abs() < 1e-12);
        }
    }
}

#[test]
fn extraction_chain_on_sampled_states() {
    let code = LinearCode::hamming74();
    let mut rng = seeded(12);
    for seed in 0..30u64 {
        let theta = random_bits(7, &mut rng);
        let st = sample_smallsup_state(&theta, 1.0 / 7.0, 2 + seed as usize % 3, 500 + seed).unwrap();
        let (g, s, w) = (random_bits(7, &mut rng), random_bits(3, &mut rng), rng.random_bool(0.5));
        let r = extraction_check(&st, &code, &g, &s, w, 1e-8).unwrap();
        assert!(r.pass, "seed {seed}: {r:?}");
        assert!(r.non_adaptive <= r.adaptive_upper + 1e-8);
        assert!(r.theorem_vacuous);
    }
}

#[test]
fn single_flip_is_caught_at_rate_q() {
    let params = OneCcParams {
        n: 30,
        q: 0.2,
        tau: 0.1,
        r: 0.5,
        delta: 0.1,
    };
    let adv = ScriptedAdversary {
        deviations: vec![(7, Deviation::Flip)],
    };
    let runs = 20_000;
    let s = simulate_commit_1cc(&params, &adv, 5, runs).unwrap();
    let freq = s.check_failures[7] as f64 / runs as f64;
    let sigma = (0.2 * 0.8 / runs as f64).sqrt();
    assert!((freq - 0.2).abs() <= 3.0 * sigma, "{freq}");
    assert!((s.bob_aborts as f64 / runs as f64 - s.bob_abort_exact).abs() <= 3.0 * sigma);
    assert!(s.check_failures.iter().enumerate().all(|(i, &c)| i == 7 || c == 0));
}

#[test]
fn wrong_basis_deviations_match_exact_abort_rate() {
    let params = OneCcParams {
        n: 20,
        q: 0.3,
        tau: 0.1,
        r: 0.5,
        delta: 0.1,
    };
    let adv = ScriptedAdversary {
        deviations: vec![
            (0, Deviation::WrongBasis),
            (3, Deviation::WrongBasis),
            (9, Deviation::Flip),
        ],
    };
    let runs = 20_000;
    let s = simulate_commit_1cc(&params, &adv, 8, runs).unwrap();
    let exact = 1.0 - (1.0 - 0.15) * (1.0 - 0.15) * (1.0 - 0.3);
    assert!((s.bob_abort_exact - exact).abs() < 1e-15);
    let sigma = (exact * (1.0 - exact) / runs as f64).sqrt();
    assert!((s.bob_aborts as f64 / runs as f64 - exact).abs() <= 3.0 * sigma);
}

#[test]
fn sampling_tail_against_exact_and_hoeffding() {
    for (n, q) in [(10usize, 0.1), (24, 0.1), (64, 0.05)] {
        let params = OneCcParams {
            n,
            q,
            tau: 0.1,
            r: 0.5,
            delta: 0.1,
        };
        let s = simulate_commit_1cc(&params, &ScriptedAdversary::default(), n as u64, 20_000).unwrap();
        assert!(s.tail_pass);
        assert!(s.alice_abort_exact <= s.hoeffding_bound);
        assert!((s.hoeffding_bound - hoeffding_two_sided(n, q)).abs() < 1e-15);
        let sigma = (s.alice_abort_exact * (1.0 - s.alice_abort_exact) / 20_000.0).sqrt();
        assert!(
            (s.alice_abort_frequency - s.alice_abort_exact).abs() <= 3.0 * sigma + 1e-12,
            "N = {n}"
        );
    }
    assert!((binomial_upper_tail(10, 0.1, 2.0).unwrap() - 0.0701908264).abs() < 1e-9);
}

#[test]
fn verifier_product_norm_and_overlap_bound() {
    let mut rng = seeded(21);
    for _ in 0..60 {
        let n = rng.random_range(2..=5);
        let delta = [0.0, 0.2, 0.25, 0.34][rng.random_range(0..4)];
        let (x, t, x2, t2) = (
            random_bits(n, &mut rng),
            random_bits(n, &mut rng),
            random_bits(n, &mut rng),
            random_bits(n, &mut rng),
        );
        let v = bcjl_verifier(&x, &t, delta).unwrap();
        let v2 = bcjl_verifier(&x2, &t2, delta).unwrap();
        let exact = spectral_norm(&(&v * &v2));
        let m = verifier_overlaps(&x, &t, &x2, &t2, delta).unwrap();
        assert!((spectral_norm(&m) - exact).abs() < 1e-10);
        assert!(exact <= verifier_overlap_bound(&m) + 1e-12);
        assert!((spectral_norm(&(&v + &v2)) - 1.0 - exact).abs() < 1e-10);
    }
}

#[test]
fn repetition_na_binding_matches_projector_oracle() {
    let code = LinearCode::repetition(3).unwrap();
    for g in ["100", "010", "111"] {
        for w in [false, true] {
            let inst = BcjlInstance::new(&code, 0.0, g.parse().unwrap(), "00".parse().unwrap(), w).unwrap();
            let r = bcjl_na_binding(&inst, &ThetaSet::Full, 100).unwrap();
            let mut oracle: f64 = 0.0;
            for x in inst.openings(false).unwrap() {
                for x2 in inst.openings(true).unwrap() {
                    for t in Bits::all(3) {
                        for t2 in Bits::all(3) {
                            let a = bb84_ket(&x, &t).unwrap();
                            let b = bb84_ket(&x2, &t2).unwrap();
                            let sum: CMatrix = &a * a.adjoint() + &b * b.adjoint();
                            oracle = oracle.max(spectral_norm(&sum));
                        }
                    }
                }
            }
            assert!((r.max_sum - oracle).abs() < 1e-12);
            assert_eq!(r.overlap_violations, 0);
            assert!(r.pass);
        }
    }
}

#[test]
fn hamming_na_binding_sampled() {
    let inst = BcjlInstance::new(
        &LinearCode::hamming74(),
        1.0 / 7.0,
        "1010011".parse().unwrap(),
        "011".parse().unwrap(),
        true,
    )
    .unwrap();
    let r = bcjl_na_binding(&inst, &ThetaSet::Sampled { pairs: 1000, seed: 2 }, 0).unwrap();
    assert_eq!(r.pairs_evaluated, 1000);
    assert_eq!(r.overlap_violations, 0);
    assert!(r.worst_overlap_slack >= 0.0);
    assert!(r.pass);
    assert_eq!(r.theta_set, ThetaSet::Sampled { pairs: 1000, seed: 2 });
}

#[test]
fn equivalence_full_distance() {
    for n in [4usize, 8, 12] {
        let s = bcjl_equivalence_mc(0.5, n, n, 40_000, n as u64).unwrap();
        let exact = 0.5f64.powi(n as i32);
        assert!((s.exact - exact).abs() < 1e-15);
        assert!(s.pass);
        let sigma = (exact * (1.0 - exact) / 40_000.0).sqrt();
        assert!((s.frequency - exact).abs() <= 3.0 * sigma + 1e-12);
    }
}

/// Distance between Bob's views `(θ̂, x̂, g, s, w)` by explicit enumeration.
fn measured_hiding_oracle(code: &LinearCode) -> f64 {
    let n = code.n();
    let mut p: [HashMap<(u64, u64, u64, u64, bool), f64>; 2] = [HashMap::new(), HashMap::new()];
    for (b, table) in p.iter_mut().enumerate() {
        for x in Bits::all(n) {
            for t in Bits::all(n) {
                for t_hat in Bits::all(n) {
                    for x_hat in Bits::all(n) {
                        let mut pr = 1.0;
                        for i in 0..n {
                            if t.get(i) == t_hat.get(i) {
                                pr *= f64::from(u8::from(x.get(i) == x_hat.get(i)));
                            } else {
                                pr *= 0.5;
                            }
                        }
                        if pr == 0.0 {
                            continue;
                        }
                        for g in Bits::all(n) {
                            let w = g.dot(&x) ^ (b == 1);
                            let key = (
                                t_hat.mask(),
                                x_hat.mask(),
                                g.mask(),
                                code.syndrome(&x).unwrap().mask(),
                                w,
                            );
                            *table.entry(key).or_default() += pr / 16f64.powi(n as i32);
                        }
                    }
                }
            }
        }
    }
    let keys: std::collections::HashSet<_> = p[0].keys().chain(p[1].keys()).copied().collect();
    0.5 * keys
        .iter()
        .map(|k| (p[0].get(k).unwrap_or(&0.0) - p[1].get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

fn identity_code(n: usize) -> LinearCode {
    LinearCode::from_generator(n, (0..n).map(|i| Bits::zeros(n).with(i, true)).collect()).unwrap()
}

#[test]
fn measured_hiding_matches_enumeration() {
    for code in [
        identity_code(2),
        LinearCode::repetition(2).unwrap(),
        LinearCode::repetition(3).unwrap(),
        identity_code(3),
    ] {
        let r = bcjl_hiding_exact(&code, HidingVariant::MeasuredBob).unwrap();
        let oracle = measured_hiding_oracle(&code);
        assert!((r.exact_distance - oracle).abs() < 1e-12, "{r:?} vs {oracle}");
    }
}

#[test]
fn quantum_bob_learns_at_least_as_much() {
    for code in [
        identity_code(3),
        LinearCode::repetition(3).unwrap(),
        LinearCode::repetition(4).unwrap(),
    ] {
        let m = bcjl_hiding_exact(&code, HidingVariant::MeasuredBob).unwrap();
        let q = bcjl_hiding_exact(&code, HidingVariant::QuantumBob).unwrap();
        assert!(m.exact_distance <= q.exact_distance + 1e-12);
        assert!(q.exact_distance <= q.bound + 1e-12 || q.vacuous);
    }
}

#[test]
fn hiding_improves_with_rate() {
    let n = 4;
    let codes = [
        LinearCode::repetition(4).unwrap(),
        LinearCode::from_strings(&["1100", "0011"]).unwrap(),
        LinearCode::from_strings(&["1001", "0101", "0011"]).unwrap(),
        identity_code(n),
    ];
    let distances: Vec<f64> = codes
        .iter()
        .map(|c| bcjl_hiding_exact(c, HidingVariant::MeasuredBob).unwrap().exact_distance)
        .collect();
    for pair in distances.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-12, "{distances:?}");
    }
}

#[test]
fn bcjl_storage_reduction_one_qubit() {
    let code = LinearCode::repetition(2).unwrap();
    let inst = BcjlInstance::new(&code, 0.0, "10".parse().unwrap(), "0".parse().unwrap(), false).unwrap();
    let thetas: Vec<Bits> = Bits::all(2).collect();
    let scheme = inst.scheme(&thetas).unwrap();
    assert_eq!(scheme.openings(0).len(), 4);
    let eps = scheme.eps_na();
    assert!(eps <= inst.na_bound().unwrap() - 1.0 + 1e-9);
    let r = storage_reduction_check(&scheme, 1, eps, 6, BindingMode::ProjectiveBruteforce, 3).unwrap();
    assert!(r.pass, "{:?}", r.trials);
    let _ = Complex64::new(0.0, 0.0);
}
