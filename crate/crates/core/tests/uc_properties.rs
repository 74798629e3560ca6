use proptest::prelude::*;

use qadapt::coding::{binomial, Bits};
use qadapt::uc::{
    run_2cc_protocol, run_ot_protocol, run_simulator_demo, BcRealization, Corruption, DemoConfig, ExecutionTranscript,
    OtAdversary, OtInputs, Output, TwoCcInputs, TwoCcSenderScript,
};

fn ot_inputs(c: bool) -> OtInputs {
    OtInputs {
        s0: "1001".parse().unwrap(),
        s1: "0111".parse().unwrap(),
        c,
    }
}

/// Pr[more than 3n/5 of n fair coins are 1], summed term by term.
fn check_abort_probability(n: usize) -> f64 {
    (0..=n).filter(|&k| 5 * k > 3 * n).map(|k| binomial(n, k)).sum::<f64>() / 2f64.powi(n as i32)
}

#[test]
fn honest_ot_completeness_and_abort_rate() {
    assert!((check_abort_probability(8) - 93.0 / 256.0).abs() < 1e-15);
    let runs = 1000;
    let mut aborts = 0;
    for seed in 0..runs {
        let c = seed % 2 == 1;
        let t = run_ot_protocol(&ot_inputs(c), 8, None, &BcRealization::Ideal, seed).unwrap();
        if t.aborted() {
            aborts += 1;
            assert_eq!(t.bob, Some(Output::Abort));
        } else {
            assert_eq!(t.bob, Some(Output::Bits(*ot_inputs(c).chosen())), "seed {seed}");
        }
    }
    let p = 93.0 / 256.0;
    let freq = aborts as f64 / runs as f64;
    assert!((freq - p).abs() <= 3.0 * (p * (1.0 - p) / runs as f64).sqrt(), "{freq}");
}

#[test]
fn ot_over_one_cc_commitments_stays_correct() {
    let mut completed = 0;
    for seed in 0..100 {
        let t = run_ot_protocol(&ot_inputs(true), 6, None, &BcRealization::default(), seed).unwrap();
        if !t.aborted() {
            completed += 1;
            assert_eq!(t.bob, Some(Output::Bits(*ot_inputs(true).chosen())));
        }
        assert!(t.events.iter().any(|e| e.label == "hash"));
    }
    assert!(completed > 40);
}

#[test]
fn composed_two_cc_preserves_honest_outputs() {
    let bc = BcRealization::default();
    let mut completed = 0;
    for k in 0..8u8 {
        let i = TwoCcInputs {
            s0: k & 1 != 0,
            s1: k & 2 != 0,
            c: k & 4 != 0,
        };
        for seed in 0..25 {
            let t = run_2cc_protocol(&i, None, &bc, seed).unwrap();
            if t.aborted() {
                assert!(t.aborts.iter().all(|a| a.reason.starts_with("commit")));
                continue;
            }
            completed += 1;
            assert_eq!(t.alice, Some(Output::Bit(i.c)));
            let expected = if i.c {
                Output::Bits(Bits::from_bools(&[i.s0, i.s1]).unwrap())
            } else {
                Output::Bottom
            };
            assert_eq!(t.bob, Some(expected));
        }
    }
    assert!(completed >= 190);
}

#[test]
fn refusing_sender_makes_bob_abort_under_both_realizations() {
    for bc in [BcRealization::Ideal, BcRealization::default()] {
        let i = TwoCcInputs {
            s0: true,
            s1: false,
            c: true,
        };
        for seed in 0..10 {
            let t = run_2cc_protocol(&i, Some(TwoCcSenderScript::RefuseOpen), &bc, seed).unwrap();
            assert_eq!(t.bob, Some(Output::Abort));
        }
    }
}

#[test]
fn transcripts_round_trip_through_json_lines() {
    let adv = OtAdversary::from_name("receiver:inverted", 5).unwrap();
    let t = run_ot_protocol(&ot_inputs(false), 5, Some(&adv), &BcRealization::default(), 17).unwrap();
    let text = t.to_json_lines().unwrap();
    let back = ExecutionTranscript::from_json_lines(&text).unwrap();
    assert_eq!(back, t);
    assert_eq!(back.to_json_lines().unwrap(), text);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn replay_is_bit_for_bit(seed in any::<u64>(), n in 1usize..=8, c in any::<bool>(), script in 0usize..7, ideal in any::<bool>()) {
        let bc = if ideal { BcRealization::Ideal } else { BcRealization::default() };
        let adv = OtAdversary::from_name(OtAdversary::NAMES[script], n).unwrap();
        let a = run_ot_protocol(&ot_inputs(c), n, Some(&adv), &bc, seed).unwrap().to_json_lines().unwrap();
        let b = run_ot_protocol(&ot_inputs(c), n, Some(&adv), &bc, seed).unwrap().to_json_lines().unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn two_cc_replay_is_bit_for_bit(seed in any::<u64>(), k in 0u8..8, script in 0usize..3) {
        let i = TwoCcInputs { s0: k & 1 != 0, s1: k & 2 != 0, c: k & 4 != 0 };
        let script: TwoCcSenderScript = TwoCcSenderScript::NAMES[script].parse().unwrap();
        let bc = BcRealization::default();
        let a = run_2cc_protocol(&i, Some(script), &bc, seed).unwrap();
        let b = run_2cc_protocol(&i, Some(script), &bc, seed).unwrap();
        prop_assert_eq!(a.to_json_lines().unwrap(), b.to_json_lines().unwrap());
    }
}

#[test]
fn simulators_match_real_executions() {
    let cfg = DemoConfig::default();
    for name in OtAdversary::NAMES {
        let side = if name.starts_with("sender") {
            Corruption::Sender
        } else {
            Corruption::Receiver
        };
        let r = run_simulator_demo(side, name, &cfg, 99).unwrap();
        assert!(r.pass, "{name}: {:?}", r.categories);
        assert_eq!(r.cross_checks, r.cross_agreements, "{name}");
        let total: usize = r.categories.iter().map(|c| c.real).sum();
        assert_eq!(total, cfg.runs);
        if name == "sender:check-all" {
            assert_eq!(r.categories[3].real, cfg.runs);
        }
        if name == "receiver:inverted" {
            assert!(r.categories[1].real > 500);
        }
    }
}

#[test]
fn demo_verdicts_are_seed_stable() {
    let cfg = DemoConfig {
        runs: 300,
        ..DemoConfig::default()
    };
    for seed in [1, 2, 3] {
        let r = run_simulator_demo(Corruption::Receiver, "receiver:honest", &cfg, seed).unwrap();
        assert!(r.pass);
        assert!(r.cross_checks > 150);
    }
}
