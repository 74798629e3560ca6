//! Simulators run as programs against the ideal functionalities, and the
//! real-versus-ideal comparison over scripted adversaries.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::commit::BcRealization;
use super::ideal::{Decision, FunctionalityKind, ObliviousTransfer, Output, TwoCcPrime};
use super::ot::{execute, run_ot_protocol, AliceRole, BobRole, OtAdversary, OtInputs, SenderScript};
use super::transcript::{ExecutionTranscript, Party, Scheduler};
use super::twocc::{TwoCcInputs, TwoCcSenderScript};
use crate::coding::Bits;
use crate::error::{Error, Result};
use crate::quantum::random::{child_seed, seeded};

const F2CC: Party = Party::Functionality(FunctionalityKind::TwoCcPrime);

/// Ideal world for a corrupted 2CC sender: the simulator reads `s0` and
/// `s1` off the simulated commitment and 1CC, feeds 2CC′, and answers
/// `continue` exactly when the script would open honestly.
pub fn simulate_2cc_sender(inputs: &TwoCcInputs, script: TwoCcSenderScript, seed: u64) -> Result<ExecutionTranscript> {
    let mut sched = Scheduler::default();
    let mut f = TwoCcPrime::default();
    sched.send(Party::Alice, Party::Simulator, "commit", &inputs.s0)?;
    sched.send(Party::Alice, Party::Simulator, "x", &inputs.s1)?;
    sched.send(Party::Simulator, F2CC, "inputs", &(inputs.s0, inputs.s1))?;
    f.input_sender(inputs.s0, inputs.s1)?;
    sched.send(Party::Bob, F2CC, "c", &inputs.c)?;
    f.input_receiver(inputs.c)?;
    let (c, now) = f.fire()?;
    sched.send(F2CC, Party::Simulator, "c", &c)?;
    let bob = match now {
        Some(out) => out,
        None => {
            let decision = if script == TwoCcSenderScript::Honest {
                Decision::Continue
            } else {
                Decision::Abort
            };
            sched.send(Party::Simulator, F2CC, "decision", &decision)?;
            let out = f.decide(decision)?;
            if out == Output::Abort {
                sched.abort(Party::Bob, "commitment not opened");
            }
            out
        }
    };
    Ok(sched.finish("2cc-ideal", seed, Some(Output::Bit(c)), Some(bob)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Corruption {
    Sender,
    Receiver,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoConfig {
    pub n: usize,
    pub ell: usize,
    pub runs: usize,
    pub bc: BcRealization,
    /// Qubits any machine may hold unmeasured at once.
    pub memory_qubits: usize,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            n: 8,
            ell: 4,
            runs: 1000,
            bc: BcRealization::default(),
            memory_qubits: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryStat {
    pub label: String,
    pub real: usize,
    pub ideal: usize,
    pub deviation: f64,
    /// Three pooled standard errors of the difference.
    pub allowed: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub corruption: Corruption,
    pub script: OtAdversary,
    pub config: DemoConfig,
    pub categories: Vec<CategoryStat>,
    /// Runs where a per-run cross check applied, and how many agreed.
    pub cross_checks: usize,
    pub cross_agreements: usize,
    pub pass: bool,
}

pub const CATEGORIES: [&str; 4] = ["chosen", "other-string", "unrelated", "abort"];

fn category(out: &Output, inputs: &OtInputs) -> usize {
    match out {
        Output::Bits(v) if v == inputs.chosen() => 0,
        Output::Bits(v) if v == inputs.other() => 1,
        Output::Abort => 3,
        _ => 2,
    }
}

struct RunPair {
    real: usize,
    ideal: usize,
    cross: Option<bool>,
}

fn env_inputs(ell: usize, seed: u64) -> Result<OtInputs> {
    let mut rng = seeded(seed);
    let mut draw = || Bits::new(ell, rng.random::<u64>() & ((1u64 << ell) - 1));
    let (s0, s1) = (draw()?, draw()?);
    Ok(OtInputs {
        s0,
        s1,
        c: rng.random_bool(0.5),
    })
}

fn one_run(adv: &OtAdversary, cfg: &DemoConfig, seed: u64, r: u64) -> Result<RunPair> {
    let inputs = env_inputs(cfg.ell, child_seed(seed, 3 * r))?;
    let real_t = run_ot_protocol(&inputs, cfg.n, Some(adv), &cfg.bc, child_seed(seed, 3 * r + 1))?;
    let real = real_t.bob.unwrap_or(Output::Abort);
    let ideal_seed = child_seed(seed, 3 * r + 2);
    let mut ot = ObliviousTransfer::default();
    let (ideal, cross) = match adv {
        OtAdversary::Sender(script) => {
            ot.input_receiver(inputs.c)?;
            let alice = AliceRole::Script {
                script,
                s0: inputs.s0,
                s1: inputs.s1,
            };
            let out = execute(cfg.n, cfg.ell, &cfg.bc, ideal_seed, alice, BobRole::Simulator)?;
            let ideal = match out.reconstructed {
                Some((a, b)) => {
                    ot.input_sender(a, b)?;
                    ot.deliver()?
                }
                None => ot.abort()?,
            };
            let applies = *script != SenderScript::Garbage && real != Output::Abort && ideal != Output::Abort;
            (ideal.clone(), applies.then(|| ideal == real))
        }
        OtAdversary::Receiver(script) => {
            ot.input_sender(inputs.s0, inputs.s1)?;
            let bob = BobRole::Script {
                script: *script,
                c: inputs.c,
            };
            let out = execute(
                cfg.n,
                cfg.ell,
                &cfg.bc,
                ideal_seed,
                AliceRole::Simulator { ot: &mut ot },
                bob,
            )?;
            let cross = out.extracted_choice.map(|c| c == script.effective_choice(inputs.c));
            (out.bob_value.map_or(Output::Abort, Output::Bits), cross)
        }
    };
    Ok(RunPair {
        real: category(&real, &inputs),
        ideal: category(&ideal, &inputs),
        cross,
    })
}

/// Runs `config.runs` real executions against the script and as many ideal
/// executions with the matching simulator, then compares the environment's
/// view (Bob's output relative to the inputs) category by category.
pub fn run_simulator_demo(corruption: Corruption, script: &str, config: &DemoConfig, seed: u64) -> Result<DemoReport> {
    let adv = OtAdversary::from_name(script, config.n)?;
    let matches_side = matches!(
        (&adv, corruption),
        (OtAdversary::Sender(_), Corruption::Sender) | (OtAdversary::Receiver(_), Corruption::Receiver)
    );
    if !matches_side {
        return Err(Error::Input(format!(
            "script `{script}` does not corrupt the {corruption:?}"
        )));
    }
    // Only the delayed-measurement simulator holds qubits.
    let needed = if corruption == Corruption::Sender { config.n } else { 0 };
    if needed > config.memory_qubits {
        return Err(Error::Input(format!(
            "simulator holds {needed} qubits, memory configured for {}",
            config.memory_qubits
        )));
    }
    if config.runs == 0 || config.ell == 0 || config.ell > 32 {
        return Err(Error::Input("need runs ≥ 1 and 1 ≤ ell ≤ 32".into()));
    }
    let pairs = (0..config.runs as u64)
        .into_par_iter()
        .map(|r| one_run(&adv, config, seed, r))
        .collect::<Result<Vec<_>>>()?;

    let runs = config.runs as f64;
    let categories: Vec<CategoryStat> = CATEGORIES
        .iter()
        .enumerate()
        .map(|(k, label)| {
            let real = pairs.iter().filter(|p| p.real == k).count();
            let ideal = pairs.iter().filter(|p| p.ideal == k).count();
            let pooled = (real + ideal) as f64 / (2.0 * runs);
            let allowed = 3.0 * (2.0 * pooled * (1.0 - pooled) / runs).sqrt();
            let deviation = (real as f64 - ideal as f64).abs() / runs;
            CategoryStat {
                label: label.to_string(),
                real,
                ideal,
                deviation,
                allowed,
                pass: deviation <= allowed,
            }
        })
        .collect();
    let cross_checks = pairs.iter().filter(|p| p.cross.is_some()).count();
    let cross_agreements = pairs.iter().filter(|p| p.cross == Some(true)).count();
    let pass = categories.iter().all(|c| c.pass) && cross_checks == cross_agreements;
    Ok(DemoReport {
        corruption,
        script: adv,
        config: config.clone(),
        categories,
        cross_checks,
        cross_agreements,
        pass,
    })
}
