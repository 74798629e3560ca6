//! Oblivious transfer from BB84 qubits, per-position commitments and 1CC
//! checks. Real runs and both simulators share one engine; the roles decide
//! who deviates and how.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::commit::{commit_bit, BcRealization};
use super::ideal::{CutAndChoose, FunctionalityKind, ObliviousTransfer, Output};
use super::register::{QubitRegister, MAX_REGISTER_QUBITS};
use super::transcript::{ExecutionTranscript, Party, Scheduler};
use crate::coding::{Bits, MAX_BITS};
use crate::error::{Error, Result};
use crate::quantum::random::{child_seed, seeded};

pub const MAX_OT_QUBITS: usize = MAX_REGISTER_QUBITS;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OtInputs {
    pub s0: Bits,
    pub s1: Bits,
    pub c: bool,
}

impl OtInputs {
    fn validate(&self) -> Result<usize> {
        let ell = self.s0.len();
        if ell == 0 || ell != self.s1.len() {
            return Err(Error::Input("s0 and s1 must be non-empty and of equal length".into()));
        }
        Ok(ell)
    }

    pub fn chosen(&self) -> &Bits {
        if self.c {
            &self.s1
        } else {
            &self.s0
        }
    }

    pub fn other(&self) -> &Bits {
        if self.c {
            &self.s0
        } else {
            &self.s1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "script", rename_all = "kebab-case")]
pub enum SenderScript {
    Honest,
    /// Honest except that `x^A` and `θ^A` are fixed in advance.
    Fixed {
        x: Bits,
        theta: Bits,
    },
    /// Asks to see every position.
    CheckAll,
    /// Sends uniformly random masked strings.
    Garbage,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReceiverScript {
    Honest,
    /// Builds the partition for `1 − c` and outputs that string.
    Inverted,
    /// Measures every qubit in the computational basis.
    FixedBasis,
}

impl ReceiverScript {
    pub fn effective_choice(self, c: bool) -> bool {
        match self {
            ReceiverScript::Inverted => !c,
            _ => c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OtAdversary {
    Sender(SenderScript),
    Receiver(ReceiverScript),
}

impl OtAdversary {
    pub const NAMES: [&'static str; 7] = [
        "sender:honest",
        "sender:fixed",
        "sender:check-all",
        "sender:garbage",
        "receiver:honest",
        "receiver:inverted",
        "receiver:fixed-basis",
    ];

    /// Looks a script up in the built-in library. `sender:fixed` uses
    /// `x = 0101…` and `θ = 0011…` on `n` positions.
    pub fn from_name(name: &str, n: usize) -> Result<Self> {
        Ok(match name {
            "sender:honest" => Self::Sender(SenderScript::Honest),
            "sender:fixed" => {
                let x: Vec<bool> = (0..n).map(|i| i % 2 == 1).collect();
                let theta: Vec<bool> = (0..n).map(|i| (i / 2) % 2 == 1).collect();
                Self::Sender(SenderScript::Fixed {
                    x: Bits::from_bools(&x)?,
                    theta: Bits::from_bools(&theta)?,
                })
            }
            "sender:check-all" => Self::Sender(SenderScript::CheckAll),
            "sender:garbage" => Self::Sender(SenderScript::Garbage),
            "receiver:honest" => Self::Receiver(ReceiverScript::Honest),
            "receiver:inverted" => Self::Receiver(ReceiverScript::Inverted),
            "receiver:fixed-basis" => Self::Receiver(ReceiverScript::FixedBasis),
            _ => {
                return Err(Error::Input(format!(
                    "unknown OT script `{name}`; known: {:?}",
                    Self::NAMES
                )))
            }
        })
    }
}

pub(crate) enum AliceRole<'a> {
    Honest {
        s0: Bits,
        s1: Bits,
    },
    Script {
        script: &'a SenderScript,
        s0: Bits,
        s1: Bits,
    },
    /// Plays honest Alice, reads Bob's bases off his commitments and asks
    /// the ideal OT for the string his partition selects.
    Simulator {
        ot: &'a mut ObliviousTransfer,
    },
}

pub(crate) enum BobRole {
    Honest {
        c: bool,
    },
    Script {
        script: ReceiverScript,
        c: bool,
    },
    /// Keeps the qubits, measures a position only when Alice checks it,
    /// sends a random partition and decodes both strings at the end.
    Simulator,
}

pub(crate) struct EngineOut {
    pub sched: Scheduler,
    pub bob_value: Option<Bits>,
    pub reconstructed: Option<(Bits, Bits)>,
    pub extracted_choice: Option<bool>,
}

fn random_bits<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Result<Bits> {
    let mask = if len == 0 {
        0
    } else if len == MAX_BITS {
        rng.random::<u64>()
    } else {
        rng.random::<u64>() & ((1u64 << len) - 1)
    };
    Bits::new(len, mask)
}

/// ℓ XOR-inner-product bits of `y` restricted to `set`.
fn hash(keys: &[Bits], y: &Bits, set: &Bits) -> Result<Bits> {
    let bits: Vec<bool> = keys
        .iter()
        .map(|k| (k.mask() & y.mask() & set.mask()).count_ones() % 2 == 1)
        .collect();
    Bits::from_bools(&bits)
}

/// Membership mask of `I_i` given the partition bits (1 = in `I_1`).
fn part(partition: &Bits, i: bool) -> Result<Bits> {
    if i {
        Ok(*partition)
    } else {
        let full = if partition.len() == MAX_BITS {
            u64::MAX
        } else {
            (1u64 << partition.len()) - 1
        };
        Bits::new(partition.len(), !partition.mask() & full)
    }
}

/// Honest partition for choice `c`: matching positions go to `I_c`.
fn honest_partition(matching: &[bool], c: bool) -> Result<Bits> {
    let bits: Vec<bool> = matching.iter().map(|&m| m == c).collect();
    Bits::from_bools(&bits)
}

/// The choice whose honest partition agrees with `partition` on most
/// positions; ties go to 0.
fn infer_choice(matching: &[bool], partition: &Bits) -> bool {
    let agree = |c: bool| {
        (0..matching.len())
            .filter(|&j| partition.get(j) == (matching[j] == c))
            .count()
    };
    agree(true) > agree(false)
}

const F1CC: Party = Party::Functionality(FunctionalityKind::OneCc);

pub(crate) fn execute(
    n: usize,
    ell: usize,
    bc: &BcRealization,
    seed: u64,
    mut alice: AliceRole<'_>,
    bob: BobRole,
) -> Result<EngineOut> {
    if n == 0 || n > MAX_OT_QUBITS {
        return Err(Error::CapExceeded(format!("OT on {n} qubits, cap {MAX_OT_QUBITS}")));
    }
    let mut rng = seeded(child_seed(seed, 0));
    let mut sched = Scheduler::default();
    let aborted = |sched| {
        Ok(EngineOut {
            sched,
            bob_value: None,
            reconstructed: None,
            extracted_choice: None,
        })
    };

    let (x_a, theta_a) = match &alice {
        AliceRole::Script {
            script: SenderScript::Fixed { x, theta },
            ..
        } => {
            if x.len() != n || theta.len() != n {
                return Err(Error::Input(format!("fixed sender strings must have {n} bits")));
            }
            (*x, *theta)
        }
        _ => (random_bits(n, &mut rng)?, random_bits(n, &mut rng)?),
    };
    let mut reg = QubitRegister::bb84(&x_a, &theta_a)?;
    sched.send(Party::Alice, Party::Bob, "qubits", &n)?;

    let theta_b = match bob {
        BobRole::Script {
            script: ReceiverScript::FixedBasis,
            ..
        } => Bits::zeros(n),
        _ => random_bits(n, &mut rng)?,
    };
    let delayed = matches!(bob, BobRole::Simulator);
    let mut x_b = vec![false; n];
    if !delayed {
        for (i, x) in x_b.iter_mut().enumerate() {
            *x = reg.measure(i, theta_b.get(i), &mut rng)?;
        }
    }

    let mut t = vec![false; n];
    let mut revealed = vec![None; n];
    let mut extracted = Vec::with_capacity(n);
    for i in 0..n {
        let commit_seed = child_seed(seed, 1 + i as u64);
        let Some(mut handle) = commit_bit(bc, theta_b.get(i), Party::Bob, Party::Alice, &mut sched, commit_seed)?
        else {
            return aborted(sched);
        };
        extracted.push(handle.extract()?);
        t[i] = match &alice {
            AliceRole::Script {
                script: SenderScript::CheckAll,
                ..
            } => true,
            _ => rng.random_bool(0.5),
        };
        sched.send(Party::Alice, F1CC, "t", &t[i])?;
        if delayed && t[i] {
            sched.rush(i)?;
            x_b[i] = reg.measure(i, theta_b.get(i), &mut rng)?;
        }
        let mut cc = CutAndChoose::new(1)?;
        cc.input_c(t[i])?;
        let x = Bits::from_bools(&[x_b[i]])?;
        sched.send(Party::Bob, F1CC, "x", &x)?;
        cc.input_x(x)?;
        let d = cc.deliver()?;
        sched.send(F1CC, Party::Bob, "c", &d.to_x_player)?;
        sched.send(F1CC, Party::Alice, "w", &d.to_chooser)?;
        if let Output::Bits(w) = d.to_chooser {
            match handle.open(&mut sched, &mut rng)? {
                Some(basis) => revealed[i] = Some((basis, w.get(0))),
                None => {
                    sched.abort(Party::Alice, "basis opening rejected");
                    return aborted(sched);
                }
            }
        }
    }

    let alice_checks = !matches!(alice, AliceRole::Script { .. });
    let caught = (0..n).any(|i| matches!(revealed[i], Some((b, x)) if b == theta_a.get(i) && x != x_a.get(i)));
    if alice_checks && caught {
        sched.abort(Party::Alice, "check on a matching basis failed");
        return aborted(sched);
    }
    let checked = t.iter().filter(|&&b| b).count();
    if 5 * checked > 3 * n {
        sched.abort(Party::Bob, "more than 3n/5 positions checked");
        return aborted(sched);
    }

    let rest: Vec<usize> = (0..n).filter(|&i| !t[i]).collect();
    let theta_a_hat = theta_a.select(&rest);
    sched.send(Party::Alice, Party::Bob, "bases", &theta_a_hat)?;
    let matching: Vec<bool> = rest.iter().map(|&i| theta_a.get(i) == theta_b.get(i)).collect();
    let partition = match bob {
        BobRole::Honest { c } => honest_partition(&matching, c)?,
        BobRole::Script { script, c } => honest_partition(&matching, script.effective_choice(c))?,
        BobRole::Simulator => random_bits(rest.len(), &mut rng)?,
    };
    sched.send(Party::Bob, Party::Alice, "partition", &partition)?;

    let keys = (0..ell)
        .map(|_| random_bits(rest.len(), &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let x_a_hat = x_a.select(&rest);
    let mut extracted_choice = None;
    let (m0, m1) = match &mut alice {
        AliceRole::Script {
            script: SenderScript::Garbage,
            ..
        } => (random_bits(ell, &mut rng)?, random_bits(ell, &mut rng)?),
        AliceRole::Honest { s0, s1 } | AliceRole::Script { s0, s1, .. } => (
            s0.xor(&hash(&keys, &x_a_hat, &part(&partition, false)?)?),
            s1.xor(&hash(&keys, &x_a_hat, &part(&partition, true)?)?),
        ),
        AliceRole::Simulator { ot } => {
            let committed: Vec<bool> = rest.iter().map(|&i| theta_a.get(i) == extracted[i]).collect();
            let c = infer_choice(&committed, &partition);
            extracted_choice = Some(c);
            ot.input_receiver(c)?;
            let Output::Bits(s) = ot.deliver()? else {
                return Err(Error::Protocol("ideal OT delivered no string".into()));
            };
            let chosen = s.xor(&hash(&keys, &x_a_hat, &part(&partition, c)?)?);
            let other = random_bits(ell, &mut rng)?;
            if c {
                (other, chosen)
            } else {
                (chosen, other)
            }
        }
    };
    sched.send(Party::Alice, Party::Bob, "masked", &(&keys, m0, m1))?;

    let decode = |x_hat: &Bits, i: bool| -> Result<Bits> {
        let m = if i { m1 } else { m0 };
        Ok(m.xor(&hash(&keys, x_hat, &part(&partition, i)?)?))
    };
    let mut out = EngineOut {
        sched,
        bob_value: None,
        reconstructed: None,
        extracted_choice,
    };
    match bob {
        BobRole::Honest { c } => out.bob_value = Some(decode(&x_b_hat(&x_b, &rest)?, c)?),
        BobRole::Script { script, c } => {
            out.bob_value = Some(decode(&x_b_hat(&x_b, &rest)?, script.effective_choice(c))?)
        }
        BobRole::Simulator => {
            for &i in &rest {
                x_b[i] = reg.measure(i, theta_a.get(i), &mut rng)?;
            }
            let x_hat = x_b_hat(&x_b, &rest)?;
            out.reconstructed = Some((decode(&x_hat, false)?, decode(&x_hat, true)?));
        }
    }
    Ok(out)
}

fn x_b_hat(x_b: &[bool], rest: &[usize]) -> Result<Bits> {
    Bits::from_bools(&rest.iter().map(|&i| x_b[i]).collect::<Vec<_>>())
}

/// Runs the protocol with honest parties except for the optional script.
/// Alice has no output; Bob outputs his string or abort.
pub fn run_ot_protocol(
    inputs: &OtInputs,
    n: usize,
    adversary: Option<&OtAdversary>,
    bc: &BcRealization,
    seed: u64,
) -> Result<ExecutionTranscript> {
    let ell = inputs.validate()?;
    let (s0, s1, c) = (inputs.s0, inputs.s1, inputs.c);
    let (alice, bob) = match adversary {
        None => (AliceRole::Honest { s0, s1 }, BobRole::Honest { c }),
        Some(OtAdversary::Sender(script)) => (AliceRole::Script { script, s0, s1 }, BobRole::Honest { c }),
        Some(OtAdversary::Receiver(script)) => (AliceRole::Honest { s0, s1 }, BobRole::Script { script: *script, c }),
    };
    let out = execute(n, ell, bc, seed, alice, bob)?;
    let bob = Some(out.bob_value.map_or(Output::Abort, Output::Bits));
    Ok(out.sched.finish("ot", seed, None, bob))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(c: bool) -> OtInputs {
        OtInputs {
            s0: "0110".parse().unwrap(),
            s1: "1100".parse().unwrap(),
            c,
        }
    }

    #[test]
    fn honest_bob_gets_chosen_string() {
        let mut completed = 0;
        for seed in 0..60 {
            for c in [false, true] {
                let t = run_ot_protocol(&inputs(c), 8, None, &BcRealization::Ideal, seed).unwrap();
                if !t.aborted() {
                    completed += 1;
                    assert_eq!(t.bob, Some(Output::Bits(*inputs(c).chosen())));
                }
                assert!(t.aborts.iter().all(|a| a.party == Party::Bob));
            }
        }
        assert!(completed > 40);
    }

    #[test]
    fn partition_helpers() {
        let m = [true, false, true];
        assert_eq!(honest_partition(&m, true).unwrap().to_string(), "101");
        assert_eq!(honest_partition(&m, false).unwrap().to_string(), "010");
        for c in [false, true] {
            assert_eq!(infer_choice(&m, &honest_partition(&m, c).unwrap()), c);
        }
        let p: Bits = "101".parse().unwrap();
        assert_eq!(part(&p, false).unwrap().to_string(), "010");
        let keys = ["111".parse().unwrap(), "100".parse().unwrap()];
        assert_eq!(hash(&keys, &"111".parse().unwrap(), &p).unwrap().to_string(), "01");
    }

    #[test]
    fn script_names() {
        for name in OtAdversary::NAMES {
            OtAdversary::from_name(name, 6).unwrap();
        }
        assert!(OtAdversary::from_name("sender:evil", 6).is_err());
        assert!(run_ot_protocol(&inputs(false), 11, None, &BcRealization::Ideal, 0).is_err());
    }

    #[test]
    fn check_all_always_aborts() {
        let adv = OtAdversary::Sender(SenderScript::CheckAll);
        for seed in 0..5 {
            let t = run_ot_protocol(&inputs(true), 6, Some(&adv), &BcRealization::Ideal, seed).unwrap();
            assert_eq!(t.bob, Some(Output::Abort));
        }
    }
}
