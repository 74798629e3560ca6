//! The two-bit cut-and-choose protocol built from one commitment and one
//! 1CC call, with sender scripts.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::commit::{commit_bit, BcRealization};
use super::ideal::{CutAndChoose, FunctionalityKind, Output};
use super::transcript::{ExecutionTranscript, Party, Scheduler};
use crate::coding::Bits;
use crate::error::{Error, Result};
use crate::quantum::random::{child_seed, seeded};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoCcInputs {
    pub s0: bool,
    pub s1: bool,
    pub c: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoCcSenderScript {
    #[default]
    Honest,
    /// Never opens the commitment.
    RefuseOpen,
    /// Tries to open the commitment to `¬s0`.
    Equivocate,
}

impl TwoCcSenderScript {
    pub const NAMES: [&'static str; 3] = ["honest", "refuse-open", "equivocate"];
}

impl FromStr for TwoCcSenderScript {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "honest" => Ok(Self::Honest),
            "refuse-open" => Ok(Self::RefuseOpen),
            "equivocate" => Ok(Self::Equivocate),
            _ => Err(Error::Input(format!(
                "unknown 2CC script `{s}`; known: {:?}",
                Self::NAMES
            ))),
        }
    }
}

const F1CC: Party = Party::Functionality(FunctionalityKind::OneCc);

/// Alice commits to `s0`, feeds `s1` to 1CC against Bob's `c`, and opens
/// when told `c = 1`. Alice outputs `c`; Bob outputs `s0 s1`, `⊥` or abort.
pub fn run_2cc_protocol(
    inputs: &TwoCcInputs,
    script: Option<TwoCcSenderScript>,
    bc: &BcRealization,
    seed: u64,
) -> Result<ExecutionTranscript> {
    let script = script.unwrap_or_default();
    let mut rng = seeded(child_seed(seed, 0));
    let mut sched = Scheduler::default();
    let Some(mut handle) = commit_bit(bc, inputs.s0, Party::Alice, Party::Bob, &mut sched, child_seed(seed, 1))? else {
        return Ok(sched.finish("2cc", seed, Some(Output::Abort), Some(Output::Abort)));
    };

    let mut cc = CutAndChoose::new(1)?;
    let x = Bits::from_bools(&[inputs.s1])?;
    sched.send(Party::Alice, F1CC, "x", &x)?;
    cc.input_x(x)?;
    sched.send(Party::Bob, F1CC, "c", &inputs.c)?;
    cc.input_c(inputs.c)?;
    let d = cc.deliver()?;
    sched.send(F1CC, Party::Alice, "c", &d.to_x_player)?;
    sched.send(F1CC, Party::Bob, "w", &d.to_chooser)?;

    let bob = match d.to_chooser {
        Output::Bottom => Output::Bottom,
        Output::Bits(w) => {
            let opened = match script {
                TwoCcSenderScript::Honest => handle.open(&mut sched, &mut rng)?,
                TwoCcSenderScript::Equivocate => handle.open_as(!inputs.s0, &mut sched, &mut rng)?,
                TwoCcSenderScript::RefuseOpen => {
                    sched.send(Party::Alice, Party::Bob, "refuse", &())?;
                    None
                }
            };
            match opened {
                Some(s0) => Output::Bits(Bits::from_bools(&[s0, w.get(0)])?),
                None => {
                    sched.abort(Party::Bob, "commitment not opened");
                    Output::Abort
                }
            }
        }
        other => return Err(Error::Protocol(format!("1CC delivered {other:?}"))),
    };
    Ok(sched.finish("2cc", seed, Some(Output::Bit(d.to_x_player)), Some(bob)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_inputs() -> impl Iterator<Item = TwoCcInputs> {
        (0..8u8).map(|k| TwoCcInputs {
            s0: k & 1 != 0,
            s1: k & 2 != 0,
            c: k & 4 != 0,
        })
    }

    fn pair(s0: bool, s1: bool) -> Output {
        Output::Bits(Bits::from_bools(&[s0, s1]).unwrap())
    }

    #[test]
    fn honest_outputs_follow_table() {
        for i in all_inputs() {
            let t = run_2cc_protocol(&i, None, &BcRealization::Ideal, 4).unwrap();
            assert_eq!(t.alice, Some(Output::Bit(i.c)));
            let expected = if i.c { pair(i.s0, i.s1) } else { Output::Bottom };
            assert_eq!(t.bob, Some(expected));
            assert!(!t.aborted());
        }
    }

    #[test]
    fn refusal_aborts_only_when_asked_to_open() {
        for i in all_inputs() {
            for script in [TwoCcSenderScript::RefuseOpen, TwoCcSenderScript::Equivocate] {
                let t = run_2cc_protocol(&i, Some(script), &BcRealization::Ideal, 1).unwrap();
                assert_eq!(t.bob, Some(if i.c { Output::Abort } else { Output::Bottom }));
                assert_eq!(t.aborted(), i.c);
            }
        }
    }

    #[test]
    fn example_runs() {
        let t = run_2cc_protocol(
            &TwoCcInputs {
                s0: false,
                s1: true,
                c: true,
            },
            None,
            &BcRealization::Ideal,
            0,
        )
        .unwrap();
        assert_eq!(t.bob, Some(Output::Bits("01".parse().unwrap())));
        let t = run_2cc_protocol(
            &TwoCcInputs {
                s0: false,
                s1: true,
                c: false,
            },
            None,
            &BcRealization::Ideal,
            0,
        )
        .unwrap();
        assert_eq!((t.alice, t.bob), (Some(Output::Bit(false)), Some(Output::Bottom)));
        assert!("bogus".parse::<TwoCcSenderScript>().is_err());
    }
}
