//! Ideal functionalities as explicit state machines. Every transition that
//! the functionality does not allow is a [`Error::Protocol`].

use serde::{Deserialize, Serialize};

use crate::coding::Bits;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FunctionalityKind {
    #[serde(rename = "1CC")]
    OneCc,
    #[serde(rename = "2CC")]
    TwoCc,
    #[serde(rename = "BC")]
    Bc,
    #[serde(rename = "2CC'")]
    TwoCcPrime,
    #[serde(rename = "OT")]
    Ot,
}

/// A value delivered on an output port.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Output {
    Bottom,
    Abort,
    Committed,
    Bit(bool),
    Bits(Bits),
}

impl Output {
    pub fn label(&self) -> String {
        match self {
            Output::Bottom => "⊥".into(),
            Output::Abort => "abort".into(),
            Output::Committed => "committed".into(),
            Output::Bit(b) => u8::from(*b).to_string(),
            Output::Bits(b) => b.to_string(),
        }
    }
}

fn twice(what: &str) -> Error {
    Error::Protocol(format!("{what} was already provided"))
}

/// Cut-and-choose on `width`-bit strings: the chooser sees `x` iff `c = 1`,
/// and the x-player learns `c`.
#[derive(Clone, Debug)]
pub struct CutAndChoose {
    width: usize,
    x: Option<Bits>,
    c: Option<bool>,
    delivered: bool,
}

/// Port values once both inputs are in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcDelivery {
    pub to_x_player: bool,
    pub to_chooser: Output,
}

impl CutAndChoose {
    pub fn new(width: usize) -> Result<Self> {
        if width == 0 || width > 2 {
            return Err(Error::Input(format!("cut-and-choose on {width} bits")));
        }
        Ok(Self {
            width,
            x: None,
            c: None,
            delivered: false,
        })
    }

    pub fn kind(&self) -> FunctionalityKind {
        if self.width == 1 {
            FunctionalityKind::OneCc
        } else {
            FunctionalityKind::TwoCc
        }
    }

    pub fn input_x(&mut self, x: Bits) -> Result<()> {
        if x.len() != self.width {
            return Err(Error::Input(format!(
                "x has {} bits, functionality takes {}",
                x.len(),
                self.width
            )));
        }
        if self.x.replace(x).is_some() {
            return Err(twice("x"));
        }
        Ok(())
    }

    pub fn input_c(&mut self, c: bool) -> Result<()> {
        if self.c.replace(c).is_some() {
            return Err(twice("c"));
        }
        Ok(())
    }

    pub fn deliver(&mut self) -> Result<CcDelivery> {
        let (Some(x), Some(c)) = (self.x, self.c) else {
            return Err(Error::Protocol("cut-and-choose is still waiting for an input".into()));
        };
        if std::mem::replace(&mut self.delivered, true) {
            return Err(Error::Protocol("cut-and-choose already delivered".into()));
        }
        let w = if c { Output::Bits(x) } else { Output::Bottom };
        Ok(CcDelivery {
            to_x_player: c,
            to_chooser: w,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BcState {
    Idle,
    Committed(bool),
    Closed,
}

/// Ideal bit commitment with an explicit abort port for the committer.
#[derive(Clone, Debug)]
pub struct BitCommitment {
    state: BcState,
}

impl Default for BitCommitment {
    fn default() -> Self {
        Self { state: BcState::Idle }
    }
}

impl BitCommitment {
    pub fn commit(&mut self, b: bool) -> Result<Output> {
        if self.state != BcState::Idle {
            return Err(Error::Protocol("commit after commit".into()));
        }
        self.state = BcState::Committed(b);
        Ok(Output::Committed)
    }

    pub fn open(&mut self) -> Result<Output> {
        match self.state {
            BcState::Committed(b) => {
                self.state = BcState::Closed;
                Ok(Output::Bit(b))
            }
            _ => Err(Error::Protocol("open without a pending commitment".into())),
        }
    }

    pub fn abort(&mut self) -> Result<Output> {
        match self.state {
            BcState::Committed(_) => {
                self.state = BcState::Closed;
                Ok(Output::Abort)
            }
            _ => Err(Error::Protocol("abort without a pending commitment".into())),
        }
    }

    /// What the committer put in; visible only to a simulator.
    pub fn committed_bit(&self) -> Option<bool> {
        match self.state {
            BcState::Committed(b) => Some(b),
            _ => None,
        }
    }
}

/// The sender's answer once 2CC′ has told it `c = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Continue,
    Abort,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TwoCcState {
    Waiting,
    AwaitingDecision,
    Done,
}

/// 2CC′: cut-and-choose on two bits where the sender may abort after
/// learning `c = 1`.
#[derive(Clone, Debug)]
pub struct TwoCcPrime {
    s: Option<(bool, bool)>,
    c: Option<bool>,
    state: TwoCcState,
}

impl Default for TwoCcPrime {
    fn default() -> Self {
        Self {
            s: None,
            c: None,
            state: TwoCcState::Waiting,
        }
    }
}

impl TwoCcPrime {
    pub fn input_sender(&mut self, s0: bool, s1: bool) -> Result<()> {
        if self.s.replace((s0, s1)).is_some() {
            return Err(twice("(s0, s1)"));
        }
        Ok(())
    }

    pub fn input_receiver(&mut self, c: bool) -> Result<()> {
        if self.c.replace(c).is_some() {
            return Err(twice("c"));
        }
        Ok(())
    }

    /// Sends `c` to the sender. With `c = 0` the receiver's output `⊥` comes
    /// back too; with `c = 1` the functionality waits for [`Self::decide`].
    pub fn fire(&mut self) -> Result<(bool, Option<Output>)> {
        let (Some(_), Some(c), TwoCcState::Waiting) = (self.s, self.c, self.state) else {
            return Err(Error::Protocol("2CC' cannot fire in this state".into()));
        };
        if c {
            self.state = TwoCcState::AwaitingDecision;
            Ok((true, None))
        } else {
            self.state = TwoCcState::Done;
            Ok((false, Some(Output::Bottom)))
        }
    }

    pub fn decide(&mut self, decision: Decision) -> Result<Output> {
        if self.state != TwoCcState::AwaitingDecision {
            return Err(Error::Protocol("2CC' is not waiting for a decision".into()));
        }
        self.state = TwoCcState::Done;
        let (s0, s1) = self.s.expect("inputs checked in fire");
        Ok(match decision {
            Decision::Continue => Output::Bits(Bits::from_bools(&[s0, s1])?),
            Decision::Abort => Output::Abort,
        })
    }
}

/// One-out-of-two OT on ℓ-bit strings. Only the corrupted sender's
/// simulator may use the abort port.
#[derive(Clone, Debug, Default)]
pub struct ObliviousTransfer {
    s: Option<(Bits, Bits)>,
    c: Option<bool>,
    done: bool,
}

impl ObliviousTransfer {
    pub fn input_sender(&mut self, s0: Bits, s1: Bits) -> Result<()> {
        if s0.len() != s1.len() {
            return Err(Error::Input("OT strings differ in length".into()));
        }
        if self.s.replace((s0, s1)).is_some() {
            return Err(twice("(s0, s1)"));
        }
        Ok(())
    }

    pub fn input_receiver(&mut self, c: bool) -> Result<()> {
        if self.c.replace(c).is_some() {
            return Err(twice("c"));
        }
        Ok(())
    }

    pub fn deliver(&mut self) -> Result<Output> {
        let (Some((s0, s1)), Some(c)) = (self.s, self.c) else {
            return Err(Error::Protocol("OT is still waiting for an input".into()));
        };
        if std::mem::replace(&mut self.done, true) {
            return Err(Error::Protocol("OT already delivered".into()));
        }
        Ok(Output::Bits(if c { s1 } else { s0 }))
    }

    pub fn abort(&mut self) -> Result<Output> {
        if std::mem::replace(&mut self.done, true) {
            return Err(Error::Protocol("OT already delivered".into()));
        }
        Ok(Output::Abort)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn one_cc_table_is_exhaustive() {
        for x in [false, true] {
            for c in [false, true] {
                let mut f = CutAndChoose::new(1).unwrap();
                f.input_c(c).unwrap();
                f.input_x(Bits::from_bools(&[x]).unwrap()).unwrap();
                let d = f.deliver().unwrap();
                assert_eq!(d.to_x_player, c);
                let expected = if c {
                    Output::Bits(Bits::from_bools(&[x]).unwrap())
                } else {
                    Output::Bottom
                };
                assert_eq!(d.to_chooser, expected);
                assert!(f.deliver().is_err());
            }
        }
    }

    #[test]
    fn cut_and_choose_rejects_bad_use() {
        let mut f = CutAndChoose::new(1).unwrap();
        assert!(f.deliver().is_err());
        assert!(f.input_x(b("01")).is_err());
        f.input_c(true).unwrap();
        assert!(f.input_c(false).is_err());
        assert!(CutAndChoose::new(3).is_err());
        assert_eq!(CutAndChoose::new(2).unwrap().kind(), FunctionalityKind::TwoCc);
    }

    #[test]
    fn commitment_lifecycle() {
        let mut bc = BitCommitment::default();
        assert!(bc.open().is_err());
        assert_eq!(bc.commit(true).unwrap(), Output::Committed);
        assert!(bc.commit(false).is_err());
        assert_eq!(bc.committed_bit(), Some(true));
        assert_eq!(bc.open().unwrap(), Output::Bit(true));
        assert!(bc.abort().is_err());
        let mut bc = BitCommitment::default();
        bc.commit(false).unwrap();
        assert_eq!(bc.abort().unwrap(), Output::Abort);
    }

    #[test]
    fn two_cc_prime_branches() {
        let mut f = TwoCcPrime::default();
        f.input_sender(false, true).unwrap();
        f.input_receiver(false).unwrap();
        assert_eq!(f.fire().unwrap(), (false, Some(Output::Bottom)));
        assert!(f.decide(Decision::Continue).is_err());

        for (decision, out) in [
            (Decision::Continue, Output::Bits(b("01"))),
            (Decision::Abort, Output::Abort),
        ] {
            let mut f = TwoCcPrime::default();
            f.input_receiver(true).unwrap();
            assert!(f.fire().is_err());
            f.input_sender(false, true).unwrap();
            assert_eq!(f.fire().unwrap(), (true, None));
            assert_eq!(f.decide(decision).unwrap(), out);
        }
    }

    #[test]
    fn ot_delivers_chosen_string() {
        for c in [false, true] {
            let mut f = ObliviousTransfer::default();
            f.input_sender(b("0011"), b("1010")).unwrap();
            f.input_receiver(c).unwrap();
            assert_eq!(
                f.deliver().unwrap(),
                Output::Bits(if c { b("1010") } else { b("0011") })
            );
            assert!(f.abort().is_err());
        }
        assert!(ObliviousTransfer::default().input_sender(b("0"), b("01")).is_err());
    }

    #[test]
    fn outputs_serialize_compactly() {
        assert_eq!(
            serde_json::to_string(&Output::Bits(b("01"))).unwrap(),
            r#"{"bits":"01"}"#
        );
        assert_eq!(serde_json::to_string(&Output::Bottom).unwrap(), r#""bottom""#);
        assert_eq!(
            serde_json::to_string(&FunctionalityKind::TwoCcPrime).unwrap(),
            r#""2CC'""#
        );
    }
}
