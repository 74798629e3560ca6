//! Append-only execution logs and the turn scheduler that writes them.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::ideal::{FunctionalityKind, Output};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Party {
    Alice,
    Bob,
    Simulator,
    Functionality(FunctionalityKind),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub turn: usize,
    pub from: Party,
    pub to: Party,
    pub label: String,
    pub payload: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbortMarker {
    pub turn: usize,
    pub party: Party,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecutionTranscript {
    pub protocol: String,
    pub seed: u64,
    pub events: Vec<Event>,
    pub aborts: Vec<AbortMarker>,
    pub alice: Option<Output>,
    pub bob: Option<Output>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
enum Line {
    Header { protocol: String, seed: u64 },
    Event(Event),
    Abort(AbortMarker),
    Outputs { alice: Option<Output>, bob: Option<Output> },
}

impl ExecutionTranscript {
    pub fn aborted(&self) -> bool {
        !self.aborts.is_empty()
    }

    /// Header, events, abort markers, outputs; one JSON object per line.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        let mut push = |line: &Line| -> Result<()> {
            out.push_str(&serde_json::to_string(line)?);
            out.push('\n');
            Ok(())
        };
        push(&Line::Header {
            protocol: self.protocol.clone(),
            seed: self.seed,
        })?;
        for e in &self.events {
            push(&Line::Event(e.clone()))?;
        }
        for a in &self.aborts {
            push(&Line::Abort(a.clone()))?;
        }
        push(&Line::Outputs {
            alice: self.alice.clone(),
            bob: self.bob.clone(),
        })?;
        Ok(out)
    }

    pub fn from_json_lines(text: &str) -> Result<Self> {
        let mut header = None;
        let mut outputs = None;
        let (mut events, mut aborts) = (Vec::new(), Vec::new());
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            match serde_json::from_str::<Line>(line)? {
                Line::Header { protocol, seed } => header = Some((protocol, seed)),
                Line::Event(e) => events.push(e),
                Line::Abort(a) => aborts.push(a),
                Line::Outputs { alice, bob } => outputs = Some((alice, bob)),
            }
        }
        let ((protocol, seed), (alice, bob)) = header
            .zip(outputs)
            .ok_or_else(|| Error::Input("transcript needs a header and an outputs line".into()))?;
        Ok(Self {
            protocol,
            seed,
            events,
            aborts,
            alice,
            bob,
        })
    }
}

/// Synchronous alternating turns: the turn counter advances whenever the
/// sender changes. Functionality deliveries stay in the caller's turn.
#[derive(Debug, Default)]
pub struct Scheduler {
    turn: usize,
    last: Option<Party>,
    events: Vec<Event>,
    aborts: Vec<AbortMarker>,
}

impl Scheduler {
    pub fn send<T: Serialize>(&mut self, from: Party, to: Party, label: &str, payload: &T) -> Result<()> {
        let speaker = !matches!(from, Party::Functionality(_));
        if speaker && self.last.is_some_and(|p| p != from) {
            self.turn += 1;
        }
        if speaker {
            self.last = Some(from);
        }
        let payload = serde_json::to_value(payload)?;
        self.events.push(Event {
            turn: self.turn,
            from,
            to,
            label: label.into(),
            payload,
        });
        Ok(())
    }

    /// Rushing hook: the simulator acts on the adversary's message of this
    /// turn before supplying the honest party's.
    pub fn rush(&mut self, position: usize) -> Result<()> {
        self.events.push(Event {
            turn: self.turn,
            from: Party::Simulator,
            to: Party::Simulator,
            label: "rush".into(),
            payload: serde_json::to_value(position)?,
        });
        Ok(())
    }

    pub fn abort(&mut self, party: Party, reason: &str) {
        self.aborts.push(AbortMarker {
            turn: self.turn,
            party,
            reason: reason.into(),
        });
    }

    pub fn aborted(&self) -> bool {
        !self.aborts.is_empty()
    }

    pub fn finish(self, protocol: &str, seed: u64, alice: Option<Output>, bob: Option<Output>) -> ExecutionTranscript {
        ExecutionTranscript {
            protocol: protocol.into(),
            seed,
            events: self.events,
            aborts: self.aborts,
            alice,
            bob,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn turns_alternate_with_speaker() {
        let mut s = Scheduler::default();
        s.send(Party::Alice, Party::Bob, "a", &1).unwrap();
        s.send(Party::Alice, Party::Bob, "b", &2).unwrap();
        s.send(Party::Functionality(FunctionalityKind::Bc), Party::Bob, "c", &())
            .unwrap();
        s.send(Party::Bob, Party::Alice, "d", &"x").unwrap();
        s.rush(3).unwrap();
        s.abort(Party::Bob, "test");
        let t = s.finish("demo", 9, None, Some(Output::Abort));
        let turns: Vec<usize> = t.events.iter().map(|e| e.turn).collect();
        assert_eq!(turns, [0, 0, 0, 1, 1]);
        assert_eq!(t.aborts[0].turn, 1);
    }

    #[test]
    fn json_lines_round_trip() {
        let mut s = Scheduler::default();
        s.send(Party::Alice, Party::Functionality(FunctionalityKind::OneCc), "x", &"1")
            .unwrap();
        s.send(Party::Bob, Party::Alice, "choice", &true).unwrap();
        let t = s.finish("2cc", 3, Some(Output::Bit(true)), Some(Output::Bottom));
        let text = t.to_json_lines().unwrap();
        assert_eq!(text.lines().count(), 4);
        let back = ExecutionTranscript::from_json_lines(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_json_lines().unwrap(), text);
        assert!(ExecutionTranscript::from_json_lines(text.lines().next().unwrap()).is_err());
    }
}
