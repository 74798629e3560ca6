//! Versioned experiment reports. Every asserted inequality keeps both sides
//! and its slack so a failing run can be read without re-running it.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// The check could not run, e.g. its configuration exceeds a cap.
    Error,
}

/// Where the compared-against value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// A constant stated in the literature.
    Reference,
    /// A value recomputed independently of the code under test.
    Oracle,
    /// An inequality that must hold on every instance.
    Invariant,
}

/// `lhs ≤ rhs`, with `slack = rhs − lhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl Inequality {
    pub fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        let (lhs, rhs) = (finite(lhs), finite(rhs));
        Self {
            name: name.into(),
            lhs,
            rhs,
            slack: rhs - lhs,
            pass: lhs <= rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub criterion: Option<u32>,
    pub source: Source,
    pub inputs: Value,
    pub inputs_digest: String,
    pub values: BTreeMap<String, f64>,
    pub inequalities: Vec<Inequality>,
    pub conditions: Vec<Condition>,
    /// Module-specific report, when there is one.
    pub details: Value,
    pub status: Status,
    pub error: Option<String>,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub suite: String,
    pub seed: u64,
    pub config: Value,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn new(suite: &str, seed: u64, config: Value, checks: Vec<CheckRecord>) -> Self {
        let pass = checks.iter().all(|c| c.status == Status::Pass);
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.into(),
            suite: suite.into(),
            seed,
            config,
            checks,
            pass,
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// 0 when everything passed, 1 on any failed assertion, 2 when the only
    /// problems are checks that could not run.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.status == Status::Fail) {
            1
        } else if self.checks.iter().any(|c| c.status == Status::Error) {
            2
        } else {
            0
        }
    }
}

/// JSON cannot carry NaN or infinities; clamp them so reports round-trip.
pub fn finite(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(f64::MIN, f64::MAX)
    }
}

/// FNV-1a over the canonical JSON of the inputs.
pub fn digest(inputs: &Value) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in inputs.to_string().bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

/// What a check body hands back before timing and status are attached.
#[derive(Debug, Default)]
pub struct Outcome {
    pub values: BTreeMap<String, f64>,
    pub inequalities: Vec<Inequality>,
    pub conditions: Vec<Condition>,
    pub details: Value,
}

impl Outcome {
    pub fn value(&mut self, name: &str, v: f64) -> &mut Self {
        self.values.insert(name.into(), finite(v));
        self
    }

    pub fn leq(&mut self, name: &str, lhs: f64, rhs: f64) -> &mut Self {
        self.inequalities.push(Inequality::new(name, lhs, rhs));
        self
    }

    pub fn holds(&mut self, name: &str, holds: bool) -> &mut Self {
        self.conditions.push(Condition {
            name: name.into(),
            holds,
        });
        self
    }

    pub fn details<T: Serialize>(&mut self, value: &T) -> &mut Self {
        // Non-finite floats become null here, which parses back unchanged.
        self.details = serde_json::to_value(value).unwrap_or(Value::Null);
        self
    }
}

/// Runs `body`, timing it; an `Err` becomes an error record.
pub fn run_check<E: std::fmt::Display>(
    name: &str,
    criterion: Option<u32>,
    source: Source,
    inputs: Value,
    body: impl FnOnce() -> Result<Outcome, E>,
) -> CheckRecord {
    let start = Instant::now();
    let result = body();
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let inputs_digest = digest(&inputs);
    let mut record = CheckRecord {
        name: name.into(),
        criterion,
        source,
        inputs,
        inputs_digest,
        values: BTreeMap::new(),
        inequalities: Vec::new(),
        conditions: Vec::new(),
        details: Value::Null,
        status: Status::Error,
        error: None,
        runtime_ms,
    };
    match result {
        Ok(o) => {
            let ok = o.inequalities.iter().all(|i| i.pass) && o.conditions.iter().all(|c| c.holds);
            record.status = if ok { Status::Pass } else { Status::Fail };
            record.values = o.values;
            record.inequalities = o.inequalities;
            record.conditions = o.conditions;
            record.details = o.details;
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> ExperimentReport {
        let a = run_check("a", Some(1), Source::Reference, json!({"x": 1}), || {
            let mut o = Outcome::default();
            o.value("v", 0.1 + 0.2).leq("le", 1.0 / 3.0, 0.5).holds("h", true);
            Ok::<_, String>(o)
        });
        let b = run_check("b", None, Source::Invariant, json!(null), || {
            Err::<Outcome, _>("cap exceeded")
        });
        ExperimentReport::new("demo", 7, json!({"k": [1, 2]}), vec![a, b])
    }

    #[test]
    fn statuses_and_exit_codes() {
        let r = sample();
        assert_eq!(r.checks[0].status, Status::Pass);
        assert_eq!(r.checks[1].status, Status::Error);
        assert_eq!(r.exit_code(), 2);
        assert!(!r.pass);
        let fail = run_check("c", None, Source::Oracle, json!({}), || {
            let mut o = Outcome::default();
            o.leq("bad", 2.0, 1.0);
            Ok::<_, String>(o)
        });
        assert_eq!(fail.inequalities[0].slack, -1.0);
        assert_eq!(ExperimentReport::new("x", 0, json!({}), vec![fail]).exit_code(), 1);
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let mut r = sample();
        r.checks[0].values.insert("tiny".into(), 1e-300 / 3.0);
        r.checks[0].values.insert("inf".into(), finite(f64::INFINITY));
        let text = r.to_json().unwrap();
        let back = ExperimentReport::from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(digest(&json!({"a": 1})), digest(&json!({"a": 1})));
        assert_ne!(digest(&json!({"a": 1})), digest(&json!({"a": 2})));
        assert_eq!(digest(&json!(null)).len(), 16);
    }
}
