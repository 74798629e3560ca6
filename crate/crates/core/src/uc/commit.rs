//! Commitments inside the composed protocols: the ideal functionality or
//! the 1CC-based scheme run honestly on the committer's side.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ideal::{BitCommitment, FunctionalityKind};
use super::transcript::{Party, Scheduler};
use crate::coding::Bits;
use crate::error::Result;
use crate::protocols::{extractor, onecc_commit, onecc_reveal, OneCcParams, OneCcRun};

/// Parameters used for commitments realized through 1CC unless a scenario
/// says otherwise. `2qN = 12` keeps honest commit aborts near 0.3%.
pub const DEFAULT_BC_PARAMS: OneCcParams = OneCcParams {
    n: 24,
    q: 0.25,
    tau: 0.1,
    r: 0.5,
    delta: 0.1,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BcRealization {
    Ideal,
    OneCc { params: OneCcParams },
}

impl Default for BcRealization {
    fn default() -> Self {
        BcRealization::OneCc {
            params: DEFAULT_BC_PARAMS,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum CommitHandle {
    Ideal {
        bc: BitCommitment,
        committer: Party,
        verifier: Party,
    },
    OneCc {
        run: Box<OneCcRun>,
        committer: Party,
        verifier: Party,
    },
}

#[derive(Serialize)]
struct HashMessage<'a> {
    g: &'a Bits,
    s: &'a Bits,
    w: bool,
}

/// Runs the commit phase. `None` means the committer aborted and the marker
/// is already in the log.
pub(crate) fn commit_bit(
    bc: &BcRealization,
    b: bool,
    committer: Party,
    verifier: Party,
    sched: &mut Scheduler,
    seed: u64,
) -> Result<Option<CommitHandle>> {
    match bc {
        BcRealization::Ideal => {
            let f = Party::Functionality(FunctionalityKind::Bc);
            let mut bc = BitCommitment::default();
            sched.send(committer, f, "commit", &b)?;
            let out = bc.commit(b)?;
            sched.send(f, verifier, "receipt", &out)?;
            Ok(Some(CommitHandle::Ideal {
                bc,
                committer,
                verifier,
            }))
        }
        BcRealization::OneCc { params } => {
            let run = onecc_commit(params, b, seed)?;
            sched.send(committer, verifier, "qubits", &params.n)?;
            sched.send(
                verifier,
                Party::Functionality(FunctionalityKind::OneCc),
                "checks",
                &run.view.checked,
            )?;
            if run.alice_aborted {
                sched.abort(committer, "commit: check count above 2qN");
                return Ok(None);
            }
            sched.send(verifier, committer, "code", &run.view.code)?;
            let v = &run.view;
            sched.send(
                committer,
                verifier,
                "hash",
                &HashMessage {
                    g: &v.g,
                    s: &v.s,
                    w: v.w,
                },
            )?;
            Ok(Some(CommitHandle::OneCc {
                run: Box::new(run),
                committer,
                verifier,
            }))
        }
    }
}

impl CommitHandle {
    /// The bit a simulator reads off: the ideal input, or the extractor
    /// applied to the committer's 1CC inputs and final message.
    pub fn extract(&self) -> Result<bool> {
        match self {
            CommitHandle::Ideal { bc, .. } => Ok(bc.committed_bit().expect("pending commitment")),
            CommitHandle::OneCc { run, .. } => extractor(&run.view),
        }
    }

    /// Honest opening. Returns the bit the verifier accepts, or `None`.
    pub fn open<R: Rng + ?Sized>(&mut self, sched: &mut Scheduler, rng: &mut R) -> Result<Option<bool>> {
        let b = match self {
            CommitHandle::Ideal { bc, .. } => bc.committed_bit().expect("pending commitment"),
            CommitHandle::OneCc { run, .. } => run.b,
        };
        self.open_as(b, sched, rng)
    }

    /// Opening to `target`. Against the ideal functionality a different bit
    /// cannot be opened, so the committer aborts instead. Against the 1CC
    /// scheme the committer claims the syndrome-consistent string nearest to
    /// its prepared bases that hashes to `target`.
    pub fn open_as<R: Rng + ?Sized>(
        &mut self,
        target: bool,
        sched: &mut Scheduler,
        rng: &mut R,
    ) -> Result<Option<bool>> {
        match self {
            CommitHandle::Ideal {
                bc,
                committer,
                verifier,
            } => {
                let f = Party::Functionality(FunctionalityKind::Bc);
                if bc.committed_bit() == Some(target) {
                    sched.send(*committer, f, "open", &())?;
                    let out = bc.open()?;
                    sched.send(f, *verifier, "opened", &out)?;
                    Ok(Some(target))
                } else {
                    sched.send(*committer, f, "abort", &())?;
                    let out = bc.abort()?;
                    sched.send(f, *verifier, "opened", &out)?;
                    Ok(None)
                }
            }
            CommitHandle::OneCc {
                run,
                committer,
                verifier,
            } => {
                let view = &run.view;
                let prepared = view.theta.select(&view.unchecked());
                let claim = if target == run.b {
                    Some(prepared)
                } else {
                    let code = view.code.as_ref().expect("commit completed").to_code()?;
                    code.coset(&view.s)?
                        .into_iter()
                        .filter(|t| view.g.dot(t) ^ view.w == target)
                        .min_by_key(|t| (t.distance(&prepared), t.lex_key()))
                };
                let Some(claim) = claim else {
                    sched.send(*committer, *verifier, "refuse", &())?;
                    return Ok(None);
                };
                sched.send(*committer, *verifier, "open", &(claim, target))?;
                let ok = onecc_reveal(view, &claim, target, &prepared, rng)?;
                Ok(ok.then_some(target))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random::seeded;

    #[test]
    fn honest_openings_are_accepted_and_extracted() {
        let mut rng = seeded(0);
        for bc in [BcRealization::Ideal, BcRealization::default()] {
            for b in [false, true] {
                for seed in 0..10 {
                    let mut sched = Scheduler::default();
                    let Some(mut h) = commit_bit(&bc, b, Party::Bob, Party::Alice, &mut sched, seed).unwrap() else {
                        continue;
                    };
                    assert_eq!(h.extract().unwrap(), b);
                    assert_eq!(h.open(&mut sched, &mut rng).unwrap(), Some(b));
                }
            }
        }
    }

    #[test]
    fn ideal_commitment_cannot_equivocate() {
        let mut rng = seeded(1);
        let mut sched = Scheduler::default();
        let mut h = commit_bit(&BcRealization::Ideal, true, Party::Alice, Party::Bob, &mut sched, 0)
            .unwrap()
            .unwrap();
        assert_eq!(h.open_as(false, &mut sched, &mut rng).unwrap(), None);
    }

    #[test]
    fn equivocation_against_one_cc_is_mostly_rejected() {
        let mut rng = seeded(2);
        let (mut tried, mut accepted) = (0, 0);
        for seed in 0..200 {
            let mut sched = Scheduler::default();
            let bc = BcRealization::default();
            let Some(mut h) = commit_bit(&bc, false, Party::Alice, Party::Bob, &mut sched, seed).unwrap() else {
                continue;
            };
            tried += 1;
            accepted += usize::from(h.open_as(true, &mut sched, &mut rng).unwrap().is_some());
        }
        assert!(tried > 150);
        assert!((accepted as f64) < 0.3 * tried as f64, "{accepted}/{tried}");
    }
}
