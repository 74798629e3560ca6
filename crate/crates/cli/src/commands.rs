//! Subcommand bodies. Each turns its inputs into an [`ExperimentReport`];
//! a [`UsageError`] means the request itself was bad.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use qadapt::coding::{Bits, CodeFile, LinearCode, MAX_CODE_LEN};
use qadapt::commitment::{storage_reduction_check, BindingMode, SchemeFile};
use qadapt::games::{random_game, verify_main_theorem, FamilyFile};
use qadapt::info::imax_acc_bounds;
use qadapt::protocols::{
    bcjl_na_binding, onecc_commit, simulate_commit_1cc, BcjlInstance, OneCcParams, ScriptedAdversary, ThetaSet,
};
use qadapt::quantum::random::{child_seed, seeded};
use qadapt::quantum::MatrixFile;
use qadapt::uc::{
    run_2cc_protocol, run_ot_protocol, run_simulator_demo, BcRealization, Corruption, DemoConfig, ExecutionTranscript,
    OtAdversary, OtInputs, TwoCcInputs, TwoCcSenderScript,
};

use crate::report::{run_check, ExperimentReport, Outcome, Source};
use crate::suite::{game_dims, game_record};

pub const FORMATS_POINTER: &str = "see README.md, section \"Input formats\"";

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub type CmdResult<T> = std::result::Result<T, UsageError>;

pub fn load_json<T: DeserializeOwned>(path: &Path) -> CmdResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| UsageError(format!("malformed JSON in {}: {e} ({FORMATS_POINTER})", path.display())))
}

fn usage(e: qadapt::Error) -> UsageError {
    UsageError(format!("{e} ({FORMATS_POINTER})"))
}

/// `{"state": <matrix file>, "family": <family file>}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct GameInput {
    pub state: MatrixFile,
    pub family: FamilyFile,
}

pub fn game_random(count: usize, seed: u64, tol: f64, budget: usize) -> ExperimentReport {
    let checks = (0..count)
        .map(|i| {
            let (a, b, j) = game_dims(i);
            let s = child_seed(seed, i as u64);
            let inputs = json!({ "seed": s, "dim_a": a, "dim_a_prime": 1, "dim_b": b, "povms": j });
            run_check(&format!("game {i}"), None, Source::Invariant, inputs, || {
                let r = verify_main_theorem(&random_game(s, a, 1, b, j)?, tol, budget, s)?;
                let mut o = Outcome::default();
                game_record(&mut o, "game", &r);
                o.value("p_na", r.p_na)
                    .value("p_semi", r.p_semi)
                    .value("p_adaptive", r.p_adaptive)
                    .value("h0_a", r.h0_a);
                o.details(&r);
                Ok::<_, qadapt::Error>(o)
            })
        })
        .collect();
    let config = json!({ "random": count, "tol": tol, "budget": budget });
    ExperimentReport::new("game", seed, config, checks)
}

pub fn game_file(path: &Path, seed: u64, tol: f64, budget: usize) -> CmdResult<ExperimentReport> {
    let input: GameInput = load_json(path)?;
    let state = input.state.to_density().map_err(usage)?;
    let game = input.family.clone().into_game(state).map_err(usage)?;
    let inputs = serde_json::to_value(&input).unwrap_or_default();
    let check = run_check("game", None, Source::Invariant, inputs, || {
        let r = verify_main_theorem(&game, tol, budget, seed)?;
        let mut o = Outcome::default();
        game_record(&mut o, "game", &r);
        o.value("p_na", r.p_na)
            .value("p_semi", r.p_semi)
            .value("p_adaptive", r.p_adaptive)
            .value("h0_a", r.h0_a);
        o.details(&r);
        Ok::<_, qadapt::Error>(o)
    });
    Ok(ExperimentReport::new(
        "game",
        seed,
        json!({ "input": path, "tol": tol, "budget": budget }),
        vec![check],
    ))
}

/// Non-adaptive binding of a scheme and the storage reduction with a
/// `q`-qubit adversary register.
pub fn binding(path: &Path, q: usize, trials: usize, seed: u64) -> CmdResult<ExperimentReport> {
    let file: SchemeFile = load_json(path)?;
    let scheme = file.to_scheme().map_err(usage)?;
    let inputs = serde_json::to_value(&file).unwrap_or_default();
    let check = run_check("storage-reduction", None, Source::Invariant, inputs, || {
        let eps = scheme.eps_na();
        let r = storage_reduction_check(&scheme, q, eps, trials, BindingMode::ProjectiveBruteforce, seed)?;
        let mut o = Outcome::default();
        o.value("eps_na", eps).value("bound", r.bound);
        for (t, trial) in r.trials.iter().enumerate() {
            o.leq(
                &format!("trial {t}: p0 + p1 - 1 <= 2^(q/2) sqrt(eps_NA) + net slack"),
                trial.alpha,
                trial.bound + trial.slack + 1e-9,
            );
        }
        o.details(&r);
        Ok::<_, qadapt::Error>(o)
    });
    Ok(ExperimentReport::new(
        "binding",
        seed,
        json!({ "scheme": path, "q": q, "trials": trials }),
        vec![check],
    ))
}

/// Full commit runs are limited to `N ≤ 24`; above that only the sampling
/// phase is simulated.
pub fn onecc(params: OneCcParams, runs: usize, seed: u64) -> ExperimentReport {
    let inputs = json!({ "params": params, "runs": runs });
    let sampling = run_check("1cc-sampling", None, Source::Oracle, inputs.clone(), || {
        let s = simulate_commit_1cc(&params, &ScriptedAdversary::default(), child_seed(seed, 0), runs)?;
        let sigma = (s.alice_abort_exact * (1.0 - s.alice_abort_exact) / runs.max(1) as f64).sqrt();
        let mut o = Outcome::default();
        o.value("alice_abort_frequency", s.alice_abort_frequency)
            .value("alice_abort_exact", s.alice_abort_exact)
            .value("hoeffding_bound", s.hoeffding_bound)
            .value("sampling_epsilon", s.sampling_epsilon)
            .holds("honest runs never fail a check", s.bob_aborts == 0)
            .leq(
                "|frequency - exact tail| <= 3 sigma",
                (s.alice_abort_frequency - s.alice_abort_exact).abs(),
                3.0 * sigma + 1e-12,
            )
            .leq("exact tail <= 2 exp(-2 q^2 N)", s.alice_abort_exact, s.hoeffding_bound);
        o.details(&s);
        Ok::<_, qadapt::Error>(o)
    });
    let mut checks = vec![sampling];
    if params.n > MAX_CODE_LEN {
        return ExperimentReport::new("onecc", seed, json!({ "params": params, "runs": runs }), checks);
    }
    let commit = run_check("1cc-commit", None, Source::Invariant, inputs, || {
        let run = onecc_commit(&params, false, child_seed(seed, 1))?;
        let mut o = Outcome::default();
        o.holds("honest commit passes every check", !run.bob_aborted)
            .value("checked", run.view.checked.len() as f64)
            .value("alice_aborted", f64::from(u8::from(run.alice_aborted)));
        o.details(&run);
        Ok::<_, qadapt::Error>(o)
    });
    checks.push(commit);
    ExperimentReport::new("onecc", seed, json!({ "params": params, "runs": runs }), checks)
}

/// `hamming74`, `repetition` (length `n`) or a code file.
pub fn parse_code(spec: &str, n: usize) -> CmdResult<LinearCode> {
    match spec {
        "hamming74" if n == 7 => Ok(LinearCode::hamming74()),
        "hamming74" => Err(UsageError(format!("hamming74 has n = 7, not {n}"))),
        "repetition" => LinearCode::repetition(n).map_err(usage),
        path => {
            let file: CodeFile = load_json(Path::new(path))?;
            let code = file.to_code().map_err(usage)?;
            if code.n() != n {
                return Err(UsageError(format!("code file has n = {}, --n is {n}", code.n())));
            }
            Ok(code)
        }
    }
}

/// Binding of the BCJL_δ commitment for one `(g, s, w)`, drawn from the
/// seed unless given. Full enumeration when it fits the budget.
pub fn bcjl(
    code: &LinearCode,
    delta: f64,
    hash: Option<(Bits, Bits, bool)>,
    budget: usize,
    seed: u64,
) -> CmdResult<ExperimentReport> {
    let (g, s, w) = match hash {
        Some(h) => h,
        None => {
            use rand::Rng;
            let mut rng = seeded(seed);
            let n = code.n();
            let r = n - code.k();
            let g = Bits::new(n, rng.random::<u64>() & ((1u64 << n) - 1)).map_err(usage)?;
            let s = Bits::new(r, rng.random::<u64>() & ((1u64 << r) - 1)).map_err(usage)?;
            (g, s, rng.random_bool(0.5))
        }
    };
    let inst = BcjlInstance::new(code, delta, g, s, w).map_err(usage)?;
    let zero = inst.openings(false).map_err(usage)?.len();
    let one = inst.openings(true).map_err(usage)?.len();
    let total = (zero * one) as f64 * 4f64.powi(code.n() as i32);
    let set = if total <= budget as f64 {
        ThetaSet::Full
    } else {
        ThetaSet::Sampled { pairs: budget, seed }
    };
    let inputs = json!({ "code": CodeFile::from_code(code), "delta": delta, "g": g, "s": s, "w": w, "theta_set": set });
    let check = run_check("bcjl-binding", None, Source::Invariant, inputs, || {
        let r = bcjl_na_binding(&inst, &set, budget)?;
        let mut o = Outcome::default();
        o.value("pairs_evaluated", r.pairs_evaluated as f64)
            .value("total_pairs", r.total_pairs)
            .leq("max tr(V rho) + tr(V' rho) <= bound + 1e-9", r.max_sum, r.bound + 1e-9)
            .holds("overlap bound on every evaluated pair", r.overlap_violations == 0);
        if r.pairs_evaluated > 0 {
            o.value("worst_overlap_slack", r.worst_overlap_slack);
        }
        o.details(&r);
        Ok::<_, qadapt::Error>(o)
    });
    Ok(ExperimentReport::new(
        "bcjl",
        seed,
        json!({ "delta": delta, "budget": budget }),
        vec![check],
    ))
}

pub fn info(path: &Path, a_labels: &[String], budget: usize, seed: u64) -> CmdResult<ExperimentReport> {
    let file: MatrixFile = load_json(path)?;
    let rho = file.to_density().map_err(usage)?;
    let labels: Vec<&str> = a_labels.iter().map(String::as_str).collect();
    let inputs = json!({ "state": file, "a": a_labels, "budget": budget });
    let check = run_check("imax-acc", None, Source::Invariant, inputs, || {
        let est = imax_acc_bounds(&rho, &labels, budget, seed, &[])?;
        let mut o = Outcome::default();
        o.value("lower_bound", est.lower_bound)
            .value("upper_bound", est.upper_bound)
            .leq(
                "searched I_max <= H_0(A) + 1e-8",
                est.lower_bound,
                est.upper_bound + 1e-8,
            );
        o.details(&est);
        Ok::<_, qadapt::Error>(o)
    });
    Ok(ExperimentReport::new(
        "info",
        seed,
        json!({ "state": path, "budget": budget }),
        vec![check],
    ))
}

/// A protocol execution to replay.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Scenario {
    Ot {
        n: usize,
        inputs: OtInputs,
        /// One of the built-in script names; honest when absent.
        #[serde(default)]
        adversary: Option<String>,
        #[serde(default)]
        bc: BcRealization,
    },
    #[serde(rename = "2cc")]
    TwoCc {
        inputs: TwoCcInputs,
        #[serde(default)]
        script: TwoCcSenderScript,
        #[serde(default)]
        bc: BcRealization,
    },
}

pub fn uc_scenario(path: &Path, seed: u64) -> CmdResult<(ExperimentReport, ExecutionTranscript)> {
    let scenario: Scenario = load_json(path)?;
    let transcript = match &scenario {
        Scenario::Ot {
            n,
            inputs,
            adversary,
            bc,
        } => {
            let adv = adversary
                .as_deref()
                .map(|a| OtAdversary::from_name(a, *n))
                .transpose()
                .map_err(usage)?;
            run_ot_protocol(inputs, *n, adv.as_ref(), bc, seed).map_err(usage)?
        }
        Scenario::TwoCc { inputs, script, bc } => run_2cc_protocol(inputs, Some(*script), bc, seed).map_err(usage)?,
    };
    let inputs = serde_json::to_value(&scenario).unwrap_or_default();
    let check = run_check("uc-execution", None, Source::Invariant, inputs, || {
        let mut o = Outcome::default();
        o.value("events", transcript.events.len() as f64)
            .value("aborts", transcript.aborts.len() as f64)
            .holds("replay from the seed is identical", {
                let again = match &scenario {
                    Scenario::Ot {
                        n,
                        inputs,
                        adversary,
                        bc,
                    } => {
                        let adv = adversary
                            .as_deref()
                            .map(|a| OtAdversary::from_name(a, *n))
                            .transpose()?;
                        run_ot_protocol(inputs, *n, adv.as_ref(), bc, seed)?
                    }
                    Scenario::TwoCc { inputs, script, bc } => run_2cc_protocol(inputs, Some(*script), bc, seed)?,
                };
                again == transcript
            });
        o.details(&json!({ "alice": transcript.alice, "bob": transcript.bob, "aborts": transcript.aborts }));
        Ok::<_, qadapt::Error>(o)
    });
    Ok((
        ExperimentReport::new("uc", seed, json!({ "scenario": path }), vec![check]),
        transcript,
    ))
}

pub fn uc_demo(script: &str, runs: usize, n: usize, seed: u64) -> CmdResult<ExperimentReport> {
    let corruption = match script.split(':').next() {
        Some("sender") => Corruption::Sender,
        Some("receiver") => Corruption::Receiver,
        _ => {
            return Err(UsageError(format!(
                "unknown script `{script}`; known: {:?}",
                OtAdversary::NAMES
            )))
        }
    };
    let config = DemoConfig {
        n,
        runs,
        ..DemoConfig::default()
    };
    let inputs = json!({ "script": script, "config": config });
    let check = run_check(&format!("demo {script}"), None, Source::Oracle, inputs, || {
        let r = run_simulator_demo(corruption, script, &config, seed)?;
        let mut o = Outcome::default();
        for c in &r.categories {
            o.value(&format!("{}: real", c.label), c.real as f64)
                .value(&format!("{}: ideal", c.label), c.ideal as f64)
                .leq(
                    &format!("{}: real vs ideal within 3 sigma", c.label),
                    c.deviation,
                    c.allowed,
                );
        }
        o.holds("per-run cross checks agree", r.cross_agreements == r.cross_checks);
        o.details(&r);
        Ok::<_, qadapt::Error>(o)
    });
    Ok(ExperimentReport::new(
        "uc",
        seed,
        json!({ "demo": script, "runs": runs, "n": n }),
        vec![check],
    ))
}

/// One CSV row per asserted inequality.
pub fn write_csv(report: &ExperimentReport, path: &Path) -> CmdResult<()> {
    let fail = |e: csv::Error| UsageError(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(fail)?;
    w.write_record(["check", "inequality", "lhs", "rhs", "slack", "pass"])
        .map_err(fail)?;
    for c in &report.checks {
        for q in &c.inequalities {
            w.write_record([
                c.name.clone(),
                q.name.clone(),
                q.lhs.to_string(),
                q.rhs.to_string(),
                q.slack.to_string(),
                q.pass.to_string(),
            ])
            .map_err(fail)?;
        }
    }
    w.flush()
        .map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))
}

/// One line per check, then the verdict.
pub fn summary(report: &ExperimentReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let failed =
            c.inequalities.iter().filter(|q| !q.pass).count() + c.conditions.iter().filter(|x| !x.holds).count();
        let status = match c.status {
            crate::report::Status::Pass => "PASS",
            crate::report::Status::Fail => "FAIL",
            crate::report::Status::Error => "ERROR",
        };
        out += &format!(
            "{status:<5} {:<36} {:>5} checks {:>4} failed {:>9.1} ms\n",
            c.name,
            c.inequalities.len() + c.conditions.len(),
            failed,
            c.runtime_ms
        );
        if let Some(e) = &c.error {
            out += &format!("      {e}\n");
        }
    }
    let ok = report
        .checks
        .iter()
        .filter(|c| c.status == crate::report::Status::Pass)
        .count();
    out += &format!("{}: {ok}/{} checks passed\n", report.suite, report.checks.len());
    out
}
