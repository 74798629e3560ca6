//! The acceptance battery: twelve checks, each producing one record.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use qadapt::coding::{Bits, LinearCode};
use qadapt::commitment::{
    acceptance, cheat_state, norm_lemma_check, opening_projectors, storage_reduction_check, BindingMode,
    OpeningStrategy, ProjectiveCommitmentScheme,
};
use qadapt::games::{bell_counterexample, random_game, verify_main_theorem, GameResult, DEFAULT_GAME_TOL};
use qadapt::hashing::privacy_amp_check;
use qadapt::info::{
    depolarizing_kraus, domination_slack, identity_kraus, imax_for_measurement, local_channel_monotonicity_check,
    random_projective, random_rank1_povm, zero_entropy_of, MeasurementDescriptor,
};
use qadapt::measurement::{optimal_discrimination, CqState, DiscriminationInstance, DEFAULT_MAX_ITER};
use qadapt::protocols::{
    bcjl_equivalence_mc, bcjl_na_binding, extraction_check, lemma3_bound_check, onecc_commit, sample_smallsup_state,
    simulate_commit_1cc, BcjlInstance, OneCcParams, ScriptedAdversary, ThetaSet,
};
use qadapt::quantum::random::{child_seed, dirichlet_flat, random_density, random_projector, random_unitary, seeded};
use qadapt::quantum::{spectral_norm, CMatrix, DensityOperator, RegisterShape};
use qadapt::uc::{
    run_ot_protocol, run_simulator_demo, BcRealization, Corruption, CutAndChoose, DemoConfig, OtAdversary, OtInputs,
    Output,
};
use qadapt::{Error, Result};

use crate::report::{run_check, CheckRecord, ExperimentReport, Outcome, Source};

/// Overrides the default enumeration budget.
pub const BUDGET_ENV: &str = "QADAPT_BUDGET";
pub const DEFAULT_ENUM_BUDGET: usize = 4096;

pub fn budget_from_env() -> std::result::Result<Option<usize>, String> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| format!("{BUDGET_ENV}={v:?} is not a count")),
        Err(_) => Ok(None),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub tol: f64,
    /// Measurements searched per game for the per-measurement bound.
    pub search_budget: usize,
    /// Opening pairs per binding enumeration.
    pub enum_budget: usize,
    pub games: usize,
    pub info_states: usize,
    pub info_measurements: usize,
    pub channel_runs: usize,
    pub projector_pairs: usize,
    pub cheat_instances: usize,
    pub smallsup_states: usize,
    pub hamming_instances: usize,
    pub cq_states: usize,
    pub pa_max_n: usize,
    pub mc_runs: usize,
    pub ot_n: usize,
    pub ot_ell: usize,
    /// Non-aborting honest OT runs required.
    pub ot_runs: usize,
    pub demo_runs: usize,
    pub storage_schemes: usize,
    pub storage_trials: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            tol: DEFAULT_GAME_TOL,
            search_budget: 4,
            enum_budget: budget_from_env().ok().flatten().unwrap_or(DEFAULT_ENUM_BUDGET),
            games: 200,
            info_states: 100,
            info_measurements: 5,
            channel_runs: 5,
            projector_pairs: 100,
            cheat_instances: 50,
            smallsup_states: 100,
            hamming_instances: 8,
            cq_states: 50,
            pa_max_n: 4,
            mc_runs: 20_000,
            ot_n: 8,
            ot_ell: 4,
            ot_runs: 1000,
            demo_runs: 1000,
            storage_schemes: 24,
            storage_trials: 4,
        }
    }
}

pub const CRITERIA: [(u32, &str); 12] = [
    (1, "theta-guessing-constant"),
    (2, "bell-counterexample"),
    (3, "random-game-bound"),
    (4, "per-measurement-domination"),
    (5, "projector-norm-inequality"),
    (6, "cheat-state-constructor"),
    (7, "small-support-acceptance"),
    (8, "bcjl-non-adaptive-binding"),
    (9, "privacy-amplification"),
    (10, "sampling-completeness-and-tails"),
    (11, "uc-simulator-demos"),
    (12, "storage-reduction"),
];

/// Runs one criterion. Unknown numbers give an error record.
pub fn criterion(k: u32, cfg: &SuiteConfig) -> CheckRecord {
    let name = CRITERIA.iter().find(|c| c.0 == k).map_or("unknown", |c| c.1);
    let seed = child_seed(cfg.seed, u64::from(k));
    let source = match k {
        1 | 2 => Source::Reference,
        10 | 11 => Source::Oracle,
        _ => Source::Invariant,
    };
    let inputs = json!({ "criterion": k, "seed": seed, "config": cfg });
    run_check(name, Some(k), source, inputs, || match k {
        1 => theta_guessing(),
        2 => bell(cfg, seed),
        3 => random_games(cfg, seed),
        4 => domination(cfg, seed),
        5 => projector_pairs(cfg, seed),
        6 => cheat_states(cfg, seed),
        7 => small_support(cfg, seed),
        8 => bcjl_binding(cfg, seed),
        9 => privacy_amplification(cfg, seed),
        10 => sampling(cfg, seed),
        11 => uc_demos(cfg, seed),
        12 => storage(cfg, seed),
        _ => Err(Error::Input(format!("no criterion {k}"))),
    })
}

pub fn verify_selected(cfg: &SuiteConfig, which: &[u32]) -> ExperimentReport {
    let checks = which.iter().map(|&k| criterion(k, cfg)).collect();
    let config = serde_json::to_value(cfg).unwrap_or_default();
    ExperimentReport::new("verify-all", cfg.seed, config, checks)
}

pub fn verify_all(cfg: &SuiteConfig) -> ExperimentReport {
    let all: Vec<u32> = CRITERIA.iter().map(|c| c.0).collect();
    verify_selected(cfg, &all)
}

fn cr(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn pure(v: [f64; 2], weight: f64) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| cr(weight * v[i] * v[j]))
}

fn random_bits(n: usize, rng: &mut impl Rng) -> Result<Bits> {
    Bits::new(n, rng.random::<u64>() & ((1u64 << n) - 1))
}

fn collect<T: Send>(items: Vec<Result<T>>) -> Result<Vec<T>> {
    items.into_iter().collect()
}

fn theta_guessing() -> Result<Outcome> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ks = vec![pure([1.0, 0.0], 0.5), pure([h, h], 0.5)];
    let cert = optimal_discrimination(&DiscriminationInstance::from_operators(ks)?, 1e-10, DEFAULT_MAX_ITER)?;
    let exact = (PI / 8.0).cos().powi(2);
    let mut o = Outcome::default();
    o.value("primal", cert.primal_value)
        .value("dual", cert.dual_value)
        .value("gap", cert.gap)
        .value("cos^2(pi/8)", exact)
        .leq("|primal - cos^2(pi/8)|", (cert.primal_value - exact).abs(), 1e-9)
        .leq("|dual - cos^2(pi/8)|", (cert.dual_value - exact).abs(), 1e-9)
        .leq("|primal - 0.8535534|", (cert.primal_value - 0.853_553_4).abs(), 5e-8);
    o.details(&cert.summary());
    Ok(o)
}

fn bell(cfg: &SuiteConfig, seed: u64) -> Result<Outcome> {
    let r = verify_main_theorem(&bell_counterexample(), cfg.tol, cfg.search_budget, seed)?;
    let mut o = Outcome::default();
    o.value("p_adaptive", r.p_adaptive)
        .value("p_semi", r.p_semi)
        .value("p_na", r.p_na)
        .value("h0_a", r.h0_a)
        .leq("|P^A - 1|", (r.p_adaptive - 1.0).abs(), 1e-7)
        .leq("adaptive gap", r.certificates.adaptive.gap, 1e-7)
        .leq("|P^semi - 1/4|", (r.p_semi - 0.25).abs(), 1e-7)
        .leq("|P^NA - 1/4|", (r.p_na - 0.25).abs(), 1e-7)
        .holds("H_0(A) = 1", r.h0_a == 1.0)
        .holds("expected violation flagged", r.expected_violation)
        .holds(
            "flagged check is violated",
            r.bound_checks.iter().any(|c| c.expected_violation && !c.pass),
        );
    o.details(&r);
    Ok(o)
}

/// Same spread of register sizes as the games tests: A of dimension 1, 2
/// or 4, B of dimension 2 or 4, one to four POVMs.
pub fn game_dims(i: usize) -> (usize, usize, usize) {
    ([1, 2, 4][i % 3], [2, 4][(i / 3) % 2], 1 + (i / 6) % 4)
}

pub fn game_record(o: &mut Outcome, tag: &str, r: &GameResult) {
    let a = &r.certificates.adaptive;
    o.leq(
        &format!("{tag}: P^A <= 2^H0 P^NA + 1e-6"),
        a.dual,
        2f64.powf(r.h0_a) * r.p_na + 1e-6,
    )
    .leq(&format!("{tag}: P^NA <= P^A + 1e-8"), r.p_na, a.primal + 1e-8)
    .leq(&format!("{tag}: adaptive gap"), a.gap, 1e-7);
    for c in &r.bound_checks {
        if c.expected_violation {
            o.holds(&format!("{tag}: {} (violation expected)", c.name), true);
        } else {
            o.holds(&format!("{tag}: {}", c.name), c.pass);
        }
    }
}

fn random_games(cfg: &SuiteConfig, seed: u64) -> Result<Outcome> {
    let results = collect(
        (0..cfg.games)
            .into_par_iter()
            .map(|i| {
                let (a, b, j) = game_dims(i);
                let s = child_seed(seed, i as u64);
                verify_main_theorem(&random_game(s, a, 1, b, j)?, cfg.tol, cfg.search_budget, s)
            })
            .collect(),
    )?;
    let mut o = Outcome::default();
    let mut worst_gap: f64 = 0.0;
    for (i, r) in results.iter().enumerate() {
        game_record(&mut o, &format!("game {i}"), r);
        worst_gap = worst_gap.max(r.certificates.adaptive.gap);
    }
    o.value("games", results.len() as f64).value("worst_gap", worst_gap);
    Ok(o)
}

fn domination(cfg: &SuiteConfig, seed: u64) -> Result<Outcome> {
    let rows = collect(
        (0..cfg.info_states)
            .into_par_iter()
            .map(|i| -> Result<Vec<(f64, f64, f64, f64)>> {
                let (da, db) = if i % 3 == 0 { (4, 2) } else { (2, 2) };
                let mut rng = seeded(child_seed(seed, i as u64));
                let shape = RegisterShape::new(vec![("A", da), ("B", db)])?;
                let rho = random_density(&shape, 1 + i % (da * db), &mut rng)?;
                let h0 = zero_entropy_of(&rho, &["A"])?;
                let a = RegisterShape::single("A", da)?;
                (0..cfg.info_measurements)
                    .map(|k| {
                        let povm = if k % 2 == 0 {
                            random_projective(&a, &mut rng)?
                        } else {
                            random_rank1_povm(&a, da + k, &mut rng)?
                        };
                        let m = MeasurementDescriptor::new(vec!["A".into()], povm);
                        let v = imax_for_measurement(&m, &rho)?;
                        let at = domination_slack(&m, &rho, v.value, &v.sigma)?;
                        let below = domination_slack(&m, &rho, v.value - 1e-4, &v.sigma)?;
                        Ok((v.value, h0, at, below))
                    })
                    .collect()
            })
            .collect(),
    )?;
    let mut o = Outcome::default();
    for (i, row) in rows.iter().enumerate() {
        for (k, &(value, h0, at, below)) in row.iter().enumerate() {
            let tag = format!("state {i} measurement {k}");
            o.leq(&format!("{tag}: -slack at value"), -at, 1e-9)
                .holds(&format!("{tag}: domination fails at value - 1e-4"), below < 0.0)
                .leq(&format!("{tag}: I_max <= H_0(A) + 1e-8"), value, h0 + 1e-8);
        }
    }
    // A rank-2 state on a 4-dimensional A, so the depolarized output has
    // full rank while the original H_0(A) is 1.
    for r in 0..cfg.channel_runs {
        let s = child_seed(seed, 10_000 + r as u64);
        let mut rng = seeded(s);
        let small = random_density(&RegisterShape::new(vec![("A", 2), ("B", 2)])?, 1, &mut rng)?;
        let mut embedded = CMatrix::zeros(8, 8);
        embedded.view_mut((0, 0), (4, 4)).copy_from(small.matrix());
        let rho = DensityOperator::new(RegisterShape::new(vec![("A", 4), ("B", 2)])?, embedded)?;
        let rep =
            local_channel_monotonicity_check(&rho, &["A"], &depolarizing_kraus(4, 0.2), &identity_kraus(2), 50, s)?;
        o.leq(
            &format!("channel run {r}: searched I_max <= original H_0(A) + 1e-8"),
            rep.max_value,
            rep.h0_a_original + 1e-8,
        );
    }
    o.value("states", rows.len() as f64);
    Ok(o)
}

fn projector_pairs(cfg: &SuiteConfig, seed: u64) -> Result<Outcome> {
    let mut o = Outcome::default();
    let mut worst: f64 = f64::INFINITY;
    for i in 0..cfg.projector_pairs {
        let mut rng = seeded(child_seed(seed, i as u64));
        let d = 1 + i % 16;
        let (rx, ry) = (rng.random_range(0..=d), rng.random_range(0..=d));
        let x = random_projector(d, rx, &mut rng);
        let y = random_projector(d, ry, &mut rng);
        let r = norm_lemma_check(&x, &y)?;
        worst = worst.min(r.rhs - r.lhs);
        o.leq(
            &format!("pair {i} (d = {d}): ||X+Y|| <= 1 + ||XY|| + 1e-9"),
            r.lhs,
            r.rhs + 1e-9,
        );
    }
    o.value("worst_slack", worst);
    Ok(o)
}

/// A random `d`-dimensional projective measurement with `outcomes` outcomes.
pub fn random_measurement(d: usize, outcomes: usize, rng: &mut impl Rng) -> Vec<CMatrix> {
    let u = random_unitary(d, rng);
    let mut out = vec![CMatrix::zeros(d, d); outcomes];
    for i in 0..d {
        let col = u.column(i).into_owned();
        out[rng.random_range(0..outcomes)] += &col * col.adjoint();
    }
    out
}

/// Random projective openings on a single register `B`.
pub fn random_scheme(seed: u64, d_b: usize, n0: usize, n1: usize) -> Result<ProjectiveCommitmentScheme> {
    let mut rng = seeded(seed);
    let mut side = |n: usize| -> Vec<(String, CMatrix)> {
        (0..n)
            .map(|y| {
                let rank = rng.random_range(1..d_b);
                (format!("y{y}"), random_projector(d_b, rank, &mut rng))
            })
            .collect()
    };
    let open0 = side(n0);
    let open1 = side(n1);
    ProjectiveCommitmentScheme::new(RegisterShape::single("B", d_b)?, open0, open1)
}

fn cheat_states(cfg: &SuiteConfig, seed: u64) -> Result<Outcome> {
    let mut o = Outcome::default();
    let mut found = 0;
    let mut attempts = 0;
    while found < cfg.cheat_instances && attempts < 40 * cfg.cheat_instances.max(1) {
        let s = child_seed(seed, attempts as u64);
        attempts += 1;
        let mut rng = seeded(s);
        let d_a = 2 + attempts % 2;
        let scheme = random_scheme(child_seed(s, 1), 2, 2, 2)?;
        let strat = OpeningStrategy::new(
            random_measurement(d_a, 2, &mut rng),
            random_measurement(d_a, 2, &mut rng),
        )?;
        let (p0, p1) = opening_projectors(&scheme, &strat)?;
        // Best p0 + p1 over all states is the top eigenvalue of P0 + P1.
        let eps = spectral_norm(&(&p0 + &p1)) - 1.0;
        if eps < 1e-3 {
            continue;
        }
        let phi0 = cheat_state(&p0, &p1)?
            .phi0
            .ok_or_else(|| Error::Input("positive advantage but P1 P0 = 0".into()))?;
        let tag = format!("instance {found} (eps = {eps:.4})");
        o.leq(&format!("{tag}: 1 - P0 <= 1e-9"), 1.0 - acceptance(&p0, &phi0), 1e-9)
            .leq(
                &format!("{tag}: eps^2 <= P1 + 1e-7"),
                eps * eps,
                acceptance(&p1, &phi0) + 1e-7,
            );
        found += 1;
    }
    o.value("instances", found as f64).value("attempts", attempts as f64);
    o.holds(
        &format!("{} instances with eps >= 1e-3", cfg.cheat_instances),
        found == cfg.cheat_instances,
    );
    Ok(o)
}

fn small_support(cfg: &SuiteConfig, seed: u64) -> Result<Outcome> {
    let code = LinearCode::hamming74();
    let delta = 1.0 / 7.0;
    let rows = collect(
        (0..cfg.smallsup_states)
            .into_par_iter()
            .map(|i| {
                let s_i = child_seed(seed, i as u64);
                let mut rng = seeded(s_i);
                let theta = random_bits(7, &mut rng)?;
                let st = sample_smallsup_state(&theta, delta, 1 + i % 4, s_i)?;
                let (g, s, w) = (
                    random_bits(7, &mut rng)?,
                    random_bits(3, &mut rng)?,
                    rng.random_bool(0.5),
                );
                let lemma = lemma3_bound_check(&st, &code, &s)?;
                let ext = extraction_check(&st, &code, &g, &s, w, 1e-8)?;
                Ok((lemma, ext))
            })
            .collect(),
    )?;
    let mut o = Outcome::default();
    let mut worst_ratio: f64 = 0.0;
    for (i, (lemma, ext)) in rows.iter().enumerate() {
        o.leq(
            &format!("state {i}: worst wrong opening <= 2^(-d/2 + n h(delta)) + 1e-9"),
            lemma.worst_value,
            lemma.bound + 1e-9,
        )
        .leq(
            &format!("state {i}: adaptive wrong bit <= 2^H0 bound + 1e-6"),
            ext.adaptive_upper,
            2f64.powf(ext.h0_a) * ext.lemma3_bound + 1e-6,
        );
        if lemma.intermediate_bound > 0.0 {
            worst_ratio = worst_ratio.max(lemma.worst_value / lemma.intermediate_bound);
        }
    }
    if let Some((l, e)) = rows.first() {
        o.value("bound", l.bound).value("theorem_bound", e.theorem_bound);
    }
    o.value("worst_over_intermediate", worst_ratio);
    Ok(o)
}

fn bcjl_binding(cfg: &SuiteConfig, seed: u64) -> Result<Outcome> {
    let mut o = Outcome::default();
    let rep = LinearCode::repetition(3)?;
    let mut full_pairs = 0;
    for g in Bits::all(3) {
        for s in Bits::all(2) {
            for w in [false, true] {
                let inst = BcjlInstance::new(&rep, 0.0, g, s, w)?;
                let r = bcjl_na_binding(&inst, &ThetaSet::Full, cfg.enum_budget)?;
                full_pairs += r.pairs_evaluated;
                let tag = format!("[3,1,3] g={g} s={s} w={}", u8::from(w));
                o.leq(
                    &format!("{tag}: max tr(V rho) + tr(V' rho) <= bound + 1e-9"),
                    r.max_sum,
                    r.bound + 1e-9,
                )
                .holds(
                    &format!("{tag}: overlap bound on every pair"),
                    r.overlap_violations == 0,
                );
            }
        }
    }
    let ham = LinearCode::hamming74();
    let mut sampled = 0;
    for i in 0..cfg.hamming_instances {
        let s_i = child_seed(seed, i as u64);
        let mut rng = seeded(s_i);
        let (g, s, w) = (
            random_bits(7, &mut rng)?,
            random_bits(3, &mut rng)?,
            rng.random_bool(0.5),
        );
        let inst = BcjlInstance::new(&ham, 1.0 / 7.0, g, s, w)?;
        let r = bcjl_na_binding(
            &inst,
            &ThetaSet::Sampled {
                pairs: cfg.enum_budget,
                seed: s_i,
            },
            0,
        )?;
        sampled += r.pairs_evaluated;
        let tag = format!("[7,4,3] g={g} s={s} w={}", u8::from(w));
        o.leq(
            &format!("{tag}: max tr(V rho) + tr(V' rho) <= bound + 1e-9"),
            r.max_sum,
            r.bound + 1e-9,
        )
        .holds(
            &format!("{tag}: overlap bound on every pair"),
            r.overlap_violations == 0,
        );
    }
    o.value("full_pairs", full_pairs as f64)
        .value("sampled_pairs", sampled as f64);
    Ok(o)
}

/// Random cq-state on `n` bits with a qubit `E` holding pure conditional states.
pub fn random_cq(seed: u64, n: usize, d_e: usize) -> Result<CqState> {
    let mut rng = seeded(seed);
    let e = RegisterShape::single("E", d_e)?;
    let weights = dirichlet_flat(1 << n, &mut rng);
    let states = (0..(1usize << n))
        .map(|_| random_density(&e, 1, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let labels = Bits::all(n).map(|b| b.to_string()).collect();
    CqState::new(labels, weights, states)
}

fn privacy_amplification(cfg: &SuiteConfig, seed: u64) -> Result<Outcome> {
    let reports = collect(
        (0..cfg.cq_states)
            .into_par_iter()
            .map(|i| {
                let n = 1 + i % cfg.pa_max_n.max(1);
                privacy_amp_check(&random_cq(child_seed(seed, i as u64), n, 2)?, 1e-9)
            })
            .collect(),
    )?;
    let mut o = Outcome::default();
    for (i, r) in reports.iter().enumerate() {
        o.leq(
            &format!("cq {i} (n = {}): distance <= 1/2 2^(-(Hmin-1)/2) + 1e-9", r.n),
            r.exact_distance,
            r.bound + 1e-9,
        );
    }
    o.value("states", reports.len() as f64);
    Ok(o)
}

fn sampling(cfg: &SuiteConfig, seed: u64) -> Result<Outcome> {
    let mut o = Outcome::default();
    let honest = ScriptedAdversary::default();
    for (k, (n, q)) in [(24usize, 0.25), (40, 0.1), (64, 0.05)].into_iter().enumerate() {
        let params = OneCcParams {
            n,
            q,
            tau: 0.1,
            r: 0.5,
            delta: 0.1,
        };
        let s = simulate_commit_1cc(&params, &honest, child_seed(seed, k as u64), cfg.mc_runs)?;
        o.holds(
            &format!("N={n} q={q}: honest runs never fail a check"),
            s.bob_aborts == 0,
        );
        if n == 24 {
            continue;
        }
        let sigma = (s.alice_abort_exact * (1.0 - s.alice_abort_exact) / cfg.mc_runs.max(1) as f64).sqrt();
        o.value(&format!("N={n} q={q}: frequency"), s.alice_abort_frequency)
            .value(&format!("N={n} q={q}: exact"), s.alice_abort_exact)
            .leq(
                &format!("N={n} q={q}: |frequency - exact tail| <= 3 sigma"),
                (s.alice_abort_frequency - s.alice_abort_exact).abs(),
                3.0 * sigma + 1e-12,
            )
            .leq(
                &format!("N={n} q={q}: exact tail <= 2 exp(-2 q^2 N)"),
                s.alice_abort_exact,
                s.hoeffding_bound,
            );
    }
    let params = OneCcParams {
        n: 24,
        q: 0.25,
        tau: 0.1,
        r: 0.5,
        delta: 0.1,
    };
    let full_runs = 200;
    let bob_aborts = (0..full_runs)
        .map(|r| onecc_commit(&params, r % 2 == 1, child_seed(seed, 100 + r)).map(|run| run.bob_aborted))
        .collect::<Result<Vec<_>>>()?;
    o.holds(
        "full honest commit runs never fail a check",
        bob_aborts.iter().all(|a| !a),
    );
    for (k, (delta, n, m)) in [(0.25, 12usize, 4usize), (0.1, 24, 3), (0.5, 8, 5)]
        .into_iter()
        .enumerate()
    {
        let e = bcjl_equivalence_mc(delta, n, m, cfg.mc_runs, child_seed(seed, 200 + k as u64))?;
        let tag = format!("n={n} delta={delta} m={m}");
        o.holds(&format!("{tag}: distance above delta n"), e.precondition_met)
            .leq(
                &format!("{tag}: agreement frequency <= 2^(-delta n) + 3 sigma"),
                e.frequency,
                e.bound + 3.0 * e.sigma,
            );
    }
    Ok(o)
}

fn env_inputs(ell: usize, seed: u64) -> Result<OtInputs> {
    let mut rng = seeded(seed);
    Ok(OtInputs {
        s0: random_bits(ell, &mut rng)?,
        s1: random_bits(ell, &mut rng)?,
        c: rng.random_bool(0.5),
    })
}

/// The cut-and-choose table written out: the x-player learns `c`, the
/// chooser sees `x` exactly when `c = 1`.
const ONECC_TABLE: [(&str, bool, bool, &str); 4] = [
    ("0", false, false, "⊥"),
    ("0", true, true, "0"),
    ("1", false, false, "⊥"),
    ("1", true, true, "1"),
];

fn uc_demos(cfg: &SuiteConfig, seed: u64) -> Result<Outcome> {
    let mut o = Outcome::default();
    let bc = BcRealization::default();
    let (mut completed, mut correct, mut runs) = (0usize, 0usize, 0u64);
    while completed < cfg.ot_runs && runs < 8 * cfg.ot_runs.max(1) as u64 {
        let batch: Vec<u64> = (runs..runs + cfg.ot_runs.max(1) as u64).collect();
        runs += batch.len() as u64;
        let outs = collect(
            batch
                .par_iter()
                .map(|&r| {
                    let inputs = env_inputs(cfg.ot_ell, child_seed(seed, 2 * r))?;
                    let t = run_ot_protocol(&inputs, cfg.ot_n, None, &bc, child_seed(seed, 2 * r + 1))?;
                    Ok((t.bob.clone(), Output::Bits(*inputs.chosen())))
                })
                .collect(),
        )?;
        for (bob, expected) in outs {
            if completed == cfg.ot_runs || bob == Some(Output::Abort) {
                continue;
            }
            completed += 1;
            correct += usize::from(bob == Some(expected));
        }
    }
    o.value("honest_runs", runs as f64)
        .value("honest_completed", completed as f64);
    o.holds(
        &format!("{} non-aborting honest runs", cfg.ot_runs),
        completed == cfg.ot_runs,
    )
    .holds("every non-aborting honest run outputs s_c", correct == completed);

    let demo = DemoConfig {
        n: cfg.ot_n,
        ell: cfg.ot_ell,
        runs: cfg.demo_runs,
        bc,
        memory_qubits: 10,
    };
    for (k, name) in OtAdversary::NAMES
        .iter()
        .filter(|n| n.starts_with("sender:"))
        .enumerate()
    {
        let r = run_simulator_demo(Corruption::Sender, name, &demo, child_seed(seed, 1_000_000 + k as u64))?;
        for c in &r.categories {
            o.leq(
                &format!("{name}: {} real vs ideal within 3 sigma", c.label),
                c.deviation,
                c.allowed,
            );
        }
        o.holds(
            &format!("{name}: ideal output equals real output run by run"),
            r.cross_agreements == r.cross_checks,
        );
    }

    for (x, c, to_x, to_chooser) in ONECC_TABLE {
        for x_first in [true, false] {
            let mut f = CutAndChoose::new(1)?;
            let x_bits: Bits = x.parse()?;
            if x_first {
                f.input_x(x_bits)?;
                f.input_c(c)?;
            } else {
                f.input_c(c)?;
                f.input_x(x_bits)?;
            }
            let d = f.deliver()?;
            o.holds(
                &format!(
                    "1CC x={x} c={} ({} first)",
                    u8::from(c),
                    if x_first { "x" } else { "c" }
                ),
                d.to_x_player == to_x && d.to_chooser.label() == to_chooser,
            );
        }
    }
    Ok(o)
}

fn storage(cfg: &SuiteConfig, seed: u64) -> Result<Outcome> {
    let rows = collect(
        (0..cfg.storage_schemes)
            .into_par_iter()
            .map(|i| {
                let s = child_seed(seed, i as u64);
                let scheme = random_scheme(s, 2 + i % 3, 1 + i % 2, 1 + (i / 2) % 2)?;
                let mut spectral: f64 = 0.0;
                for v0 in scheme.projectors(0) {
                    for v1 in scheme.projectors(1) {
                        spectral = spectral.max(spectral_norm(&(&v0 + &v1)) - 1.0);
                    }
                }
                let eps = scheme.eps_na();
                let r = storage_reduction_check(
                    &scheme,
                    1,
                    eps,
                    cfg.storage_trials,
                    BindingMode::ProjectiveBruteforce,
                    s,
                )?;
                Ok((spectral, eps, r))
            })
            .collect(),
    )?;
    let mut o = Outcome::default();
    let mut worst: f64 = f64::INFINITY;
    for (i, (spectral, eps, r)) in rows.iter().enumerate() {
        o.leq(
            &format!("scheme {i}: |eps_NA - max ||V+V'|| + 1|"),
            (eps - spectral).abs(),
            1e-12,
        );
        for (t, trial) in r.trials.iter().enumerate() {
            worst = worst.min(trial.bound - trial.alpha);
            o.leq(
                &format!("scheme {i} trial {t}: p0 + p1 - 1 <= 2^(1/2) sqrt(eps_NA) + net slack"),
                trial.alpha,
                trial.bound + trial.slack + 1e-9,
            );
        }
    }
    o.value("worst_slack_without_net", worst);
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_stay_within_two_qubits() {
        for i in 0..200 {
            let (a, b, j) = game_dims(i);
            assert!(a <= 4 && b <= 4 && (1..=4).contains(&j));
        }
    }

    #[test]
    fn config_round_trips_and_rejects_unknown_fields() {
        let cfg = SuiteConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<SuiteConfig>(&text).unwrap(), cfg);
        assert!(serde_json::from_str::<SuiteConfig>(r#"{"gmaes": 3}"#).is_err());
        let partial: SuiteConfig = serde_json::from_str(r#"{"games": 3}"#).unwrap();
        assert_eq!(partial.games, 3);
        assert_eq!(partial.ot_n, 8);
    }

    #[test]
    fn unknown_criterion_is_an_error_record() {
        let r = criterion(13, &SuiteConfig::default());
        assert_eq!(r.status, crate::report::Status::Error);
    }

    #[test]
    fn first_criterion_passes() {
        let r = criterion(1, &SuiteConfig::default());
        assert_eq!(r.status, crate::report::Status::Pass, "{r:?}");
    }
}
