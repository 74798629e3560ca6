//! The 1CC-based commitment: honest commit/reveal, the sampling phase
//! under scripted deviations, and the extractor.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tails::{binomial_upper_tail, hoeffding_two_sided};
use crate::coding::{Bits, LinearCode, MAX_CODE_LEN};
use crate::error::{Error, Result};
use crate::quantum::random::seeded;

/// Largest `N` simulated in the sampling phase.
pub const MAX_SAMPLING_QUBITS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneCcParams {
    /// Number of qubits `N`.
    pub n: usize,
    /// Check probability.
    pub q: f64,
    /// Target relative distance of Bob's code.
    pub tau: f64,
    /// Minimum rate.
    pub r: f64,
    /// Sampling radius.
    pub delta: f64,
}

impl OneCcParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.n > 0
            && self.q > 0.0
            && self.q <= 1.0
            && self.tau > 0.0
            && self.delta > 0.0
            && (0.0..1.0).contains(&self.r);
        if !ok {
            return Err(Error::Input(format!("invalid 1CC parameters {self:?}")));
        }
        Ok(())
    }

    /// Alice aborts when Bob checked more than `2qN` positions.
    pub fn abort_threshold(&self) -> f64 {
        2.0 * self.q * self.n as f64
    }

    /// `√(4 exp(−q²δ²N/8))`, carried into reports but never certified.
    pub fn sampling_epsilon(&self) -> f64 {
        (4.0 * (-(self.q * self.delta).powi(2) * self.n as f64 / 8.0).exp()).sqrt()
    }
}

/// What Bob holds after the commit phase, together with the 1CC record.
#[derive(Clone, Debug, Serialize)]
pub struct OneCcView {
    pub theta: Bits,
    /// Checked positions, increasing.
    pub checked: Vec<usize>,
    pub code: Option<crate::coding::CodeFile>,
    pub g: Bits,
    pub s: Bits,
    pub w: bool,
}

impl OneCcView {
    pub fn unchecked(&self) -> Vec<usize> {
        (0..self.theta.len()).filter(|i| !self.checked.contains(i)).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OneCcRun {
    pub params: OneCcParams,
    pub b: bool,
    pub view: OneCcView,
    pub bob_aborted: bool,
    pub alice_aborted: bool,
    /// Whether Bob's sampled code reached `d ≥ τn` within the retry budget.
    pub distance_target_met: bool,
}

const CODE_ATTEMPTS: usize = 64;

/// Honest commit. Bob's code is random with `k = ⌈rn⌉`, resampled until
/// `d ≥ ⌈τn⌉` or the retry budget runs out.
pub fn onecc_commit(params: &OneCcParams, b: bool, seed: u64) -> Result<OneCcRun> {
    params.validate()?;
    if params.n > MAX_CODE_LEN {
        return Err(Error::CapExceeded(format!("full 1CC runs need N ≤ {MAX_CODE_LEN}")));
    }
    let mut rng = seeded(seed);
    let n_total = params.n;
    let theta = Bits::new(n_total, rng.random::<u64>() & low_mask(n_total))?;
    let checked: Vec<usize> = (0..n_total).filter(|_| rng.random_bool(params.q)).collect();
    // Honest |0⟩_θ measured in basis θ always yields 0.
    let bob_aborted = false;
    let alice_aborted = checked.len() as f64 > params.abort_threshold();
    let unchecked: Vec<usize> = (0..n_total).filter(|i| !checked.contains(i)).collect();
    let n = unchecked.len();
    let mut view = OneCcView {
        theta,
        checked,
        code: None,
        g: Bits::zeros(n),
        s: Bits::zeros(0),
        w: b,
    };
    if alice_aborted || n == 0 {
        return Ok(OneCcRun {
            params: *params,
            b,
            view,
            bob_aborted,
            alice_aborted: true,
            distance_target_met: false,
        });
    }
    let k = ((params.r * n as f64).ceil() as usize).clamp(1, n);
    let target = (params.tau * n as f64).ceil() as usize;
    let mut code = LinearCode::random(n, k, &mut rng)?;
    for _ in 1..CODE_ATTEMPTS {
        if code.d() >= target {
            break;
        }
        code = LinearCode::random(n, k, &mut rng)?;
    }
    let theta_bar = view.theta.select(&unchecked);
    view.g = Bits::new(n, rng.random::<u64>() & low_mask(n))?;
    view.s = code.syndrome(&theta_bar)?;
    view.w = view.g.dot(&theta_bar) ^ b;
    let met = code.d() >= target;
    view.code = Some(crate::coding::CodeFile::from_code(&code));
    Ok(OneCcRun {
        params: *params,
        b,
        view,
        bob_aborted,
        alice_aborted,
        distance_target_met: met,
    })
}

/// Bob's reveal checks for an opening `(θ_t̄, b)`. `prepared` holds the
/// bases the unchecked qubits `|0⟩` were actually prepared in; measuring in
/// another basis gives a fair coin.
pub fn onecc_reveal<R: Rng + ?Sized>(
    view: &OneCcView,
    theta_bar: &Bits,
    b: bool,
    prepared: &Bits,
    rng: &mut R,
) -> Result<bool> {
    let unchecked = view.unchecked();
    let code = view
        .code
        .as_ref()
        .ok_or_else(|| Error::Protocol("no code: commit aborted".into()))?
        .to_code()?;
    if theta_bar.len() != unchecked.len() || prepared.len() != unchecked.len() {
        return Err(Error::DimensionMismatch("opening length differs from |t̄|".into()));
    }
    let outcomes_ok = (0..theta_bar.len()).all(|i| theta_bar.get(i) == prepared.get(i) || !rng.random_bool(0.5));
    Ok(outcomes_ok && code.syndrome(theta_bar)? == view.s && (view.g.dot(theta_bar) ^ view.w) == b)
}

/// `c(t, θ, g, s, w) = g(θ') ⊕ w` with `θ'` the syndrome-`s` string nearest
/// to `θ_t̄`.
pub fn extractor(view: &OneCcView) -> Result<bool> {
    let code = view
        .code
        .as_ref()
        .ok_or_else(|| Error::Protocol("no code: commit aborted".into()))?
        .to_code()?;
    let theta_bar = view.theta.select(&view.unchecked());
    if theta_bar.len() != code.n() || view.g.len() != code.n() || view.s.len() != code.n() - code.k() {
        return Err(Error::DimensionMismatch(
            "view lengths are inconsistent with the code".into(),
        ));
    }
    let theta_prime = code.nearest_coset_rep(&view.s, &theta_bar)?;
    Ok(view.g.dot(&theta_prime) ^ view.w)
}

/// Deviations a scripted Alice applies to single positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Deviation {
    /// Sends `|1⟩_θ`: a check fails with certainty.
    Flip,
    /// Sends `|0⟩_{1−θ}`: a check fails with probability ½.
    WrongBasis,
}

impl Deviation {
    pub fn failure_probability(self) -> f64 {
        match self {
            Deviation::Flip => 1.0,
            Deviation::WrongBasis => 0.5,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ScriptedAdversary {
    pub deviations: Vec<(usize, Deviation)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SamplingStats {
    pub runs: usize,
    pub bob_aborts: usize,
    /// `1 − Π_i (1 − q f_i)` over deviating positions.
    pub bob_abort_exact: f64,
    /// Runs with `|t| > 2qN`, counted whether or not Bob aborted first.
    pub alice_aborts: usize,
    pub alice_abort_frequency: f64,
    /// `Pr[Bin(N, q) > 2qN]`.
    pub alice_abort_exact: f64,
    /// `2 exp(−2q²N)`.
    pub hoeffding_bound: f64,
    pub sigma: f64,
    pub tail_pass: bool,
    pub checks: Vec<usize>,
    pub check_failures: Vec<usize>,
    pub sampling_epsilon: f64,
}

/// Steps 1–3 repeated `runs` times with classical per-position sampling.
pub fn simulate_commit_1cc(
    params: &OneCcParams,
    adversary: &ScriptedAdversary,
    seed: u64,
    runs: usize,
) -> Result<SamplingStats> {
    params.validate()?;
    let n = params.n;
    if n > MAX_SAMPLING_QUBITS {
        return Err(Error::CapExceeded(format!(
            "sampling simulation needs N ≤ {MAX_SAMPLING_QUBITS}"
        )));
    }
    let mut script = vec![None; n];
    for &(pos, dev) in &adversary.deviations {
        if pos >= n {
            return Err(Error::Input(format!("deviation at position {pos} ≥ N = {n}")));
        }
        script[pos] = Some(dev);
    }
    let mut rng = seeded(seed);
    let mut checks = vec![0; n];
    let mut check_failures = vec![0; n];
    let (mut bob_aborts, mut alice_aborts) = (0, 0);
    let threshold = params.abort_threshold();
    for _ in 0..runs {
        let mut count = 0usize;
        let mut failed = false;
        for i in 0..n {
            if !rng.random_bool(params.q) {
                continue;
            }
            count += 1;
            checks[i] += 1;
            if let Some(dev) = script[i] {
                if rng.random_bool(dev.failure_probability()) {
                    check_failures[i] += 1;
                    failed = true;
                }
            }
        }
        bob_aborts += usize::from(failed);
        alice_aborts += usize::from(count as f64 > threshold);
    }
    let bob_abort_exact = 1.0
        - script
            .iter()
            .flatten()
            .map(|d| 1.0 - params.q * d.failure_probability())
            .product::<f64>();
    let runs_f = runs.max(1) as f64;
    let alice_abort_frequency = alice_aborts as f64 / runs_f;
    let hoeffding_bound = hoeffding_two_sided(n, params.q);
    let p = hoeffding_bound.min(1.0);
    let sigma = (p * (1.0 - p) / runs_f).sqrt();
    Ok(SamplingStats {
        runs,
        bob_aborts,
        bob_abort_exact,
        alice_aborts,
        alice_abort_frequency,
        alice_abort_exact: binomial_upper_tail(n, params.q, threshold)?,
        hoeffding_bound,
        sigma,
        tail_pass: alice_abort_frequency <= p + 3.0 * sigma,
        checks,
        check_failures,
        sampling_epsilon: params.sampling_epsilon(),
    })
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, q: f64) -> OneCcParams {
        OneCcParams {
            n,
            q,
            tau: 0.2,
            r: 0.5,
            delta: 0.1,
        }
    }

    #[test]
    fn honest_runs_are_accepted_and_extracted() {
        let mut completed = 0;
        for seed in 0..40 {
            for b in [false, true] {
                let run = onecc_commit(&params(16, 0.1), b, seed).unwrap();
                assert!(!run.bob_aborted);
                if run.alice_aborted {
                    continue;
                }
                completed += 1;
                let theta_bar = run.view.theta.select(&run.view.unchecked());
                let mut rng = seeded(seed);
                assert!(onecc_reveal(&run.view, &theta_bar, b, &theta_bar, &mut rng).unwrap());
                assert!(!onecc_reveal(&run.view, &theta_bar, !b, &theta_bar, &mut rng).unwrap());
                assert_eq!(extractor(&run.view).unwrap(), b);
            }
        }
        assert!(completed > 60);
    }

    #[test]
    fn honest_sampling_never_aborts_in_checks() {
        let s = simulate_commit_1cc(&params(40, 0.5), &ScriptedAdversary::default(), 3, 2000).unwrap();
        assert_eq!(s.bob_aborts, 0);
        assert_eq!(s.alice_aborts, 0);
        assert_eq!(s.alice_abort_exact, 0.0);
    }

    #[test]
    fn invalid_parameters() {
        assert!(params(0, 0.1).validate().is_err());
        assert!(OneCcParams {
            r: 1.0,
            ..params(4, 0.1)
        }
        .validate()
        .is_err());
        assert!(simulate_commit_1cc(&params(65, 0.1), &ScriptedAdversary::default(), 0, 1).is_err());
    }
}
