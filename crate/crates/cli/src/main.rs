use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qadapt::coding::Bits;
use qadapt::games::DEFAULT_GAME_TOL;
use qadapt::protocols::OneCcParams;
use qadapt_cli::commands::{self, load_json, CmdResult, UsageError};
use qadapt_cli::report::ExperimentReport;
use qadapt_cli::suite::{budget_from_env, verify_selected, SuiteConfig, CRITERIA};

#[derive(Parser)]
#[command(
    name = "qadapt",
    version,
    about = "Certified checks for adaptive attacks on quantum games and commitments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_GAME_TOL)]
    tol: f64,
    /// Search or enumeration budget; falls back to $QADAPT_BUDGET.
    #[arg(long)]
    budget: Option<usize>,
    /// Full JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
    /// One row per asserted inequality.
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl Common {
    fn budget(&self, fallback: usize) -> CmdResult<usize> {
        match self.budget {
            Some(b) => Ok(b),
            None => Ok(budget_from_env().map_err(UsageError)?.unwrap_or(fallback)),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Adaptive versus non-adaptive success for attack games.
    Game {
        /// Number of seeded random games.
        #[arg(long, conflicts_with = "input")]
        random: Option<usize>,
        /// `{"state": .., "family": ..}`.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Storage reduction for a projective commitment scheme.
    Binding {
        #[arg(long)]
        scheme: PathBuf,
        /// Adversary memory in qubits (at most 2).
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 8)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Sampling phase and one honest commit of the 1CC-based commitment.
    Onecc {
        #[arg(long, default_value_t = 24)]
        n: usize,
        #[arg(long, default_value_t = 0.25)]
        q: f64,
        #[arg(long, default_value_t = 0.1)]
        tau: f64,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 20_000)]
        runs: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Non-adaptive binding of BCJL_delta.
    Bcjl {
        #[arg(long)]
        n: usize,
        /// `hamming74`, `repetition`, or a code file.
        #[arg(long, default_value = "hamming74")]
        code: String,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Hash, syndrome and masked bit; drawn from the seed when omitted.
        #[arg(long, requires_all = ["s", "w"])]
        g: Option<Bits>,
        #[arg(long, requires = "g")]
        s: Option<Bits>,
        #[arg(long, requires = "g")]
        w: Option<u8>,
        #[command(flatten)]
        common: Common,
    },
    /// Replay a protocol scenario, or compare real and ideal executions.
    Uc {
        #[arg(long, conflicts_with = "demo")]
        scenario: Option<PathBuf>,
        /// Built-in adversary script, e.g. `sender:garbage`.
        #[arg(long)]
        demo: Option<String>,
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Transcript as JSON lines; standard output when omitted.
        #[arg(long)]
        transcript: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Accessible max-information of a bipartite state.
    Info {
        #[arg(long)]
        state: PathBuf,
        /// Labels of the adversary register.
        #[arg(long, value_delimiter = ',', default_value = "A")]
        a: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// The full acceptance battery.
    VerifyAll {
        /// Suite configuration; unset fields keep their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Subset of criteria, e.g. `1,2,5`.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u32>,
        #[command(flatten)]
        common: Common,
    },
}

fn run(cli: Cli) -> CmdResult<(ExperimentReport, Common)> {
    Ok(match cli.command {
        Command::Game { random, input, common } => {
            let budget = common.budget(4)?;
            let report = match (random, &input) {
                (_, Some(path)) => commands::game_file(path, common.seed, common.tol, budget)?,
                (Some(n), None) => commands::game_random(n, common.seed, common.tol, budget),
                (None, None) => return Err(UsageError("game needs --random N or --input FILE".into())),
            };
            (report, common)
        }
        Command::Binding {
            scheme,
            q,
            trials,
            common,
        } => (commands::binding(&scheme, q, trials, common.seed)?, common),
        Command::Onecc {
            n,
            q,
            tau,
            r,
            delta,
            runs,
            common,
        } => {
            let params = OneCcParams { n, q, tau, r, delta };
            params.validate().map_err(|e| UsageError(e.to_string()))?;
            (commands::onecc(params, runs, common.seed), common)
        }
        Command::Bcjl {
            n,
            code,
            delta,
            g,
            s,
            w,
            common,
        } => {
            let code = commands::parse_code(&code, n)?;
            let hash = match (g, s, w) {
                (Some(g), Some(s), Some(w)) if w <= 1 => Some((g, s, w == 1)),
                (Some(_), Some(_), Some(_)) => return Err(UsageError("--w must be 0 or 1".into())),
                _ => None,
            };
            let budget = common.budget(4096)?;
            (commands::bcjl(&code, delta, hash, budget, common.seed)?, common)
        }
        Command::Uc {
            scenario,
            demo,
            runs,
            n,
            transcript,
            common,
        } => {
            let report = match (&scenario, &demo) {
                (Some(path), _) => {
                    let (report, t) = commands::uc_scenario(path, common.seed)?;
                    let lines = t.to_json_lines().map_err(|e| UsageError(e.to_string()))?;
                    match &transcript {
                        Some(p) => std::fs::write(p, lines)
                            .map_err(|e| UsageError(format!("cannot write {}: {e}", p.display())))?,
                        None => print!("{lines}"),
                    }
                    report
                }
                (None, Some(script)) => commands::uc_demo(script, runs, n, common.seed)?,
                (None, None) => return Err(UsageError("uc needs --scenario FILE or --demo SCRIPT".into())),
            };
            (report, common)
        }
        Command::Info { state, a, common } => {
            let budget = common.budget(qadapt::info::DEFAULT_SEARCH_BUDGET)?;
            (commands::info(&state, &a, budget, common.seed)?, common)
        }
        Command::VerifyAll {
            config,
            criteria,
            common,
        } => {
            let mut cfg: SuiteConfig = match &config {
                Some(p) => load_json(p)?,
                None => SuiteConfig::default(),
            };
            if config.is_none() || common.seed != 1 {
                cfg.seed = common.seed;
            }
            if let Some(b) = common.budget {
                cfg.enum_budget = b;
            } else if let Some(b) = budget_from_env().map_err(UsageError)? {
                cfg.enum_budget = b;
            }
            if let Some(k) = criteria.iter().find(|k| !CRITERIA.iter().any(|c| c.0 == **k)) {
                return Err(UsageError(format!("no criterion {k}; known 1-{}", CRITERIA.len())));
            }
            let which: Vec<u32> = if criteria.is_empty() {
                CRITERIA.iter().map(|c| c.0).collect()
            } else {
                criteria
            };
            (verify_selected(&cfg, &which), common)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, common) = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    print!("{}", commands::summary(&report));
    let written = (|| -> CmdResult<()> {
        if let Some(path) = &common.out {
            let text = report.to_json().map_err(|e| UsageError(e.to_string()))?;
            std::fs::write(path, text).map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))?;
        }
        if let Some(path) = &common.csv {
            commands::write_csv(&report, path)?;
        }
        Ok(())
    })();
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.exit_code() as u8)
}
