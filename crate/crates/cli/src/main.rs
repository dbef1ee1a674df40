//! `parlink` — evaluate inter-link codes, optimize timesharing, enumerate
//! matroid rank functions, and run the randomized experiment suites.
//!
//! Exit codes: 0 success, 1 usage error, 2 input validation error,
//! 3 numerical failure.

use clap::{Parser, Subcommand};
use parlink_core::experiments::{
    self, CandidateSource, StopRule, TrialConfig,
};
use parlink_core::lp::{self, LpResultJson};
use parlink_core::matroid::{enumerate_rank_functions, RankFunctionRecord};
use parlink_core::{Code, CodeLibrary, FieldOrder, Scenario, UpSet};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "parlink", version, about = "Coding and timesharing over parallel unreliable links")]
struct Cli {
    /// Worker threads for enumeration and experiments (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the expected per-unit payoff of a code under a scenario.
    EvalCode {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// Code text, e.g. "A,B,A+B".
        #[arg(long)]
        code: String,
        /// Prime field order for code coefficients.
        #[arg(long, default_value_t = 2)]
        field: u16,
        /// Also print the per-up-set recovery table.
        #[arg(long)]
        breakdown: bool,
    },
    /// Solve the timesharing LP for a scenario over a code library.
    Optimize {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// Code-library JSON file; defaults to the built-in 17-code library
        /// when the scenario has 3 links and 2 messages.
        #[arg(long)]
        codes: Option<PathBuf>,
    },
    /// Stream every valid rank function for m messages and n links as JSONL.
    EnumMatroids {
        #[arg(short)]
        m: usize,
        #[arg(short)]
        n: usize,
        /// Emit only the lexicographically minimal table per link-permutation
        /// orbit.
        #[arg(long)]
        dedup: bool,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep random general scenarios and count how often each of the 17
    /// codes is used in the LP optimum.
    Coverage {
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Test the systematic-code conjecture on random unit scenarios.
    Conjecture {
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(short, default_value_t = 3)]
        m: usize,
        #[arg(short, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        field: u16,
        /// Compare over the full rank-function enumeration instead of
        /// projective candidate codes.
        #[arg(long)]
        matroids: bool,
        /// Keep arrangements that the replacement rule would simplify.
        #[arg(long)]
        no_prune: bool,
    },
    /// Hunt for scenarios whose best candidates are all non-systematic.
    Hunt {
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(short, default_value_t = 3)]
        m: usize,
        #[arg(short, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        field: u16,
        /// Stop after recording this many counterexamples.
        #[arg(long)]
        stop_after: Option<usize>,
        /// Keep arrangements that the replacement rule would simplify.
        #[arg(long)]
        no_prune: bool,
    },
    /// Compare a Monte Carlo payoff estimate against the exact evaluator.
    McValidate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        code: String,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        field: u16,
    },
    /// Report whether a code is systematic, with per-portion witnesses.
    CheckSystematic {
        #[arg(long)]
        code: String,
        #[arg(long, default_value_t = 2)]
        field: u16,
    },
}

/// Round to 12 significant digits so printed numbers are stable text.
fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("rounded float parses")
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn load_scenario(path: &PathBuf) -> Result<Scenario, ExitCode> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))?;
    Scenario::from_json_str(&text)
        .map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn parse_field(q: u16) -> Result<FieldOrder, ExitCode> {
    FieldOrder::new(q).map_err(|e| fail(EXIT_INPUT, e))
}

fn parse_code(text: &str, field: FieldOrder) -> Result<Code, ExitCode> {
    Code::parse(text, field).map_err(|e| fail(EXIT_INPUT, format!("code {text:?}: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not usage errors.
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            return fail(EXIT_USAGE, format!("cannot configure {jobs} worker threads: {e}"));
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn run(command: Command) -> Result<(), ExitCode> {
    match command {
        Command::EvalCode { scenario, code, field, breakdown } => {
            let scenario = load_scenario(&scenario)?;
            let field = parse_field(field)?;
            let code = parse_code(&code, field)?;
            let payoff = code
                .payoff(&scenario)
                .map_err(|e| fail(EXIT_INPUT, e))?;
            if breakdown {
                let n = scenario.link_count();
                let portions = code.portions();
                let table = code.recovery_table();
                println!("{:>width$}  {:<16}  {:<20}  contribution", "upset", "prob", "recovered", width = n.max(5));
                for (mask, bits) in table.iter().enumerate() {
                    let s = UpSet(mask as u32);
                    let prob = scenario.upset_prob(s);
                    let recovered: Vec<String> = portions
                        .iter()
                        .enumerate()
                        .filter(|(t, _)| bits >> t & 1 == 1)
                        .map(|(_, p)| p.to_string())
                        .collect();
                    let worth: f64 = portions
                        .iter()
                        .enumerate()
                        .filter(|(t, _)| bits >> t & 1 == 1)
                        .map(|(_, p)| scenario.messages[p.message].worth_per_unit)
                        .sum();
                    println!(
                        "{:0width$b}  {:<16}  {:<20}  {}",
                        mask,
                        sig12(prob),
                        if recovered.is_empty() { "-".to_string() } else { recovered.join(",") },
                        sig12(prob * worth),
                        width = n.max(5)
                    );
                }
            }
            println!("{}", sig12(payoff));
            Ok(())
        }
        Command::Optimize { scenario, codes } => {
            let scenario = load_scenario(&scenario)?;
            let library = match codes {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        fail(EXIT_INPUT, format!("cannot read {}: {e}", path.display()))
                    })?;
                    CodeLibrary::from_json_str(&text)
                        .map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?
                }
                None => {
                    if scenario.link_count() == 3 && scenario.message_count() == 2 {
                        lp::build_17_code_library()
                    } else {
                        return Err(fail(
                            EXIT_INPUT,
                            "no built-in library for this shape; pass --codes",
                        ));
                    }
                }
            };
            let problem = lp::build_lp(&library, &scenario).map_err(|e| fail(EXIT_INPUT, e))?;
            let solution = solve_or_fail(&problem)?;
            let mut result = LpResultJson::new(&library, &solution, experiments::USED_TOL);
            result.objective = sig12(result.objective);
            for z in result.z.iter_mut() {
                *z = sig12(*z);
            }
            for used in result.used.iter_mut() {
                used.z = sig12(used.z);
            }
            println!("{}", serde_json::to_string(&result).expect("result serializes"));
            Ok(())
        }
        Command::EnumMatroids { m, n, dedup, out } => {
            let iter = enumerate_rank_functions(m, n).map_err(|e| fail(EXIT_INPUT, e))?;
            let mut sink: Box<dyn Write> = match out {
                Some(path) => Box::new(std::fs::File::create(&path).map_err(|e| {
                    fail(EXIT_INPUT, format!("cannot create {}: {e}", path.display()))
                })?),
                None => Box::new(std::io::stdout().lock()),
            };
            for rf in iter {
                if dedup && !rf.is_link_canonical() {
                    continue;
                }
                let record = RankFunctionRecord::from(&rf);
                let line = serde_json::to_string(&record).expect("record serializes");
                writeln!(sink, "{line}")
                    .map_err(|e| fail(EXIT_NUMERICAL, format!("write failed: {e}")))?;
            }
            Ok(())
        }
        Command::Coverage { trials, seed } => {
            let config = TrialConfig::new(2, 3, trials, seed);
            let report =
                experiments::coverage_experiment(&config).map_err(|e| fail(EXIT_INPUT, e))?;
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            Ok(())
        }
        Command::Conjecture { trials, seed, m, n, field, matroids, no_prune } => {
            parse_field(field)?;
            let config = TrialConfig::new(m, n, trials, seed).with_field(field);
            let source = if matroids {
                let rfs: Vec<_> = enumerate_rank_functions(m, n)
                    .map_err(|e| fail(EXIT_INPUT, e))?
                    .collect();
                CandidateSource::Matroids(rfs)
            } else {
                CandidateSource::ProjectiveCodes { prune: !no_prune }
            };
            let report = experiments::conjecture_experiment(&config, &source, StopRule::Exhaust)
                .map_err(|e| fail(EXIT_INPUT, e))?;
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            Ok(())
        }
        Command::Hunt { trials, seed, m, n, field, stop_after, no_prune } => {
            parse_field(field)?;
            let config = TrialConfig::new(m, n, trials, seed).with_field(field);
            let source = CandidateSource::ProjectiveCodes { prune: !no_prune };
            let stop = match stop_after {
                Some(k) => StopRule::AfterFound(k),
                None => StopRule::Exhaust,
            };
            let report = experiments::conjecture_experiment(&config, &source, stop)
                .map_err(|e| fail(EXIT_INPUT, e))?;
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            Ok(())
        }
        Command::McValidate { scenario, code, samples, seed, field } => {
            let scenario = load_scenario(&scenario)?;
            let field = parse_field(field)?;
            let code = parse_code(&code, field)?;
            if samples == 0 {
                return Err(fail(EXIT_INPUT, "at least one sample required"));
            }
            let analytic = code.payoff(&scenario).map_err(|e| fail(EXIT_INPUT, e))?;
            let estimate = experiments::mc_estimate_payoff(&code, &scenario, samples, seed);
            let sigmas = if estimate.stderr > 0.0 {
                (estimate.mean - analytic).abs() / estimate.stderr
            } else {
                0.0
            };
            let out = serde_json::json!({
                "mc": {
                    "mean": sig12(estimate.mean),
                    "stderr": sig12(estimate.stderr),
                    "samples": estimate.samples,
                    "degenerate": estimate.degenerate,
                },
                "analytic": sig12(analytic),
                "abs_error": sig12((estimate.mean - analytic).abs()),
                "sigmas": sig12(sigmas),
            });
            println!("{out}");
            Ok(())
        }
        Command::CheckSystematic { code, field } => {
            let field = parse_field(field)?;
            let code = parse_code(&code, field)?;
            for portion in code.portions() {
                let witness = code
                    .symbols()
                    .iter()
                    .position(|s| s.terms().len() == 1 && s.terms()[0].portion == portion);
                match witness {
                    Some(link) => println!("{portion}: alone on link {}", link + 1),
                    None => println!("{portion}: never alone"),
                }
            }
            println!("systematic: {}", code.is_systematic());
            Ok(())
        }
    }
}

fn solve_or_fail(problem: &parlink_core::LpProblem64) -> Result<parlink_core::LpSolution64, ExitCode> {
    lp::solve_lp(problem).map_err(|e| fail(EXIT_NUMERICAL, e))
}
