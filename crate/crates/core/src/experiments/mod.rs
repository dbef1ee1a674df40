//! Seeded randomized experiments: LP code-coverage sweeps, best-code
//! conjecture trials with counterexample hunting, and Monte Carlo validation
//! of the exact payoff evaluator.
//!
//! Determinism contract: every per-trial RNG stream is derived from
//! `(seed, trial index)`, so reports are identical run-to-run of one build,
//! serial or parallel.

pub mod candidates;

use crate::code::Code;
use crate::lp::{build_lp, build_17_code_library, solve_lp, LpError};
use crate::matroid::{RankFunction, RankFunctionRecord};
use crate::model::{LinkSpec, MessageSpec, Scenario, UpSet};
use candidates::{CandidateClasses, CandidateError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance for payoff ties: candidates this close to the maximum
/// are treated as joint winners so float noise cannot fabricate a strict win.
pub const TIE_REL_TOL: f64 = 1e-9;

/// Mass threshold for counting a code as used in an LP optimum.
pub const USED_TOL: f64 = 1e-6;

/// Trials processed between stop-rule checks; fixed so early stopping is
/// deterministic.
const TRIAL_CHUNK: u64 = 512;

/// Shared experiment parameters. Worth bounds default to the `[1, 100]`
/// range used throughout the random trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub m: usize,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub worth_low: f64,
    pub worth_high: f64,
    pub field: u16,
}

impl TrialConfig {
    pub fn new(m: usize, n: usize, trials: u64, seed: u64) -> Self {
        TrialConfig { m, n, trials, seed, worth_low: 1.0, worth_high: 100.0, field: 2 }
    }

    pub fn with_field(mut self, q: u16) -> Self {
        self.field = q;
        self
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.trials == 0 {
            return Err(ExperimentError::NoTrials);
        }
        if !(self.worth_low <= self.worth_high) {
            return Err(ExperimentError::WorthRange {
                low: self.worth_low,
                high: self.worth_high,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("at least one trial is required")]
    NoTrials,
    #[error("worth range [{low}, {high}] is empty")]
    WorthRange { low: f64, high: f64 },
    #[error(transparent)]
    Candidates(#[from] CandidateError),
    #[error("lp solve failed in trial {trial}: {source}")]
    Lp { trial: u64, source: LpError },
}

/// Independent, reproducible RNG stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    // splitmix64 over (seed, trial) so streams are decorrelated.
    let mut z = seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Unit-capacity, unit-size scenario with outage probabilities uniform on
/// (0,1) and worths uniform on `[worth_low, worth_high]`. Draw order: all
/// probabilities, then all worths.
pub fn random_scenario(
    rng: &mut impl Rng,
    m: usize,
    n: usize,
    config: &TrialConfig,
) -> Scenario {
    let links = (0..n)
        .map(|_| LinkSpec { capacity: 1.0, outage_prob: rng.gen::<f64>() })
        .collect();
    let messages = (0..m)
        .map(|_| MessageSpec {
            size: 1.0,
            worth_per_unit: rng.gen_range(config.worth_low..=config.worth_high),
        })
        .collect();
    Scenario { links, messages }
}

/// General scenario for the coverage sweep: capacities and sizes uniform on
/// (0, 2], probabilities and worths as in [`random_scenario`]. Draw order:
/// probabilities, worths, capacities, sizes.
pub fn random_general_scenario(
    rng: &mut impl Rng,
    m: usize,
    n: usize,
    config: &TrialConfig,
) -> Scenario {
    let mut scenario = random_scenario(rng, m, n, config);
    for link in scenario.links.iter_mut() {
        link.capacity = 2.0 * (1.0 - rng.gen::<f64>());
    }
    for msg in scenario.messages.iter_mut() {
        msg.size = 2.0 * (1.0 - rng.gen::<f64>());
    }
    scenario
}

/// Indices of all candidates whose payoff ties the maximum within
/// [`TIE_REL_TOL`], plus the maximum itself.
pub fn best_candidate_codes(codes: &[Code], scenario: &Scenario) -> (Vec<usize>, f64) {
    let payoffs: Vec<f64> = codes
        .iter()
        .map(|c| c.payoff(scenario).expect("candidate dimensions match"))
        .collect();
    tie_set(&payoffs)
}

/// Rank-function flavour of [`best_candidate_codes`].
pub fn best_candidate_matroids(rfs: &[RankFunction], scenario: &Scenario) -> (Vec<usize>, f64) {
    let payoffs: Vec<f64> = rfs
        .iter()
        .map(|rf| rf.payoff(scenario).expect("candidate dimensions match"))
        .collect();
    tie_set(&payoffs)
}

fn tie_tol(best: f64) -> f64 {
    TIE_REL_TOL * (1.0 + best.abs())
}

fn tie_set(payoffs: &[f64]) -> (Vec<usize>, f64) {
    assert!(!payoffs.is_empty(), "candidate list must be nonempty");
    let best = payoffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = tie_tol(best);
    let ties = (0..payoffs.len()).filter(|&k| payoffs[k] >= best - tol).collect();
    (ties, best)
}

/// Per-code usage counts over the LP coverage sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageReport {
    pub config: TrialConfig,
    /// How capacities and sizes were drawn, for the record.
    pub distribution: String,
    pub codes: Vec<String>,
    /// Trials in which each code carried mass above [`USED_TOL`].
    pub usage_counts: Vec<u64>,
    pub never_used: Vec<String>,
}

/// Solve the 17-code LP over random general scenarios and count, per code,
/// the trials where it appears in the optimum.
pub fn coverage_experiment(config: &TrialConfig) -> Result<CoverageReport, ExperimentError> {
    config.validate()?;
    assert_eq!(config.m, 2, "coverage sweep is defined for the 17-code library");
    assert_eq!(config.n, 3, "coverage sweep is defined for the 17-code library");
    let library = build_17_code_library();
    let used_per_trial: Result<Vec<Vec<usize>>, ExperimentError> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(config.seed, trial);
            let scenario = random_general_scenario(&mut rng, config.m, config.n, config);
            let problem = build_lp(&library, &scenario)
                .map_err(|source| ExperimentError::Lp { trial, source })?;
            let solution =
                solve_lp(&problem).map_err(|source| ExperimentError::Lp { trial, source })?;
            Ok(solution.used_codes(USED_TOL))
        })
        .collect();
    let mut usage_counts = vec![0u64; library.len()];
    for used in used_per_trial? {
        for k in used {
            usage_counts[k] += 1;
        }
    }
    let codes: Vec<String> = library.codes().iter().map(|c| c.to_string()).collect();
    let never_used = codes
        .iter()
        .zip(&usage_counts)
        .filter(|(_, &n)| n == 0)
        .map(|(c, _)| c.clone())
        .collect();
    Ok(CoverageReport {
        config: config.clone(),
        distribution: "capacities and sizes i.i.d. uniform on (0,2]; outage probabilities \
                       uniform on (0,1); worths uniform on [worth_low, worth_high]"
            .to_string(),
        codes,
        usage_counts,
        never_used,
    })
}

/// The candidate pool for a conjecture run.
pub enum CandidateSource {
    /// Projective single-portion codes; the comparison closes the pool under
    /// link permutation, since the best arrangement depends on the scenario.
    ProjectiveCodes { prune: bool },
    /// An explicit rank-function list (e.g. a full matroid enumeration),
    /// taken as-is.
    Matroids(Vec<RankFunction>),
}

/// One recorded conjecture violation: a scenario where every payoff-maximal
/// candidate is non-systematic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: u64,
    pub scenario: Scenario,
    /// Representatives of the tying payoff classes: code text, or rank
    /// function records for matroid candidates.
    pub best_codes: Vec<String>,
    /// Distinct column multisets in the tie set, each shown as the code with
    /// columns in canonical order. Empty for matroid candidates.
    pub best_multisets: Vec<String>,
    pub best_payoff: f64,
    /// Best payoff any systematic candidate achieves on this scenario.
    pub best_systematic_payoff: f64,
    /// `best_payoff - best_systematic_payoff`; positive by construction.
    pub margin: f64,
    /// Always false for recorded counterexamples: no tying candidate is
    /// systematic.
    pub tie_set_systematic: bool,
}

/// Outcome of a conjecture run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub config: TrialConfig,
    pub candidate_kind: String,
    /// Payoff-distinct candidate classes compared per trial.
    pub class_count: usize,
    /// Arrangements (or rank functions) behind those classes.
    pub candidate_count: u64,
    pub trials_run: u64,
    pub counterexamples: Vec<Counterexample>,
}

/// When to cut a conjecture run short. Checks happen between fixed-size
/// trial chunks, so stopping is deterministic.
pub enum StopRule<'a> {
    /// Run every configured trial.
    Exhaust,
    /// Stop once at least this many counterexamples are recorded.
    AfterFound(usize),
    /// Stop once any recorded counterexample satisfies the predicate.
    When(&'a (dyn Fn(&Counterexample) -> bool + Sync)),
}

/// Run seeded random unit scenarios and record every one whose entire best
/// tie set is non-systematic.
pub fn conjecture_experiment(
    config: &TrialConfig,
    source: &CandidateSource,
    stop: StopRule<'_>,
) -> Result<CounterexampleReport, ExperimentError> {
    config.validate()?;
    let (classes, rank_list, candidate_kind) = match source {
        CandidateSource::ProjectiveCodes { prune } => {
            let field = crate::gf::FieldOrder::new(config.field)
                .expect("config carries a valid field");
            let classes =
                CandidateClasses::from_code_tuples(config.m, config.n, field, *prune)?;
            let kind = format!(
                "projective codes over GF({}){}",
                config.field,
                if *prune { ", reducible arrangements pruned" } else { "" }
            );
            (classes, None, kind)
        }
        CandidateSource::Matroids(rfs) => (
            CandidateClasses::from_rank_functions(rfs)?,
            Some(rfs.as_slice()),
            "rank-function list".to_string(),
        ),
    };

    let mut counterexamples: Vec<Counterexample> = Vec::new();
    let mut trials_run = 0u64;
    while trials_run < config.trials {
        let chunk_end = (trials_run + TRIAL_CHUNK).min(config.trials);
        let mut found: Vec<Counterexample> = (trials_run..chunk_end)
            .into_par_iter()
            .filter_map(|trial| run_conjecture_trial(config, &classes, rank_list, trial))
            .collect();
        found.sort_by_key(|c| c.trial);
        counterexamples.extend(found);
        trials_run = chunk_end;
        let done = match stop {
            StopRule::Exhaust => false,
            StopRule::AfterFound(k) => counterexamples.len() >= k,
            StopRule::When(pred) => counterexamples.iter().any(|c| pred(c)),
        };
        if done {
            break;
        }
    }
    Ok(CounterexampleReport {
        config: config.clone(),
        candidate_kind,
        class_count: classes.classes.len(),
        candidate_count: classes.arrangement_count,
        trials_run,
        counterexamples,
    })
}

fn run_conjecture_trial(
    config: &TrialConfig,
    classes: &CandidateClasses,
    rank_list: Option<&[RankFunction]>,
    trial: u64,
) -> Option<Counterexample> {
    let mut rng = trial_rng(config.seed, trial);
    let scenario = random_scenario(&mut rng, config.m, config.n, config);
    let (tie, best, best_systematic) = evaluate_classes(classes, &scenario);
    if tie.iter().any(|&at| classes.classes[at].any_systematic) {
        return None;
    }
    // The whole tie set is non-systematic; require a strict margin over the
    // best systematic candidate.
    let margin = best - best_systematic;
    if margin <= tie_tol(best) {
        return None;
    }
    let mut best_codes = Vec::new();
    let mut best_multisets: Vec<String> = Vec::new();
    for &at in &tie {
        let class = &classes.classes[at];
        match rank_list {
            None => {
                best_codes.push(classes.code_of_tuple(&class.representative).to_string());
                for multiset in &class.multisets {
                    let text = classes.code_of_tuple(multiset).to_string();
                    if !best_multisets.contains(&text) {
                        best_multisets.push(text);
                    }
                }
            }
            Some(rfs) => {
                let member = &rfs[class.rank_members[0]];
                best_codes.push(
                    serde_json::to_string(&RankFunctionRecord::from(member))
                        .expect("record serializes"),
                );
            }
        }
    }
    Some(Counterexample {
        trial,
        scenario,
        best_codes,
        best_multisets,
        best_payoff: best,
        best_systematic_payoff: best_systematic,
        margin,
        tie_set_systematic: false,
    })
}

/// Payoffs of every class on one scenario: returns the tie set of maximal
/// classes, the best payoff, and the best payoff among systematic classes.
fn evaluate_classes(
    classes: &CandidateClasses,
    scenario: &Scenario,
) -> (Vec<usize>, f64, f64) {
    let n = classes.n;
    let probs: Vec<f64> = UpSet::enumerate(n).map(|s| scenario.upset_prob(s)).collect();
    let worths: Vec<f64> =
        scenario.messages.iter().map(|m| m.worth_per_unit).collect();
    let mut best = f64::NEG_INFINITY;
    let mut best_systematic = f64::NEG_INFINITY;
    let mut payoffs = Vec::with_capacity(classes.classes.len());
    for class in &classes.classes {
        let mut payoff = 0.0;
        for (j, &worth) in worths.iter().enumerate() {
            let mut mask = class.message_masks[j];
            let mut p = 0.0;
            while mask != 0 {
                let s = mask.trailing_zeros() as usize;
                mask &= mask - 1;
                p += probs[s];
            }
            payoff += worth * p;
        }
        payoffs.push(payoff);
        best = best.max(payoff);
        if class.any_systematic {
            best_systematic = best_systematic.max(payoff);
        }
    }
    let tol = tie_tol(best);
    let tie = (0..payoffs.len()).filter(|&k| payoffs[k] >= best - tol).collect();
    (tie, best, best_systematic)
}

/// Monte Carlo estimate of a code's expected payoff.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    /// Set when the sample count cannot support a standard error.
    pub degenerate: bool,
}

/// Estimate the payoff by sampling link up-patterns with independent
/// Bernoulli draws per link and decoding each sample exactly.
pub fn mc_estimate_payoff(
    code: &Code,
    scenario: &Scenario,
    samples: u64,
    seed: u64,
) -> McEstimate {
    assert!(samples >= 1, "at least one sample required");
    let n = scenario.link_count();
    let table = code.recovery_table();
    let portions = code.portions();
    // Recovered worth per up-pattern, so each sample is a table lookup.
    let worth_by_upset: Vec<f64> = table
        .iter()
        .map(|&bits| {
            let mut w = 0.0;
            let mut rest = bits;
            while rest != 0 {
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                w += scenario.messages[portions[t].message].worth_per_unit;
            }
            w
        })
        .collect();
    let up_probs: Vec<f64> = scenario.links.iter().map(|l| l.up_prob()).collect();
    let mut rng = trial_rng(seed, 0);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let mut mask = 0usize;
        for (i, &p) in up_probs.iter().enumerate().take(n) {
            if rng.gen_bool(p) {
                mask |= 1 << i;
            }
        }
        let x = worth_by_upset[mask];
        sum += x;
        sum_sq += x * x;
    }
    let count = samples as f64;
    let mean = sum / count;
    if samples == 1 {
        return McEstimate { mean, stderr: 0.0, samples, degenerate: true };
    }
    let variance = ((sum_sq - count * mean * mean) / (count - 1.0)).max(0.0);
    McEstimate {
        mean,
        stderr: (variance / count).sqrt(),
        samples,
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldOrder;
    use crate::model::unit_scenario;

    #[test]
    fn trial_rng_is_deterministic_and_decorrelated() {
        let a: Vec<u64> = (0..4).map(|_| trial_rng(7, 0).gen()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(trial_rng(7, 0).gen::<u64>(), trial_rng(7, 1).gen::<u64>());
        assert_ne!(trial_rng(7, 0).gen::<u64>(), trial_rng(8, 0).gen::<u64>());
    }

    #[test]
    fn random_scenario_reproducible() {
        let config = TrialConfig::new(2, 3, 1, 42);
        let a = random_scenario(&mut trial_rng(42, 5), 2, 3, &config);
        let b = random_scenario(&mut trial_rng(42, 5), 2, 3, &config);
        assert_eq!(a, b);
    }

    #[test]
    fn random_scenario_mean_probability() {
        let config = TrialConfig::new(1, 1, 1, 0);
        let mut rng = trial_rng(0, 0);
        let mean: f64 = (0..10_000)
            .map(|_| random_scenario(&mut rng, 1, 1, &config).links[0].outage_prob)
            .sum::<f64>()
            / 10_000.0;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn random_scenario_fixed_worth() {
        let mut config = TrialConfig::new(2, 2, 1, 3);
        config.worth_low = 1.0;
        config.worth_high = 1.0;
        let s = random_scenario(&mut trial_rng(3, 0), 2, 2, &config);
        assert!(s.messages.iter().all(|m| m.worth_per_unit == 1.0));
    }

    #[test]
    fn general_scenario_ranges() {
        let config = TrialConfig::new(2, 3, 1, 9);
        let mut rng = trial_rng(9, 0);
        for _ in 0..200 {
            let s = random_general_scenario(&mut rng, 2, 3, &config);
            for link in &s.links {
                assert!(link.capacity > 0.0 && link.capacity <= 2.0);
            }
            for msg in &s.messages {
                assert!(msg.size > 0.0 && msg.size <= 2.0);
                assert!((1.0..=100.0).contains(&msg.worth_per_unit));
            }
        }
    }

    #[test]
    fn best_candidate_single() {
        let code = Code::parse("A", FieldOrder::BINARY).unwrap();
        let scenario = unit_scenario(&[0.5], &[1.0]);
        let (tie, best) = best_candidate_codes(&[code], &scenario);
        assert_eq!(tie, vec![0]);
        assert!((best - 0.5).abs() < 1e-12);
    }

    #[test]
    fn best_candidate_triple_beats_single() {
        let triple = Code::parse("A,A,A", FieldOrder::BINARY).unwrap();
        let single = Code::parse("A,-,-", FieldOrder::BINARY).unwrap();
        let scenario = unit_scenario(&[0.3, 0.4, 0.5], &[2.0]);
        let (tie, _) = best_candidate_codes(&[single, triple], &scenario);
        assert_eq!(tie, vec![1]);
    }

    #[test]
    fn best_candidate_duplicates_tie() {
        let code = Code::parse("A,A", FieldOrder::BINARY).unwrap();
        let scenario = unit_scenario(&[0.3, 0.4], &[2.0]);
        let (tie, _) = best_candidate_codes(&[code.clone(), code], &scenario);
        assert_eq!(tie, vec![0, 1]);
    }

    #[test]
    fn mc_estimate_exact_when_links_never_fail() {
        let code = Code::parse("A,B,A+B", FieldOrder::BINARY).unwrap();
        let scenario = unit_scenario(&[0.0, 0.0, 0.0], &[2.0, 1.0]);
        let est = mc_estimate_payoff(&code, &scenario, 1000, 77);
        assert_eq!(est.mean, 3.0);
        assert_eq!(est.stderr, 0.0);
        assert!(!est.degenerate);
    }

    #[test]
    fn mc_estimate_single_sample_degenerate() {
        let code = Code::parse("A", FieldOrder::BINARY).unwrap();
        let scenario = unit_scenario(&[0.5], &[1.0]);
        let est = mc_estimate_payoff(&code, &scenario, 1, 1);
        assert_eq!(est.stderr, 0.0);
        assert!(est.degenerate);
    }

    #[test]
    fn mc_estimate_matches_analytic() {
        let code = Code::parse("A,A,A", FieldOrder::BINARY).unwrap();
        let scenario = unit_scenario(&[0.1, 0.2, 0.3], &[1.0]);
        let est = mc_estimate_payoff(&code, &scenario, 200_000, 123);
        let exact = code.payoff(&scenario).unwrap();
        assert!((est.mean - exact).abs() < 4.0 * est.stderr, "{est:?} vs {exact}");
    }

    #[test]
    fn coverage_single_trial_deterministic() {
        let config = TrialConfig::new(2, 3, 1, 11);
        let a = coverage_experiment(&config).unwrap();
        let b = coverage_experiment(&config).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.usage_counts.len(), 17);
        assert!(a.usage_counts.iter().all(|&c| c <= 1));
    }

    #[test]
    fn conjecture_small_case_no_counterexamples() {
        // m=2, n=3: exhaustive candidate payoffs never prefer a purely
        // non-systematic tie set.
        let config = TrialConfig::new(2, 3, 200, 400);
        let report = conjecture_experiment(
            &config,
            &CandidateSource::ProjectiveCodes { prune: false },
            StopRule::Exhaust,
        )
        .unwrap();
        assert_eq!(report.trials_run, 200);
        assert!(report.counterexamples.is_empty(), "{:?}", report.counterexamples);
    }

    #[test]
    fn conjecture_report_is_deterministic() {
        let config = TrialConfig::new(2, 3, 50, 8).with_field(3);
        let run = || {
            conjecture_experiment(
                &config,
                &CandidateSource::ProjectiveCodes { prune: true },
                StopRule::Exhaust,
            )
            .unwrap()
        };
        assert_eq!(
            serde_json::to_string(&run()).unwrap(),
            serde_json::to_string(&run()).unwrap()
        );
    }
}
