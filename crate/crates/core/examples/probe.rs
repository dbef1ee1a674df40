//! Scratch probe for calibrating the experiment suites. Not shipped.

use parlink_core::experiments::candidates::CandidateClasses;
use parlink_core::experiments::*;
use parlink_core::gf::FieldOrder;
use parlink_core::matroid::enumerate_rank_functions;
use std::time::Instant;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_default();
    match which.as_str() {
        "enum" => {
            for (m, n) in [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2)] {
                let t = Instant::now();
                let count = enumerate_rank_functions(m, n).unwrap().count();
                println!("enumerate({m},{n}) = {count}  [{:?}]", t.elapsed());
            }
        }
        "enum34" => {
            let t = Instant::now();
            let count = enumerate_rank_functions(3, 4).unwrap().count();
            println!("enumerate(3,4) = {count}  [{:?}]", t.elapsed());
        }
        "classes" => {
            for (m, n, q, prune) in [
                (3usize, 4usize, 2u16, false),
                (3, 4, 3, false),
                (3, 5, 3, false),
                (3, 5, 3, true),
            ] {
                let t = Instant::now();
                let c = CandidateClasses::from_code_tuples(m, n, FieldOrder::new(q).unwrap(), prune)
                    .unwrap();
                println!(
                    "classes(m={m},n={n},q={q},prune={prune}): arrangements={} classes={}  [{:?}]",
                    c.arrangement_count,
                    c.classes.len(),
                    t.elapsed()
                );
            }
        }
        "conjecture4" => {
            for q in [2u16, 3] {
                let t = Instant::now();
                let config = TrialConfig::new(3, 4, 1000, 2024).with_field(q);
                let report = conjecture_experiment(
                    &config,
                    &CandidateSource::ProjectiveCodes { prune: false },
                    StopRule::Exhaust,
                )
                .unwrap();
                println!(
                    "conjecture m=3 n=4 q={q}: trials={} counterexamples={}  [{:?}]",
                    report.trials_run,
                    report.counterexamples.len(),
                    t.elapsed()
                );
            }
        }
        "hunt" => {
            let config = TrialConfig::new(3, 5, 100_000, 2024).with_field(3);
            let t = Instant::now();
            let report = conjecture_experiment(
                &config,
                &CandidateSource::ProjectiveCodes { prune: true },
                StopRule::AfterFound(25),
            )
            .unwrap();
            println!(
                "hunt m=3 n=5 q=3: trials={} counterexamples={}  [{:?}]",
                report.trials_run,
                report.counterexamples.len(),
                t.elapsed()
            );
            for ce in report.counterexamples.iter().take(25) {
                println!(
                    "  trial {}: margin {:.3e} best={:?} multisets={:?}",
                    ce.trial, ce.margin, ce.best_codes, ce.best_multisets
                );
            }
        }
        "pattern" => {
            let seed: u64 = std::env::args()
                .nth(2)
                .and_then(|s| s.parse().ok())
                .unwrap_or(2024);
            let field = FieldOrder::TERNARY;
            let classes = CandidateClasses::from_code_tuples(3, 5, field, true).unwrap();
            let p1 = parlink_core::Code::parse("A,B,A+B,A+C,B+2C", field).unwrap();
            let p2 = parlink_core::Code::parse("A,C,A+B,A+C,B+2C", field).unwrap();
            let t1 = classes
                .code_of_tuple(&classes.multiset_of_code(&p1).unwrap())
                .to_string();
            let t2 = classes
                .code_of_tuple(&classes.multiset_of_code(&p2).unwrap())
                .to_string();
            println!("pattern multiset texts: {t1:?} {t2:?}");
            let config = TrialConfig::new(3, 5, 100_000, seed).with_field(3);
            let t = Instant::now();
            let matches_pattern = |ce: &Counterexample| {
                ce.best_multisets.iter().any(|ms| *ms == t1 || *ms == t2)
            };
            let report = conjecture_experiment(
                &config,
                &CandidateSource::ProjectiveCodes { prune: true },
                StopRule::When(&matches_pattern),
            )
            .unwrap();
            let hits: Vec<&Counterexample> =
                report.counterexamples.iter().filter(|c| matches_pattern(c)).collect();
            println!(
                "seed {seed}: trials={} counterexamples={} pattern_hits={}  [{:?}]",
                report.trials_run,
                report.counterexamples.len(),
                hits.len(),
                t.elapsed()
            );
            for ce in hits.iter().take(5) {
                println!(
                    "  trial {}: margin {:.3e} tie multisets {:?}",
                    ce.trial, ce.margin, ce.best_multisets
                );
            }
        }
        "coverage" => {
            let t = Instant::now();
            let config = TrialConfig::new(2, 3, 20_000, 17);
            let report = coverage_experiment(&config).unwrap();
            println!("coverage 20k trials [{:?}]", t.elapsed());
            for (code, count) in report.codes.iter().zip(&report.usage_counts) {
                println!("  {code:<14} {count}");
            }
            println!("never used: {:?}", report.never_used);
        }
        other => eprintln!("unknown probe {other:?}"),
    }
}
