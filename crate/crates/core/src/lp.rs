//! Timesharing optimization: build the linear program that splits link
//! capacity and message mass across a library of codes, and solve it with a
//! dense self-contained simplex (Bland's rule, certified optimality).

use crate::code::{Code, CodeError};
use crate::gf::{FieldError, FieldOrder};
use crate::model::Scenario;
use crate::real::Real;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Feasibility and reduced-cost tolerance (absolute plus relative).
pub const FEAS_TOL: f64 = 1e-9;
/// Smallest pivot magnitude the simplex will accept.
pub const PIVOT_FLOOR: f64 = 1e-12;

/// An ordered list of codes sharing one field and link count.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeLibrary {
    field: FieldOrder,
    codes: Vec<Code>,
}

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("library must contain at least one code")]
    Empty,
    #[error("code {index} spans {got} links, expected {expected}")]
    LinkCountMismatch { index: usize, got: usize, expected: usize },
    #[error("invalid field: {0}")]
    Field(#[from] FieldError),
    #[error("code {index}: {source}")]
    Code { index: usize, source: CodeError },
    #[error("invalid library JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Serialize, Deserialize)]
struct LibraryJson {
    field: u16,
    codes: Vec<String>,
}

impl CodeLibrary {
    pub fn new(field: FieldOrder, codes: Vec<Code>) -> Result<Self, LibraryError> {
        if codes.is_empty() {
            return Err(LibraryError::Empty);
        }
        let expected = codes[0].link_count();
        for (index, code) in codes.iter().enumerate() {
            if code.link_count() != expected {
                return Err(LibraryError::LinkCountMismatch {
                    index,
                    got: code.link_count(),
                    expected,
                });
            }
        }
        Ok(CodeLibrary { field, codes })
    }

    pub fn field(&self) -> FieldOrder {
        self.field
    }

    pub fn codes(&self) -> &[Code] {
        &self.codes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn link_count(&self) -> usize {
        self.codes[0].link_count()
    }

    pub fn from_json_str(text: &str) -> Result<Self, LibraryError> {
        let raw: LibraryJson = serde_json::from_str(text)?;
        let field = FieldOrder::new(raw.field)?;
        let codes = raw
            .codes
            .iter()
            .enumerate()
            .map(|(index, text)| {
                Code::parse(text, field).map_err(|source| LibraryError::Code { index, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        CodeLibrary::new(field, codes)
    }

    pub fn to_json_string(&self) -> String {
        let raw = LibraryJson {
            field: self.field.order(),
            codes: self.codes.iter().map(|c| c.to_string()).collect(),
        };
        serde_json::to_string(&raw).expect("library serializes")
    }
}

/// The reference library for three links and two messages: singleton
/// placements, two- and three-link repetitions and the split-message parity
/// code for each message, plus the cross-message parity code.
pub fn build_17_code_library() -> CodeLibrary {
    let texts = [
        "A,-,-", "-,A,-", "-,-,A", "A,A,-", "A,-,A", "-,A,A", "A,A,A",
        "A1,A2,A1+A2",
        "B,-,-", "-,B,-", "-,-,B", "B,B,-", "B,-,B", "-,B,B", "B,B,B",
        "B1,B2,B1+B2",
        "A,B,A+B",
    ];
    let codes = texts
        .iter()
        .map(|t| Code::parse(t, FieldOrder::BINARY).expect("library code parses"))
        .collect();
    CodeLibrary::new(FieldOrder::BINARY, codes).expect("library is consistent")
}

/// The timesharing LP: maximize `payoffs · z` subject to
/// `link_usage · z <= capacities`, `message_usage · z <= sizes`, `z >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<R: Real = f64> {
    /// Link usage per code unit; one row per link.
    pub link_usage: Vec<Vec<R>>,
    /// Message content per code unit; one row per message.
    pub message_usage: Vec<Vec<R>>,
    /// Expected payoff per code unit.
    pub payoffs: Vec<R>,
    /// Link capacities.
    pub capacities: Vec<R>,
    /// Message sizes.
    pub sizes: Vec<R>,
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("code {index} uses message {used} but the scenario has {have} messages")]
    MessageOutOfRange { index: usize, used: usize, have: usize },
    #[error("library spans {library} links but the scenario has {scenario}")]
    LinkCountMismatch { library: usize, scenario: usize },
    #[error("problem dimensions are inconsistent: {0}")]
    Shape(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Build the LP for a library under a scenario. One unit of a code places
/// one data unit on each link it uses and contains one unit of each of its
/// portions; payoffs come from the exact per-unit evaluator.
pub fn build_lp<R: Real>(
    library: &CodeLibrary,
    scenario: &Scenario<R>,
) -> Result<LpProblem<R>, LpError> {
    let n = scenario.link_count();
    let m = scenario.message_count();
    if library.link_count() != n {
        return Err(LpError::LinkCountMismatch { library: library.link_count(), scenario: n });
    }
    let n_c = library.len();
    let mut link_usage = vec![vec![R::zero(); n_c]; n];
    let mut message_usage = vec![vec![R::zero(); n_c]; m];
    let mut payoffs = vec![R::zero(); n_c];
    for (k, code) in library.codes().iter().enumerate() {
        if code.message_span() > m {
            return Err(LpError::MessageOutOfRange {
                index: k,
                used: code.message_span() - 1,
                have: m,
            });
        }
        for (i, row) in link_usage.iter_mut().enumerate() {
            if code.uses_link(i) {
                row[k] = R::one();
            }
        }
        for (j, row) in message_usage.iter_mut().enumerate() {
            row[k] = R::of(f64::from(code.portion_count(j)));
        }
        payoffs[k] = code.payoff(scenario).expect("dimensions already checked");
    }
    Ok(LpProblem {
        link_usage,
        message_usage,
        payoffs,
        capacities: scenario.links.iter().map(|l| l.capacity).collect(),
        sizes: scenario.messages.iter().map(|m| m.size).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    #[serde(rename = "optimal")]
    Optimal,
    /// Defensive: an improving ray was found, which valid inputs cannot
    /// produce. The returned point is the last feasible vertex.
    #[serde(rename = "unbounded-guard")]
    UnboundedGuard,
    /// Defensive: reserved for malformed inputs; `z = 0` is feasible for
    /// every valid problem.
    #[serde(rename = "infeasible-guard")]
    InfeasibleGuard,
}

/// A solved timesharing problem with its optimality certificate.
#[derive(Debug, Clone)]
pub struct LpSolution<R: Real = f64> {
    pub z: Vec<R>,
    pub objective: R,
    pub status: LpStatus,
    /// `payoff_k - y·A_k` per structural column; all `<= FEAS_TOL` at an
    /// optimal vertex.
    pub reduced_costs: Vec<R>,
    /// Dual values of the capacity and size rows.
    pub duals: Vec<R>,
}

impl<R: Real> LpProblem<R> {
    fn rows(&self) -> usize {
        self.link_usage.len() + self.message_usage.len()
    }

    fn cols(&self) -> usize {
        self.payoffs.len()
    }

    fn row(&self, i: usize) -> &[R] {
        if i < self.link_usage.len() {
            &self.link_usage[i]
        } else {
            &self.message_usage[i - self.link_usage.len()]
        }
    }

    fn bound(&self, i: usize) -> R {
        if i < self.link_usage.len() {
            self.capacities[i]
        } else {
            self.sizes[i - self.link_usage.len()]
        }
    }

    fn check_shape(&self) -> Result<(), LpError> {
        let n_c = self.cols();
        if self.link_usage.len() != self.capacities.len() {
            return Err(LpError::Shape("link rows vs capacities".into()));
        }
        if self.message_usage.len() != self.sizes.len() {
            return Err(LpError::Shape("message rows vs sizes".into()));
        }
        for row in self.link_usage.iter().chain(&self.message_usage) {
            if row.len() != n_c {
                return Err(LpError::Shape("row width vs payoff length".into()));
            }
        }
        Ok(())
    }
}

/// Solve by the primal simplex on the slack basis. The all-slack start is
/// feasible because capacities and sizes are nonnegative, so no phase-1 is
/// needed. Bland's rule prevents cycling.
pub fn solve_lp<R: Real>(problem: &LpProblem<R>) -> Result<LpSolution<R>, LpError> {
    problem.check_shape()?;
    let rows = problem.rows();
    let n_c = problem.cols();
    let cols = n_c + rows + 1; // structural + slack + rhs
    let rhs = cols - 1;
    let tol = R::of(FEAS_TOL);
    let floor = R::of(PIVOT_FLOOR);

    for i in 0..rows {
        if problem.bound(i) < R::zero() {
            // Negative capacity or size; z = 0 is not feasible.
            return Ok(LpSolution {
                z: vec![R::zero(); n_c],
                objective: R::zero(),
                status: LpStatus::InfeasibleGuard,
                reduced_costs: problem.payoffs.clone(),
                duals: vec![R::zero(); rows],
            });
        }
    }

    // tableau[i]: constraint rows then the objective row (negated payoffs).
    let mut tableau: Vec<Vec<R>> = Vec::with_capacity(rows + 1);
    for i in 0..rows {
        let mut row = vec![R::zero(); cols];
        row[..n_c].copy_from_slice(problem.row(i));
        row[n_c + i] = R::one();
        row[rhs] = problem.bound(i);
        tableau.push(row);
    }
    let mut obj = vec![R::zero(); cols];
    for (k, &v) in problem.payoffs.iter().enumerate() {
        obj[k] = -v;
    }
    tableau.push(obj);

    let mut basis: Vec<usize> = (n_c..n_c + rows).collect();
    let mut status = LpStatus::Optimal;

    loop {
        // Bland: entering column is the lowest index with a negative
        // objective-row entry.
        let Some(entering) = (0..n_c + rows).find(|&j| tableau[rows][j] < -tol) else {
            break;
        };
        // Leaving row: minimum ratio, ties broken by smallest basic index.
        let mut leaving: Option<(usize, R)> = None;
        let mut saw_positive = false;
        for i in 0..rows {
            let a = tableau[i][entering];
            if a > R::zero() {
                saw_positive = true;
            }
            if a > floor {
                let ratio = tableau[i][rhs] / a;
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((best_i, best)) => {
                        if ratio < best || (ratio == best && basis[i] < basis[best_i]) {
                            Some((i, ratio))
                        } else {
                            Some((best_i, best))
                        }
                    }
                };
            }
        }
        let Some((pivot_row, _)) = leaving else {
            if saw_positive {
                return Err(LpError::Numerical(format!(
                    "all pivot candidates in column {entering} are below {PIVOT_FLOOR}"
                )));
            }
            status = LpStatus::UnboundedGuard;
            break;
        };
        // Pivot.
        let pivot = tableau[pivot_row][entering];
        for x in tableau[pivot_row].iter_mut() {
            *x = *x / pivot;
        }
        for i in 0..=rows {
            if i == pivot_row {
                continue;
            }
            let factor = tableau[i][entering];
            if factor != R::zero() {
                let (pivot_slice, row) = if i < pivot_row {
                    let (head, tail) = tableau.split_at_mut(pivot_row);
                    (&tail[0], &mut head[i])
                } else {
                    let (head, tail) = tableau.split_at_mut(i);
                    (&head[pivot_row], &mut tail[0])
                };
                for (x, &p) in row.iter_mut().zip(pivot_slice.iter()) {
                    *x = *x - factor * p;
                }
            }
        }
        basis[pivot_row] = entering;
    }

    let mut z = vec![R::zero(); n_c];
    for (i, &b) in basis.iter().enumerate() {
        if b < n_c {
            z[b] = tableau[i][rhs];
        }
    }
    let reduced_costs = (0..n_c).map(|k| -tableau[rows][k]).collect();
    let duals = (0..rows).map(|i| tableau[rows][n_c + i]).collect();
    Ok(LpSolution {
        z,
        objective: tableau[rows][rhs],
        status,
        reduced_costs,
        duals,
    })
}

/// Certificate failure raised by [`LpSolution::verify`].
#[derive(Debug, Error, PartialEq)]
pub enum CertificateError {
    #[error("z[{index}] = {value} is negative beyond tolerance")]
    NegativeMass { index: usize, value: f64 },
    #[error("constraint row {row} violated: lhs {lhs} > bound {bound}")]
    Infeasible { row: usize, lhs: f64, bound: f64 },
    #[error("objective {objective} disagrees with payoff·z = {recomputed}")]
    ObjectiveMismatch { objective: f64, recomputed: f64 },
    #[error("reduced cost {value} of column {index} exceeds tolerance")]
    NotOptimal { index: usize, value: f64 },
}

impl<R: Real> LpSolution<R> {
    /// Indices of codes carrying mass above `tol`, ordered by decreasing mass.
    pub fn used_codes(&self, tol: R) -> Vec<usize> {
        let mut used: Vec<usize> =
            (0..self.z.len()).filter(|&k| self.z[k] > tol).collect();
        used.sort_by(|&a, &b| self.z[b].partial_cmp(&self.z[a]).unwrap().then(a.cmp(&b)));
        used
    }

    /// Re-check every invariant of the solution against its problem:
    /// feasibility within tolerance, objective consistency, and (for optimal
    /// status) nonpositive reduced costs.
    pub fn verify(&self, problem: &LpProblem<R>) -> Result<(), CertificateError> {
        let tol = R::of(FEAS_TOL);
        let hard_floor = R::of(-PIVOT_FLOOR);
        for (index, &value) in self.z.iter().enumerate() {
            if value < hard_floor {
                return Err(CertificateError::NegativeMass {
                    index,
                    value: value.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        for row in 0..problem.rows() {
            let lhs = problem
                .row(row)
                .iter()
                .zip(&self.z)
                .fold(R::zero(), |acc, (&a, &zk)| acc + a * zk);
            let bound = problem.bound(row);
            if lhs > bound + tol * (R::one() + bound.abs()) {
                return Err(CertificateError::Infeasible {
                    row,
                    lhs: lhs.to_f64().unwrap_or(f64::NAN),
                    bound: bound.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        let recomputed = self
            .z
            .iter()
            .zip(&problem.payoffs)
            .fold(R::zero(), |acc, (&zk, &vk)| acc + zk * vk);
        if (recomputed - self.objective).abs() > tol * (R::one() + self.objective.abs()) {
            return Err(CertificateError::ObjectiveMismatch {
                objective: self.objective.to_f64().unwrap_or(f64::NAN),
                recomputed: recomputed.to_f64().unwrap_or(f64::NAN),
            });
        }
        if self.status == LpStatus::Optimal {
            for (index, &rc) in self.reduced_costs.iter().enumerate() {
                if rc > tol {
                    return Err(CertificateError::NotOptimal {
                        index,
                        value: rc.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(())
    }
}

/// JSON report for one solve, the CLI's `optimize` output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpResultJson {
    pub objective: f64,
    pub z: Vec<f64>,
    pub used: Vec<UsedCodeJson>,
    pub status: LpStatus,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UsedCodeJson {
    pub code: String,
    pub z: f64,
}

impl LpResultJson {
    pub fn new(library: &CodeLibrary, solution: &LpSolution<f64>, tol: f64) -> Self {
        LpResultJson {
            objective: solution.objective,
            z: solution.z.clone(),
            used: solution
                .used_codes(tol)
                .into_iter()
                .map(|k| UsedCodeJson {
                    code: library.codes()[k].to_string(),
                    z: solution.z[k],
                })
                .collect(),
            status: solution.status,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{unit_scenario, LinkSpec, MessageSpec};

    fn scenario_332(worths: [f64; 2]) -> Scenario {
        unit_scenario(&[0.1, 0.2, 0.3], &worths)
    }

    #[test]
    fn library_17_shape() {
        let lib = build_17_code_library();
        assert_eq!(lib.len(), 17);
        assert_eq!(lib.link_count(), 3);
        // Spot checks against the intended ordering.
        assert_eq!(lib.codes()[3].to_string(), "A,A,-");
        assert_eq!(lib.codes()[5].to_string(), "-,A,A");
        assert_eq!(lib.codes()[7].to_string(), "A1,A2,A1+A2");
        assert_eq!(lib.codes()[16].to_string(), "A,B,A+B");
    }

    #[test]
    fn library_payoffs_match_closed_forms() {
        let scenario = scenario_332([1.0, 1.0]);
        let lib = build_17_code_library();
        let problem = build_lp(&lib, &scenario).unwrap();
        let (p1, p2, p3) = (0.9, 0.8, 0.7);
        // v4 = πA(p̄1 + p̄2 − p̄1p̄2), v6 = πA(p̄2 + p̄3 − p̄2p̄3)
        assert!((problem.payoffs[3] - (p1 + p2 - p1 * p2)).abs() < 1e-15);
        assert!((problem.payoffs[5] - (p2 + p3 - p2 * p3)).abs() < 1e-15);
        assert!((problem.payoffs[5] - 0.94).abs() < 1e-12);
    }

    #[test]
    fn build_lp_columns() {
        let scenario = scenario_332([2.0, 1.0]);
        let lib = build_17_code_library();
        let problem = build_lp(&lib, &scenario).unwrap();
        let col = |rows: &Vec<Vec<f64>>, k: usize| -> Vec<f64> {
            rows.iter().map(|r| r[k]).collect()
        };
        // (A,B,A+B)
        assert_eq!(col(&problem.link_usage, 16), vec![1.0, 1.0, 1.0]);
        assert_eq!(col(&problem.message_usage, 16), vec![1.0, 1.0]);
        // (A1,A2,A1+A2)
        assert_eq!(col(&problem.link_usage, 7), vec![1.0, 1.0, 1.0]);
        assert_eq!(col(&problem.message_usage, 7), vec![2.0, 0.0]);
        // (-,B,B) is index 13
        assert_eq!(col(&problem.link_usage, 13), vec![0.0, 1.0, 1.0]);
        assert_eq!(col(&problem.message_usage, 13), vec![0.0, 1.0]);
    }

    #[test]
    fn solve_single_link_single_message() {
        let scenario: Scenario = Scenario {
            links: vec![LinkSpec { capacity: 1.0, outage_prob: 0.4 }],
            messages: vec![MessageSpec { size: 2.0, worth_per_unit: 5.0 }],
        }
        .validate()
        .unwrap();
        let lib = CodeLibrary::new(
            FieldOrder::BINARY,
            vec![Code::parse("A", FieldOrder::BINARY).unwrap()],
        )
        .unwrap();
        let problem = build_lp(&lib, &scenario).unwrap();
        let solution = solve_lp(&problem).unwrap();
        assert_eq!(solution.status, LpStatus::Optimal);
        assert!((solution.z[0] - 1.0).abs() < 1e-9);
        assert!((solution.objective - 3.0).abs() < 1e-9);
        solution.verify(&problem).unwrap();
    }

    #[test]
    fn solve_zero_capacity() {
        let scenario: Scenario = Scenario {
            links: vec![
                LinkSpec { capacity: 0.0, outage_prob: 0.1 },
                LinkSpec { capacity: 0.0, outage_prob: 0.2 },
                LinkSpec { capacity: 0.0, outage_prob: 0.3 },
            ],
            messages: vec![
                MessageSpec { size: 1.0, worth_per_unit: 2.0 },
                MessageSpec { size: 1.0, worth_per_unit: 1.0 },
            ],
        }
        .validate()
        .unwrap();
        let problem = build_lp(&build_17_code_library(), &scenario).unwrap();
        let solution = solve_lp(&problem).unwrap();
        assert_eq!(solution.objective, 0.0);
        assert!(solution.z.iter().all(|&zk| zk.abs() < 1e-12));
        assert!(solution.used_codes(1e-6).is_empty());
        solution.verify(&problem).unwrap();
    }

    #[test]
    fn solve_only_first_link_has_capacity() {
        let mut scenario = scenario_332([2.0, 1.0]);
        scenario.links[1].capacity = 0.0;
        scenario.links[2].capacity = 0.0;
        let lib = build_17_code_library();
        let problem = build_lp(&lib, &scenario).unwrap();
        let solution = solve_lp(&problem).unwrap();
        assert!((solution.objective - 1.8).abs() < 1e-9);
        let used = solution.used_codes(1e-6);
        assert_eq!(used, vec![0]); // (A,-,-) saturates link 1
        solution.verify(&problem).unwrap();
    }

    #[test]
    fn used_codes_ordering() {
        let solution = LpSolution {
            z: vec![0.25, 0.0, 0.75, 1e-9],
            objective: 0.0,
            status: LpStatus::Optimal,
            reduced_costs: vec![0.0; 4],
            duals: vec![],
        };
        assert_eq!(solution.used_codes(1e-6), vec![2, 0]);
    }

    #[test]
    fn unbounded_guard_on_malformed_input() {
        // A zero column with positive payoff has no binding constraint.
        let problem = LpProblem {
            link_usage: vec![vec![0.0]],
            message_usage: vec![vec![0.0]],
            payoffs: vec![1.0],
            capacities: vec![1.0],
            sizes: vec![1.0],
        };
        let solution = solve_lp(&problem).unwrap();
        assert_eq!(solution.status, LpStatus::UnboundedGuard);
    }

    #[test]
    fn infeasible_guard_on_negative_bound() {
        let problem = LpProblem {
            link_usage: vec![vec![1.0]],
            message_usage: vec![vec![1.0]],
            payoffs: vec![1.0],
            capacities: vec![-1.0],
            sizes: vec![1.0],
        };
        let solution = solve_lp(&problem).unwrap();
        assert_eq!(solution.status, LpStatus::InfeasibleGuard);
    }

    #[test]
    fn scaling_a_column_leaves_objective_unchanged() {
        let scenario = scenario_332([2.0, 1.0]);
        let lib = build_17_code_library();
        let problem = build_lp(&lib, &scenario).unwrap();
        let base = solve_lp(&problem).unwrap();
        for gamma in [0.5, 2.0, 10.0] {
            let mut scaled = problem.clone();
            for row in scaled.link_usage.iter_mut().chain(scaled.message_usage.iter_mut()) {
                row[16] *= gamma;
            }
            scaled.payoffs[16] *= gamma;
            let solution = solve_lp(&scaled).unwrap();
            let rel = (solution.objective - base.objective).abs()
                / (1.0 + base.objective.abs());
            assert!(rel < 1e-9, "gamma {gamma}: {} vs {}", solution.objective, base.objective);
        }
    }

    #[test]
    fn library_json_round_trip() {
        let lib = build_17_code_library();
        let text = lib.to_json_string();
        let back = CodeLibrary::from_json_str(&text).unwrap();
        assert_eq!(back, lib);
        assert!(text.contains("\"field\":2"));
        assert!(text.contains("A1,A2,A1+A2"));
    }

    #[test]
    fn library_rejects_mixed_link_counts() {
        let f = FieldOrder::BINARY;
        let codes = vec![
            Code::parse("A,B", f).unwrap(),
            Code::parse("A,B,A+B", f).unwrap(),
        ];
        assert!(matches!(
            CodeLibrary::new(f, codes),
            Err(LibraryError::LinkCountMismatch { index: 1, .. })
        ));
    }

    #[test]
    fn solve_in_single_precision() {
        let scenario: Scenario<f32> = Scenario {
            links: vec![LinkSpec { capacity: 1.0f32, outage_prob: 0.4 }],
            messages: vec![MessageSpec { size: 2.0f32, worth_per_unit: 5.0 }],
        }
        .validate()
        .unwrap();
        let lib = CodeLibrary::new(
            FieldOrder::BINARY,
            vec![Code::parse("A", FieldOrder::BINARY).unwrap()],
        )
        .unwrap();
        let problem = build_lp(&lib, &scenario).unwrap();
        let solution = solve_lp(&problem).unwrap();
        assert!((solution.objective - 3.0f32).abs() < 1e-5);
    }
}
