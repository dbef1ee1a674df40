//! Matroid rank functions on a ground set of message and link elements:
//! validation against the rank axioms, exhaustive backtracking enumeration,
//! and payoff evaluation straight from the rank table.

use crate::model::{Scenario, UpSet};
use crate::real::Real;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on ground-set size: the rank table is dense over `2^(m+n)`.
pub const MAX_GROUND: usize = 16;

/// Ground set `U = U1 ∪ U2`: `m` message elements in bit positions `0..m`,
/// `n` link elements in positions `m..m+n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    m: usize,
    n: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum MatroidError {
    #[error("ground set needs at least one message and one link")]
    EmptyGround,
    #[error("ground set of {0} elements exceeds the supported maximum of {MAX_GROUND}")]
    GroundTooLarge(usize),
    #[error("rank table has {got} entries, expected {expected}")]
    WrongTableLength { got: usize, expected: usize },
    #[error("scenario has {got} {kind}, rank function expects {expected}")]
    DimensionMismatch { kind: &'static str, got: usize, expected: usize },
}

impl GroundSet {
    pub fn new(m: usize, n: usize) -> Result<Self, MatroidError> {
        if m == 0 || n == 0 {
            return Err(MatroidError::EmptyGround);
        }
        if m + n > MAX_GROUND {
            return Err(MatroidError::GroundTooLarge(m + n));
        }
        Ok(GroundSet { m, n })
    }

    pub fn messages(&self) -> usize {
        self.m
    }

    pub fn links(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.m + self.n
    }

    pub fn subset_count(&self) -> usize {
        1 << (self.m + self.n)
    }

    /// Bitmask of all message elements.
    pub fn message_mask(&self) -> usize {
        (1 << self.m) - 1
    }

    /// Ground-set bitmask of a link up-set.
    pub fn link_subset(&self, s: UpSet) -> usize {
        (s.0 as usize) << self.m
    }
}

/// An integer rank function stored densely, indexed by subset bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RankFunction {
    ground: GroundSet,
    ranks: Vec<u8>,
}

/// One witnessed axiom or domain-constraint violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankViolation {
    /// R1: `r(S) > |S|` (or `r(∅) != 0`).
    Cardinality { subset: usize },
    /// R2 on a covering pair: `r(S) > r(S ∪ {x})`.
    Monotone { subset: usize, superset: usize },
    /// R3: `r(S∪T) + r(S∩T) > r(S) + r(T)`.
    Submodular { s: usize, t: usize },
    /// `r(S) != |S|` for a subset of the messages.
    MessageRank { subset: usize },
    /// `r({x}) != 1` for a link element.
    LinkSingleton { element: usize },
    /// `r(S) != m` for a superset of all messages.
    FullMessageRank { subset: usize },
}

/// Outcome of [`RankFunction::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<RankViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl RankFunction {
    /// Wrap a rank table, checking only its length. Out-of-range values show
    /// up as axiom violations under [`RankFunction::validate`], which is the
    /// point: the validator must witness them.
    pub fn new(ground: GroundSet, ranks: Vec<u8>) -> Result<Self, MatroidError> {
        if ranks.len() != ground.subset_count() {
            return Err(MatroidError::WrongTableLength {
                got: ranks.len(),
                expected: ground.subset_count(),
            });
        }
        Ok(RankFunction { ground, ranks })
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn rank(&self, subset: usize) -> usize {
        usize::from(self.ranks[subset])
    }

    pub fn table(&self) -> &[u8] {
        &self.ranks
    }

    /// Check the rank axioms and the model's domain constraints, returning
    /// every witnessed violation. R2 is checked on covering pairs, R3 on all
    /// subset pairs.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let total = self.ground.subset_count();
        let m = self.ground.messages();
        let msg_mask = self.ground.message_mask();

        for subset in 0..total {
            // R1
            if self.rank(subset) > subset.count_ones() as usize {
                violations.push(RankViolation::Cardinality { subset });
            }
            // R2 on covering pairs
            for x in 0..self.ground.size() {
                if subset >> x & 1 == 0 {
                    let superset = subset | 1 << x;
                    if self.rank(subset) > self.rank(superset) {
                        violations.push(RankViolation::Monotone { subset, superset });
                    }
                }
            }
            // Domain constraints
            if subset & !msg_mask == 0 && self.rank(subset) != subset.count_ones() as usize {
                violations.push(RankViolation::MessageRank { subset });
            }
            if subset & msg_mask == msg_mask && self.rank(subset) != m {
                violations.push(RankViolation::FullMessageRank { subset });
            }
        }
        for x in m..self.ground.size() {
            if self.rank(1 << x) != 1 {
                violations.push(RankViolation::LinkSingleton { element: x });
            }
        }
        // R3, exhaustive over all pairs
        for s in 0..total {
            for t in 0..total {
                if self.rank(s | t) + self.rank(s & t) > self.rank(s) + self.rank(t) {
                    violations.push(RankViolation::Submodular { s, t });
                }
            }
        }
        ValidationReport { violations }
    }

    /// Whether message `j` is recoverable when exactly the links in `s` are up:
    /// adding the message element to the up links does not raise the rank.
    pub fn decodable(&self, s: UpSet, j: usize) -> bool {
        assert!(j < self.ground.messages(), "message index out of range");
        let links = self.ground.link_subset(s);
        self.rank(links) == self.rank(links | 1 << j)
    }

    /// Expected recovered worth per unit of the code this rank function
    /// abstracts: sum over all up-patterns of their probability times the
    /// worth of the messages decodable from them.
    pub fn payoff<R: Real>(&self, scenario: &Scenario<R>) -> Result<R, MatroidError> {
        if scenario.message_count() != self.ground.messages() {
            return Err(MatroidError::DimensionMismatch {
                kind: "messages",
                got: scenario.message_count(),
                expected: self.ground.messages(),
            });
        }
        if scenario.link_count() != self.ground.links() {
            return Err(MatroidError::DimensionMismatch {
                kind: "links",
                got: scenario.link_count(),
                expected: self.ground.links(),
            });
        }
        let mut total = R::zero();
        for s in UpSet::enumerate(self.ground.links()) {
            let p = scenario.upset_prob(s);
            let mut worth = R::zero();
            for (j, msg) in scenario.messages.iter().enumerate() {
                if self.decodable(s, j) {
                    worth = worth + msg.worth_per_unit;
                }
            }
            total = total + p * worth;
        }
        Ok(total)
    }

    /// Messages actually carried by the code: `j` with
    /// `r(U2 ∪ {M_j}) = r(U2)`.
    pub fn messages_covered(&self) -> Vec<usize> {
        let all_links = self.ground.link_subset(UpSet::full(self.ground.links()));
        (0..self.ground.messages())
            .filter(|&j| self.rank(all_links | 1 << j) == self.rank(all_links))
            .collect()
    }

    /// Criterion for systematic codes in rank-function form: every covered
    /// message appears uncombined on some link, i.e. there is a link whose
    /// pair rank with the message stays 1.
    pub fn is_systematic(&self) -> bool {
        let m = self.ground.messages();
        self.messages_covered().into_iter().all(|j| {
            (m..self.ground.size()).any(|x| self.rank(1 << x | 1 << j) == 1)
        })
    }

    /// Rank table after relabeling links by `perm` (`perm[new] = old`).
    pub fn permute_links(&self, perm: &[usize]) -> RankFunction {
        let m = self.ground.messages();
        let n = self.ground.links();
        assert_eq!(perm.len(), n);
        let mut ranks = vec![0u8; self.ground.subset_count()];
        for (subset, slot) in ranks.iter_mut().enumerate() {
            let mut old = subset & self.ground.message_mask();
            for new_link in 0..n {
                if subset >> (m + new_link) & 1 == 1 {
                    old |= 1 << (m + perm[new_link]);
                }
            }
            *slot = self.ranks[old];
        }
        RankFunction { ground: self.ground, ranks }
    }

    /// Whether this table is the lexicographically minimal one within its
    /// link-permutation orbit.
    pub fn is_link_canonical(&self) -> bool {
        let n = self.ground.links();
        let mut perm: Vec<usize> = (0..n).collect();
        permutations(&mut perm, 0, &mut |p| self.permute_links(p).ranks >= self.ranks)
    }
}

/// Visit all permutations of `items[at..]`; returns false as soon as the
/// visitor does.
fn permutations(items: &mut [usize], at: usize, visit: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if at == items.len() {
        return visit(items);
    }
    for i in at..items.len() {
        items.swap(at, i);
        let keep_going = permutations(items, at + 1, visit);
        items.swap(at, i);
        if !keep_going {
            return false;
        }
    }
    true
}

/// JSONL record for one enumerated rank function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankFunctionRecord {
    pub m: usize,
    pub n: usize,
    pub ranks: Vec<u8>,
    pub systematic: bool,
}

impl From<&RankFunction> for RankFunctionRecord {
    fn from(rf: &RankFunction) -> Self {
        RankFunctionRecord {
            m: rf.ground.messages(),
            n: rf.ground.links(),
            ranks: rf.ranks.clone(),
            systematic: rf.is_systematic(),
        }
    }
}

/// Depth-first enumeration of every rank function on `GroundSet { m, n }`
/// satisfying the axioms and domain constraints.
///
/// Subsets are assigned in (cardinality, bitmask) order. Every R1/R2/R3
/// constraint whose operands are all assigned is checked at assignment time,
/// so each emitted table is fully validated by construction.
pub struct RankFunctionIter {
    ground: GroundSet,
    /// Assignment order: subsets sorted by (popcount, value); `order[0] = ∅`.
    order: Vec<usize>,
    /// Forced value per subset from the domain constraints, if any.
    forced: Vec<Option<u8>>,
    /// Current partial table.
    ranks: Vec<u8>,
    /// Next value to try at each depth.
    next_try: Vec<u8>,
    depth: usize,
    done: bool,
}

impl RankFunctionIter {
    pub fn new(m: usize, n: usize) -> Result<Self, MatroidError> {
        let ground = GroundSet::new(m, n)?;
        let total = ground.subset_count();
        let mut order: Vec<usize> = (0..total).collect();
        order.sort_by_key(|&s| (s.count_ones(), s));
        let msg_mask = ground.message_mask();
        let forced: Vec<Option<u8>> = (0..total)
            .map(|s| {
                if s & !msg_mask == 0 {
                    Some(s.count_ones() as u8) // subset of the messages
                } else if s & msg_mask == msg_mask {
                    Some(m as u8) // contains every message
                } else if s.count_ones() == 1 {
                    Some(1) // link singleton
                } else {
                    None
                }
            })
            .collect();
        Ok(RankFunctionIter {
            ground,
            order,
            forced,
            ranks: vec![0u8; total],
            next_try: vec![0u8; total],
            depth: 0,
            done: false,
        })
    }

    /// Check every axiom instance whose operands lie in `order[..=depth]`,
    /// where `order[depth]` is the subset just assigned.
    fn consistent(&self, depth: usize) -> bool {
        let s = self.order[depth];
        let r_s = self.ranks[s];
        // R1
        if u32::from(r_s) > s.count_ones() {
            return false;
        }
        // R2 against assigned covering neighbours. Subsets of s are always
        // assigned (smaller cardinality); supersets never are.
        for x in 0..self.ground.size() {
            if s >> x & 1 == 1 && self.ranks[s & !(1 << x)] > r_s {
                return false;
            }
        }
        // R3 for every pair with union s: when a ∪ b = s, both operands and
        // the intersection have cardinality <= |s| and so are already
        // assigned. For each subset a of s, b must contain s \ a, so
        // b = (s \ a) ∪ extra with extra ⊆ a, and a ∩ b = extra. Pairs where
        // either operand equals s reduce to R2 and are skipped.
        let mut a = s;
        loop {
            let rest = s & !a;
            if a != s {
                let mut extra = a;
                loop {
                    let b = rest | extra;
                    if b != s
                        && u32::from(r_s) + u32::from(self.ranks[extra])
                            > u32::from(self.ranks[a]) + u32::from(self.ranks[b])
                    {
                        return false;
                    }
                    if extra == 0 {
                        break;
                    }
                    extra = (extra - 1) & a;
                }
            }
            if a == 0 {
                break;
            }
            a = (a - 1) & s;
        }
        true
    }

    fn value_range(&self, subset: usize) -> (u8, u8) {
        if let Some(v) = self.forced[subset] {
            return (v, v);
        }
        let cap = (subset.count_ones() as usize).min(self.ground.messages()) as u8;
        // Every nonempty subset contains a singleton of rank 1.
        (1, cap)
    }
}

impl Iterator for RankFunctionIter {
    type Item = RankFunction;

    fn next(&mut self) -> Option<RankFunction> {
        if self.done {
            return None;
        }
        let total = self.ground.subset_count();
        loop {
            if self.depth == total {
                // Full assignment: emit, then backtrack to look for more.
                let rf = RankFunction {
                    ground: self.ground,
                    ranks: self.ranks.clone(),
                };
                self.depth -= 1;
                return Some(rf);
            }
            let subset = self.order[self.depth];
            let (lo, hi) = self.value_range(subset);
            let start = self.next_try[self.depth].max(lo);
            let mut advanced = false;
            for v in start..=hi {
                self.ranks[subset] = v;
                if self.consistent(self.depth) {
                    self.next_try[self.depth] = v + 1;
                    self.depth += 1;
                    if self.depth < total {
                        self.next_try[self.depth] = 0;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                if self.depth == 0 {
                    self.done = true;
                    return None;
                }
                self.next_try[self.depth] = 0;
                self.depth -= 1;
            }
        }
    }
}

/// Enumerate every valid rank function for `m` messages and `n` links.
pub fn enumerate_rank_functions(m: usize, n: usize) -> Result<RankFunctionIter, MatroidError> {
    RankFunctionIter::new(m, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::Code;
    use crate::gf::FieldOrder;
    use crate::model::unit_scenario;

    fn forced_rf(m: usize, n: usize, free: &[(usize, u8)]) -> RankFunction {
        // Build a table from the forced cells plus explicit free-cell values.
        let ground = GroundSet::new(m, n).unwrap();
        let msg_mask = ground.message_mask();
        let mut ranks = vec![0u8; ground.subset_count()];
        for s in 0..ground.subset_count() {
            ranks[s] = if s & !msg_mask == 0 {
                s.count_ones() as u8
            } else if s & msg_mask == msg_mask {
                m as u8
            } else if s.count_ones() == 1 {
                1
            } else {
                0xff
            };
        }
        for &(s, v) in free {
            ranks[s] = v;
        }
        assert!(ranks.iter().all(|&v| v != 0xff), "free cells not covered");
        RankFunction::new(ground, ranks).unwrap()
    }

    #[test]
    fn repetition_code_matroid_passes() {
        // m=1, n=1: M A carried directly on the link.
        let rf = forced_rf(1, 1, &[]);
        assert!(rf.validate().is_valid());
    }

    #[test]
    fn link_not_function_of_messages_fails() {
        let ground = GroundSet::new(1, 1).unwrap();
        let rf = RankFunction::new(ground, vec![0, 1, 1, 2]).unwrap();
        let report = rf.validate();
        assert!(report
            .violations
            .contains(&RankViolation::FullMessageRank { subset: 0b11 }));
    }

    #[test]
    fn constructed_submodularity_violation() {
        // Three elements a,b,c with r(ab)=1, r(ac)=1 but r(abc)=2 violates R3
        // on the pair (ab, ac): 2 + 1 > 1 + 1.
        let ground = GroundSet::new(1, 2).unwrap();
        let ranks = vec![0, 1, 1, 1, 1, 1, 1, 2];
        let rf = RankFunction::new(ground, ranks).unwrap();
        let report = rf.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, RankViolation::Submodular { .. })));
    }

    #[test]
    fn wrong_length_rejected() {
        let ground = GroundSet::new(1, 1).unwrap();
        assert!(matches!(
            RankFunction::new(ground, vec![0, 1, 1]),
            Err(MatroidError::WrongTableLength { .. })
        ));
    }

    #[test]
    fn enumerate_tiny_cases_forced() {
        assert_eq!(enumerate_rank_functions(1, 1).unwrap().count(), 1);
        assert_eq!(enumerate_rank_functions(1, 2).unwrap().count(), 1);
    }

    #[test]
    fn enumerated_functions_revalidate() {
        for rf in enumerate_rank_functions(2, 2).unwrap() {
            assert!(rf.validate().is_valid());
        }
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        let all: Vec<RankFunction> = enumerate_rank_functions(2, 2).unwrap().collect();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                assert_ne!(a.table(), b.table());
            }
        }
    }

    #[test]
    fn decodable_from_empty_set_is_false() {
        let rf = forced_rf(1, 1, &[]);
        assert!(!rf.decodable(UpSet::EMPTY, 0));
    }

    #[test]
    fn decodable_matches_elimination_oracle() {
        let code = Code::parse("A,B,A+B", FieldOrder::BINARY).unwrap();
        let rf = code.rank_function().unwrap();
        // links 2 and 3 up: both messages decodable
        assert!(rf.decodable(UpSet(0b110), 0));
        assert!(rf.decodable(UpSet(0b110), 1));
        // only link 3 (the sum): neither
        assert!(!rf.decodable(UpSet(0b100), 0));

        let triple = Code::parse("A,A,A", FieldOrder::BINARY).unwrap();
        let rf3 = triple.rank_function().unwrap();
        assert!(rf3.decodable(UpSet(0b001), 0));
    }

    #[test]
    fn payoff_matches_code_payoff() {
        let scenario: Scenario = unit_scenario(&[0.1, 0.2, 0.3], &[2.0, 1.0]);
        let code = Code::parse("A,B,A+B", FieldOrder::BINARY).unwrap();
        let rf = code.rank_function().unwrap();
        let payoff = rf.payoff(&scenario).unwrap();
        assert!((payoff - 2.838).abs() < 1e-12);

        let triple = Code::parse("A,A,A", FieldOrder::BINARY).unwrap();
        let rf3 = triple.rank_function().unwrap();
        let unit: Scenario = unit_scenario(&[0.1, 0.2, 0.3], &[1.0]);
        let p3 = rf3.payoff(&unit).unwrap();
        assert!((p3 - 0.994).abs() < 1e-12);
    }

    #[test]
    fn payoff_zero_worth() {
        let code = Code::parse("A,B,A+B", FieldOrder::BINARY).unwrap();
        let rf = code.rank_function().unwrap();
        let p = rf.payoff(&unit_scenario(&[0.1, 0.2, 0.3], &[0.0, 0.0])).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn payoff_dimension_mismatch() {
        let code = Code::parse("A,B,A+B", FieldOrder::BINARY).unwrap();
        let rf = code.rank_function().unwrap();
        let bad = unit_scenario(&[0.1, 0.2, 0.3], &[1.0]);
        assert!(matches!(
            rf.payoff(&bad),
            Err(MatroidError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn messages_covered_examples() {
        // (A,A,A) viewed with a second, untouched message.
        let code = Code::parse("A,A,A", FieldOrder::BINARY).unwrap();
        let rf = code.rank_function().unwrap();
        assert_eq!(rf.messages_covered(), vec![0]);

        let parity = Code::parse("A,B,A+B", FieldOrder::BINARY).unwrap();
        let rf2 = parity.rank_function().unwrap();
        assert_eq!(rf2.messages_covered(), vec![0, 1]);
    }

    #[test]
    fn systematic_examples() {
        let parity = Code::parse("A,B,A+B", FieldOrder::BINARY).unwrap();
        assert!(parity.rank_function().unwrap().is_systematic());

        let counter = Code::parse("A,B,A+B,A+C,B+2C", FieldOrder::TERNARY).unwrap();
        assert!(!counter.rank_function().unwrap().is_systematic());
    }

    #[test]
    fn decodable_monotone_in_upset() {
        let code = Code::parse("A,B,A+B,A+C,B+2C", FieldOrder::TERNARY).unwrap();
        let rf = code.rank_function().unwrap();
        let n = rf.ground().links();
        for s in UpSet::enumerate(n) {
            for t in UpSet::enumerate(n) {
                if s.is_subset_of(t) {
                    for j in 0..rf.ground().messages() {
                        if rf.decodable(s, j) {
                            assert!(rf.decodable(t, j));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn permute_links_round_trip() {
        let code = Code::parse("A,B,A+B", FieldOrder::BINARY).unwrap();
        let rf = code.rank_function().unwrap();
        let perm = vec![2, 0, 1];
        let inv = vec![1, 2, 0];
        assert_eq!(rf.permute_links(&perm).permute_links(&inv), rf);
    }

    #[test]
    fn record_round_trips_json() {
        let code = Code::parse("A,B,A+B", FieldOrder::BINARY).unwrap();
        let rf = code.rank_function().unwrap();
        let record = RankFunctionRecord::from(&rf);
        let line = serde_json::to_string(&record).unwrap();
        let back: RankFunctionRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back.ranks, record.ranks);
        assert!(back.systematic);
    }
}
