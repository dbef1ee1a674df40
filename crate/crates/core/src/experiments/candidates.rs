//! Candidate code sets for the best-code searches: projective columns over
//! GF(q), the multiset enumeration, and a payoff-signature index over every
//! link arrangement of every multiset.

use crate::code::Code;
use crate::gf::FieldOrder;
use crate::matroid::RankFunction;
use crate::model::UpSet;
use thiserror::Error;

/// Practical bounds: the searches enumerate `points^n` arrangements.
pub const MAX_CANDIDATE_MESSAGES: usize = 3;
pub const MAX_CANDIDATE_LINKS: usize = 5;
pub const MAX_CANDIDATE_FIELD: u16 = 3;

#[derive(Debug, Error, PartialEq)]
pub enum CandidateError {
    #[error("candidate enumeration supports m <= {MAX_CANDIDATE_MESSAGES}, got {0}")]
    TooManyMessages(usize),
    #[error("candidate enumeration supports n <= {MAX_CANDIDATE_LINKS}, got {0}")]
    TooManyLinks(usize),
    #[error("candidate enumeration supports q <= {MAX_CANDIDATE_FIELD}, got {0}")]
    FieldTooLarge(u16),
}

fn check_bounds(m: usize, n: usize, field: FieldOrder) -> Result<(), CandidateError> {
    if m == 0 || m > MAX_CANDIDATE_MESSAGES {
        return Err(CandidateError::TooManyMessages(m));
    }
    if n == 0 || n > MAX_CANDIDATE_LINKS {
        return Err(CandidateError::TooManyLinks(n));
    }
    if field.order() > MAX_CANDIDATE_FIELD {
        return Err(CandidateError::FieldTooLarge(field.order()));
    }
    Ok(())
}

/// The nonzero columns of GF(q)^m up to scaling, one canonical representative
/// each (first nonzero coefficient 1), in lexicographic order.
pub fn projective_points(m: usize, field: FieldOrder) -> Vec<Vec<u16>> {
    let q = field.order();
    let total = (q as u64).pow(m as u32);
    let mut points = Vec::new();
    for code in 1..total {
        let mut v = vec![0u16; m];
        let mut rest = code;
        for slot in v.iter_mut().rev() {
            *slot = (rest % u64::from(q)) as u16;
            rest /= u64::from(q);
        }
        if v.iter().find(|&&c| c != 0) == Some(&1) {
            points.push(v);
        }
    }
    points
}

/// Whether a column multiset/arrangement is reducible: some message occurs in
/// exactly one column and that column combines it with other messages.
fn is_reducible(columns: &[&[u16]], m: usize) -> bool {
    (0..m).any(|j| {
        let mut occurrences = columns.iter().filter(|col| col[j] != 0);
        match (occurrences.next(), occurrences.next()) {
            (Some(col), None) => col.iter().filter(|&&c| c != 0).count() > 1,
            _ => false,
        }
    })
}

/// Whether an arrangement is systematic: every message that appears has its
/// unit column present somewhere.
fn is_systematic_columns(columns: &[&[u16]], m: usize) -> bool {
    (0..m).all(|j| {
        let used = columns.iter().any(|col| col[j] != 0);
        !used
            || columns
                .iter()
                .any(|col| col[j] != 0 && col.iter().filter(|&&c| c != 0).count() == 1)
    })
}

/// All length-`n` multisets of projective columns, one `Code` per multiset
/// with columns in point order. With `prune`, arrangements reducible by the
/// replacement rule are dropped.
pub fn enumerate_candidate_codes(
    m: usize,
    n: usize,
    field: FieldOrder,
    prune: bool,
) -> Result<Vec<Code>, CandidateError> {
    check_bounds(m, n, field)?;
    let points = projective_points(m, field);
    let mut codes = Vec::new();
    let mut stack = vec![0usize; n];
    // Nondecreasing index tuples = multisets.
    fn walk(
        points: &[Vec<u16>],
        m: usize,
        field: FieldOrder,
        prune: bool,
        stack: &mut Vec<usize>,
        depth: usize,
        lowest: usize,
        out: &mut Vec<Code>,
    ) {
        if depth == stack.len() {
            let columns: Vec<&[u16]> = stack.iter().map(|&i| points[i].as_slice()).collect();
            if prune && is_reducible(&columns, m) {
                return;
            }
            let owned: Vec<Vec<u16>> = columns.iter().map(|c| c.to_vec()).collect();
            out.push(Code::from_columns(field, &owned).expect("projective columns form a code"));
            return;
        }
        for i in lowest..points.len() {
            stack[depth] = i;
            walk(points, m, field, prune, stack, depth + 1, i, out);
        }
    }
    walk(&points, m, field, prune, &mut stack, 0, 0, &mut codes);
    Ok(codes)
}

/// Per-message decodability over every up-set, for one arrangement of
/// columns. Bit `s` of entry `j` says message `j` is decodable when exactly
/// the links in `s` are up.
fn decodability_masks(columns: &[&[u16]], m: usize, field: FieldOrder) -> Vec<u32> {
    let n = columns.len();
    let mut masks = vec![0u32; m];
    let mut rows = [[0u16; MAX_CANDIDATE_MESSAGES]; MAX_CANDIDATE_LINKS];
    for s in UpSet::enumerate(n) {
        // Build a row-echelon basis of the received columns, no allocation.
        let mut rank = 0usize;
        for (i, col) in columns.iter().enumerate() {
            if !s.contains(i) {
                continue;
            }
            let mut v = [0u16; MAX_CANDIDATE_MESSAGES];
            v[..m].copy_from_slice(col);
            reduce_row(&mut v, &rows[..rank], m, field);
            if let Some(pivot) = (0..m).find(|&t| v[t] != 0) {
                let inv = field.inv(v[pivot]);
                for c in v.iter_mut() {
                    *c = field.mul(*c, inv);
                }
                for row in rows[..rank].iter_mut() {
                    let c = row[pivot];
                    if c != 0 {
                        for t in 0..m {
                            row[t] = field.sub(row[t], field.mul(c, v[t]));
                        }
                    }
                }
                rows[rank] = v;
                rank += 1;
            }
        }
        for j in 0..m {
            let mut unit = [0u16; MAX_CANDIDATE_MESSAGES];
            unit[j] = 1;
            reduce_row(&mut unit, &rows[..rank], m, field);
            if unit[..m].iter().all(|&c| c == 0) {
                masks[j] |= 1 << s.0;
            }
        }
    }
    masks
}

fn reduce_row(
    v: &mut [u16; MAX_CANDIDATE_MESSAGES],
    rows: &[[u16; MAX_CANDIDATE_MESSAGES]],
    m: usize,
    field: FieldOrder,
) {
    for row in rows {
        let pivot = (0..m).find(|&t| row[t] != 0).expect("basis rows are nonzero");
        let c = v[pivot];
        if c != 0 {
            for t in 0..m {
                v[t] = field.sub(v[t], field.mul(c, row[t]));
            }
        }
    }
}

/// One payoff-equivalence class of candidates: every member decodes the same
/// messages from the same up-sets, so payoffs coincide on every scenario.
#[derive(Debug, Clone)]
pub struct CandidateClass {
    /// Per-message decodability bitmask over up-sets.
    pub message_masks: Vec<u32>,
    /// Whether any member of the class is systematic.
    pub any_systematic: bool,
    /// Lexicographically first member, as point indices per link
    /// (code-tuple classes) or empty (rank-function classes).
    pub representative: Vec<u16>,
    /// Distinct column multisets among members, sorted point indices.
    pub multisets: Vec<Vec<u16>>,
    /// Rank-function members, when built from a matroid list.
    pub rank_members: Vec<usize>,
}

/// The candidate set indexed by payoff signature. Code-tuple sets are closed
/// under link permutation: the best-code comparison must see every
/// arrangement, not just one per multiset.
#[derive(Debug, Clone)]
pub struct CandidateClasses {
    pub m: usize,
    pub n: usize,
    pub field: Option<FieldOrder>,
    pub points: Vec<Vec<u16>>,
    pub classes: Vec<CandidateClass>,
    /// Total arrangements behind the classes.
    pub arrangement_count: u64,
}

impl CandidateClasses {
    /// Index every arrangement (ordered tuple) of projective columns.
    pub fn from_code_tuples(
        m: usize,
        n: usize,
        field: FieldOrder,
        prune: bool,
    ) -> Result<Self, CandidateError> {
        check_bounds(m, n, field)?;
        let points = projective_points(m, field);
        let point_count = points.len();
        let mut classes: Vec<CandidateClass> = Vec::new();
        let mut index: std::collections::HashMap<Vec<u32>, usize> =
            std::collections::HashMap::new();
        let mut tuple = vec![0usize; n];
        let mut arrangement_count = 0u64;
        loop {
            let columns: Vec<&[u16]> = tuple.iter().map(|&i| points[i].as_slice()).collect();
            if !(prune && is_reducible(&columns, m)) {
                arrangement_count += 1;
                let masks = decodability_masks(&columns, m, field);
                let systematic = is_systematic_columns(&columns, m);
                let mut multiset: Vec<u16> = tuple.iter().map(|&i| i as u16).collect();
                multiset.sort_unstable();
                match index.get(&masks) {
                    Some(&at) => {
                        let class = &mut classes[at];
                        class.any_systematic |= systematic;
                        if !class.multisets.contains(&multiset) {
                            class.multisets.push(multiset);
                        }
                    }
                    None => {
                        index.insert(masks.clone(), classes.len());
                        classes.push(CandidateClass {
                            message_masks: masks,
                            any_systematic: systematic,
                            representative: tuple.iter().map(|&i| i as u16).collect(),
                            multisets: vec![multiset],
                            rank_members: Vec::new(),
                        });
                    }
                }
            }
            // Advance the odometer over point indices.
            let mut at = n;
            loop {
                if at == 0 {
                    return Ok(CandidateClasses {
                        m,
                        n,
                        field: Some(field),
                        points,
                        classes,
                        arrangement_count,
                    });
                }
                at -= 1;
                tuple[at] += 1;
                if tuple[at] < point_count {
                    break;
                }
                tuple[at] = 0;
            }
        }
    }

    /// Index a list of rank functions by the same payoff signature.
    pub fn from_rank_functions(rfs: &[RankFunction]) -> Result<Self, CandidateError> {
        assert!(!rfs.is_empty(), "candidate list must be nonempty");
        let m = rfs[0].ground().messages();
        let n = rfs[0].ground().links();
        if n > MAX_CANDIDATE_LINKS {
            return Err(CandidateError::TooManyLinks(n));
        }
        let mut classes: Vec<CandidateClass> = Vec::new();
        let mut index: std::collections::HashMap<Vec<u32>, usize> =
            std::collections::HashMap::new();
        for (at, rf) in rfs.iter().enumerate() {
            assert_eq!(rf.ground().messages(), m, "mixed ground sets");
            assert_eq!(rf.ground().links(), n, "mixed ground sets");
            let mut masks = vec![0u32; m];
            for s in UpSet::enumerate(n) {
                for (j, mask) in masks.iter_mut().enumerate() {
                    if rf.decodable(s, j) {
                        *mask |= 1 << s.0;
                    }
                }
            }
            let systematic = rf.is_systematic();
            match index.get(&masks) {
                Some(&i) => {
                    classes[i].any_systematic |= systematic;
                    classes[i].rank_members.push(at);
                }
                None => {
                    index.insert(masks.clone(), classes.len());
                    classes.push(CandidateClass {
                        message_masks: masks,
                        any_systematic: systematic,
                        representative: Vec::new(),
                        multisets: Vec::new(),
                        rank_members: vec![at],
                    });
                }
            }
        }
        Ok(CandidateClasses {
            m,
            n,
            field: None,
            points: Vec::new(),
            classes,
            arrangement_count: rfs.len() as u64,
        })
    }

    /// Materialize an arrangement of point indices as a `Code`.
    pub fn code_of_tuple(&self, tuple: &[u16]) -> Code {
        let field = self.field.expect("code classes carry a field");
        let columns: Vec<Vec<u16>> =
            tuple.iter().map(|&i| self.points[i as usize].clone()).collect();
        Code::from_columns(field, &columns).expect("projective columns form a code")
    }

    /// Sorted point indices of a code's columns, if every column is a
    /// projective point of this set (after canonical rescaling).
    pub fn multiset_of_code(&self, code: &Code) -> Option<Vec<u16>> {
        let field = self.field?;
        let mut indices = Vec::with_capacity(code.link_count());
        for i in 0..code.link_count() {
            let mut col = code.column(i);
            if col.len() < self.m {
                col.resize(self.m, 0);
            } else if col.len() > self.m {
                return None;
            }
            let lead = *col.iter().find(|&&c| c != 0)?;
            let inv = field.inv(lead);
            for c in col.iter_mut() {
                *c = field.mul(*c, inv);
            }
            let at = self.points.iter().position(|p| *p == col)?;
            indices.push(at as u16);
        }
        indices.sort_unstable();
        Some(indices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::unit_scenario;

    #[test]
    fn projective_point_counts() {
        assert_eq!(projective_points(2, FieldOrder::BINARY).len(), 3);
        assert_eq!(projective_points(3, FieldOrder::BINARY).len(), 7);
        assert_eq!(projective_points(2, FieldOrder::TERNARY).len(), 4);
        assert_eq!(projective_points(3, FieldOrder::TERNARY).len(), 13);
    }

    #[test]
    fn points_are_canonical() {
        for p in projective_points(3, FieldOrder::TERNARY) {
            assert_eq!(*p.iter().find(|&&c| c != 0).unwrap(), 1);
        }
    }

    #[test]
    fn multiset_counts() {
        // C(3+3-1, 3) = 10
        let codes = enumerate_candidate_codes(2, 3, FieldOrder::BINARY, false).unwrap();
        assert_eq!(codes.len(), 10);
        // C(13+2-1, 2) = 91
        let codes = enumerate_candidate_codes(3, 2, FieldOrder::TERNARY, false).unwrap();
        assert_eq!(codes.len(), 91);
    }

    #[test]
    fn candidates_round_trip_notation() {
        for code in enumerate_candidate_codes(3, 3, FieldOrder::TERNARY, false).unwrap() {
            let text = code.to_string();
            assert_eq!(Code::parse(&text, FieldOrder::TERNARY).unwrap(), code);
        }
    }

    #[test]
    fn pruning_drops_reducible_codes() {
        let all = enumerate_candidate_codes(2, 2, FieldOrder::BINARY, false).unwrap();
        let pruned = enumerate_candidate_codes(2, 2, FieldOrder::BINARY, true).unwrap();
        assert!(pruned.len() < all.len());
        for code in &pruned {
            assert_eq!(&code.reduced(), code, "{code} should be irreducible");
        }
        for code in &all {
            if !pruned.contains(code) {
                assert_ne!(&code.reduced(), code, "{code} was pruned but is irreducible");
            }
        }
    }

    #[test]
    fn size_guard() {
        assert!(matches!(
            enumerate_candidate_codes(4, 3, FieldOrder::BINARY, false),
            Err(CandidateError::TooManyMessages(4))
        ));
        assert!(matches!(
            enumerate_candidate_codes(3, 6, FieldOrder::BINARY, false),
            Err(CandidateError::TooManyLinks(6))
        ));
        assert!(matches!(
            enumerate_candidate_codes(2, 2, FieldOrder::new(5).unwrap(), false),
            Err(CandidateError::FieldTooLarge(5))
        ));
    }

    #[test]
    fn class_masks_match_code_payoffs() {
        use rand::{Rng, SeedableRng};
        let classes = CandidateClasses::from_code_tuples(2, 3, FieldOrder::BINARY, false).unwrap();
        assert_eq!(classes.arrangement_count, 27);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for class in &classes.classes {
            let code = classes.code_of_tuple(&class.representative);
            for _ in 0..5 {
                let probs: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
                let worths = [rng.gen::<f64>() * 9.0, rng.gen::<f64>() * 9.0];
                let scenario = unit_scenario(&probs, &worths);
                let direct = code.payoff(&scenario).unwrap();
                let from_masks: f64 = (0..2)
                    .map(|j| {
                        let mask = class.message_masks[j];
                        let p: f64 = UpSet::enumerate(3)
                            .filter(|s| mask >> s.0 & 1 == 1)
                            .map(|s| scenario.upset_prob(s))
                            .sum();
                        worths[j] * p
                    })
                    .sum();
                assert!((direct - from_masks).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn class_systematic_flags_match_members() {
        let classes = CandidateClasses::from_code_tuples(2, 3, FieldOrder::BINARY, false).unwrap();
        for class in &classes.classes {
            let rep = classes.code_of_tuple(&class.representative);
            if rep.is_systematic() {
                assert!(class.any_systematic);
            }
        }
        // The all-sum arrangement (A+B,A+B,A+B) is never systematic.
        let sums = classes
            .classes
            .iter()
            .find(|c| c.message_masks.iter().all(|&m| m == 0))
            .expect("undecodable class exists");
        assert!(!sums.any_systematic);
    }

    #[test]
    fn multiset_lookup_rescales() {
        let classes = CandidateClasses::from_code_tuples(3, 5, FieldOrder::TERNARY, true).unwrap();
        let pattern = Code::parse("A,B,A+B,A+C,B+2C", FieldOrder::TERNARY).unwrap();
        let scaled = Code::parse("A,2B,2A+2B,A+C,B+2C", FieldOrder::TERNARY).unwrap();
        let a = classes.multiset_of_code(&pattern).unwrap();
        let b = classes.multiset_of_code(&scaled).unwrap();
        assert_eq!(a, b);
    }
}
