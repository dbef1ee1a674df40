//! Inter-link codes: one linear form over GF(q) per link, acting on
//! unit-size message portions. Covers the text notation, exact decodability
//! by elimination, expected payoff, the systematic-code test, the
//! dominance-preserving reduction rule, and the rank-function view.

use crate::gf::{FieldOrder, RowBasis};
use crate::matroid::{GroundSet, MatroidError, RankFunction};
use crate::model::{Scenario, UpSet};
use crate::real::Real;
use std::fmt;
use thiserror::Error;

/// Notation supports messages A..Z only.
pub const MAX_MESSAGES: usize = 26;

/// One unit-size piece of a message. `portion` is 1-based, matching the
/// `A1, A2, ...` notation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortionId {
    pub message: usize,
    pub portion: u32,
}

impl fmt::Display for PortionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (b'A' + self.message as u8) as char, self.portion)
    }
}

/// One term of a linear form: a nonzero coefficient on a portion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub portion: PortionId,
    pub coeff: u16,
}

/// The symbol a link transmits: a linear form over portions, or nothing at
/// all (the `-` notation) when the code leaves the link unused.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CodeSymbol {
    terms: Vec<Term>,
}

impl CodeSymbol {
    pub fn empty() -> Self {
        CodeSymbol { terms: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }
}

/// A code: one symbol per link over a common prime field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Code {
    field: FieldOrder,
    symbols: Vec<CodeSymbol>,
    /// Portions used per message index; trailing unused messages trimmed.
    portion_counts: Vec<u32>,
}

#[derive(Debug, Error, PartialEq)]
pub enum CodeError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("coefficient at byte {pos} reduces to zero in GF({q})")]
    ZeroCoefficient { pos: usize, q: u16 },
    #[error("coefficient {coeff} of {portion} not in 1..{q}")]
    CoefficientOutOfField { portion: PortionId, coeff: u16, q: u16 },
    #[error("duplicate term for {portion} within one symbol")]
    DuplicateTerm { portion: PortionId },
    #[error("portion {missing} of message {message} is skipped while portion {used} is used")]
    PortionGap { message: char, missing: u32, used: u32 },
    #[error("code must place a symbol on at least one link")]
    NoSymbols,
    #[error("message index {0} does not fit the A..Z notation")]
    MessageOutOfAlphabet(usize),
}

#[derive(Debug, Error, PartialEq)]
pub enum PayoffError {
    #[error("code uses message index {used} but scenario has only {have} messages")]
    MessageOutOfRange { used: usize, have: usize },
    #[error("code spans {code} links but scenario has {scenario}")]
    LinkCountMismatch { code: usize, scenario: usize },
}

#[derive(Debug, Error, PartialEq)]
pub enum RankOfCodeError {
    #[error("link {0} carries no symbol; the rank view needs every link to carry one unit")]
    EmptySymbol(usize),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

impl Code {
    /// Build a code from raw symbols, normalizing term order and checking
    /// every structural invariant.
    pub fn from_symbols(
        field: FieldOrder,
        symbols: Vec<Vec<Term>>,
    ) -> Result<Code, CodeError> {
        let mut normalized = Vec::with_capacity(symbols.len());
        let mut max_portion: Vec<u32> = Vec::new();
        let mut used: Vec<Vec<u32>> = Vec::new();
        for terms in symbols {
            let mut terms = terms;
            terms.sort_by_key(|t| t.portion);
            for pair in terms.windows(2) {
                if pair[0].portion == pair[1].portion {
                    return Err(CodeError::DuplicateTerm { portion: pair[0].portion });
                }
            }
            for t in &terms {
                if t.portion.message >= MAX_MESSAGES {
                    return Err(CodeError::MessageOutOfAlphabet(t.portion.message));
                }
                if t.coeff == 0 || t.coeff >= field.order() {
                    return Err(CodeError::CoefficientOutOfField {
                        portion: t.portion,
                        coeff: t.coeff,
                        q: field.order(),
                    });
                }
                let j = t.portion.message;
                if j >= max_portion.len() {
                    max_portion.resize(j + 1, 0);
                    used.resize(j + 1, Vec::new());
                }
                max_portion[j] = max_portion[j].max(t.portion.portion);
                used[j].push(t.portion.portion);
            }
            normalized.push(CodeSymbol { terms });
        }
        if normalized.iter().all(|s| s.is_empty()) {
            return Err(CodeError::NoSymbols);
        }
        // Portion indices per message must cover 1..=max without gaps.
        for (j, (&count, portions)) in max_portion.iter().zip(&used).enumerate() {
            for p in 1..=count {
                if !portions.contains(&p) {
                    return Err(CodeError::PortionGap {
                        message: (b'A' + j as u8) as char,
                        missing: p,
                        used: count,
                    });
                }
            }
        }
        Ok(Code { field, symbols: normalized, portion_counts: max_portion })
    }

    /// Single-portion code from one coefficient column per link; a column of
    /// zeros leaves the link unused. `columns[i][j]` is the coefficient of
    /// message `j` on link `i`.
    pub fn from_columns(field: FieldOrder, columns: &[Vec<u16>]) -> Result<Code, CodeError> {
        let symbols = columns
            .iter()
            .map(|col| {
                col.iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(j, &c)| Term { portion: PortionId { message: j, portion: 1 }, coeff: c })
                    .collect()
            })
            .collect();
        Code::from_symbols(field, symbols)
    }

    /// Parse the `A,B,A+B` notation. Whitespace is ignored; `-` marks an
    /// unused link; a missing portion index means portion 1 and a missing
    /// coefficient means 1; coefficients are reduced modulo the field order.
    pub fn parse(text: &str, field: FieldOrder) -> Result<Code, CodeError> {
        Parser { bytes: text.as_bytes(), pos: 0, field }.parse()
    }

    pub fn field(&self) -> FieldOrder {
        self.field
    }

    pub fn symbols(&self) -> &[CodeSymbol] {
        &self.symbols
    }

    /// Number of links the code spans (including unused ones).
    pub fn link_count(&self) -> usize {
        self.symbols.len()
    }

    pub fn uses_link(&self, i: usize) -> bool {
        !self.symbols[i].is_empty()
    }

    /// Portions used by message `j` (0 when the message does not appear).
    pub fn portion_count(&self, j: usize) -> u32 {
        self.portion_counts.get(j).copied().unwrap_or(0)
    }

    /// One past the highest message index used.
    pub fn message_span(&self) -> usize {
        self.portion_counts.len()
    }

    /// Total number of distinct portions, all messages together.
    pub fn total_portions(&self) -> usize {
        self.portion_counts.iter().map(|&c| c as usize).sum()
    }

    /// All portions in flattened order: message-major, portion ascending.
    pub fn portions(&self) -> Vec<PortionId> {
        let mut out = Vec::with_capacity(self.total_portions());
        for (j, &count) in self.portion_counts.iter().enumerate() {
            for p in 1..=count {
                out.push(PortionId { message: j, portion: p });
            }
        }
        out
    }

    /// Flattened index of a portion in the coefficient space.
    fn portion_index(&self, id: PortionId) -> usize {
        let before: u32 = self.portion_counts[..id.message].iter().sum();
        (before + id.portion - 1) as usize
    }

    /// Coefficient vector of the symbol on link `i`, over the flattened
    /// portion space.
    pub fn column(&self, i: usize) -> Vec<u16> {
        let mut v = vec![0u16; self.total_portions()];
        for t in &self.symbols[i].terms {
            v[self.portion_index(t.portion)] = t.coeff;
        }
        v
    }

    /// Portions exactly recoverable when the links in `s` are up: those whose
    /// unit vector lies in the GF(q)-span of the received columns.
    pub fn recoverable_portions(&self, s: UpSet) -> Vec<PortionId> {
        let dim = self.total_portions();
        let mut basis = RowBasis::new(self.field, dim);
        for i in 0..self.symbols.len() {
            if s.contains(i) {
                basis.insert(&self.column(i));
            }
        }
        self.portions()
            .into_iter()
            .enumerate()
            .filter(|(t, _)| basis.contains_unit(*t))
            .map(|(_, id)| id)
            .collect()
    }

    /// Recoverability over every up-pattern: entry `s` has bit `t` set when
    /// flattened portion `t` is recoverable from up-set `s`.
    pub fn recovery_table(&self) -> Vec<u64> {
        let n = self.link_count();
        let dim = self.total_portions();
        assert!(dim <= 64, "too many portions for the recovery table");
        let columns: Vec<Vec<u16>> = (0..n).map(|i| self.column(i)).collect();
        UpSet::enumerate(n)
            .map(|s| {
                let mut basis = RowBasis::new(self.field, dim);
                for (i, col) in columns.iter().enumerate() {
                    if s.contains(i) {
                        basis.insert(col);
                    }
                }
                let mut bits = 0u64;
                for t in 0..dim {
                    if basis.contains_unit(t) {
                        bits |= 1 << t;
                    }
                }
                bits
            })
            .collect()
    }

    /// Expected recovered worth of one unit of this code under the scenario:
    /// each used link carries one data unit and every portion has unit size.
    pub fn payoff<R: Real>(&self, scenario: &Scenario<R>) -> Result<R, PayoffError> {
        self.check_dims(scenario)?;
        let table = self.recovery_table();
        Ok(self.payoff_from_table(&table, scenario))
    }

    /// Payoff with a precomputed [`Code::recovery_table`], for callers that
    /// sweep many scenarios over one code.
    pub fn payoff_from_table<R: Real>(&self, table: &[u64], scenario: &Scenario<R>) -> R {
        let portions = self.portions();
        let mut total = R::zero();
        for (mask, &bits) in table.iter().enumerate() {
            let p = scenario.upset_prob(UpSet(mask as u32));
            let mut worth = R::zero();
            let mut rest = bits;
            while rest != 0 {
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                worth = worth + scenario.messages[portions[t].message].worth_per_unit;
            }
            total = total + p * worth;
        }
        total
    }

    fn check_dims<R: Real>(&self, scenario: &Scenario<R>) -> Result<(), PayoffError> {
        if self.message_span() > scenario.message_count() {
            return Err(PayoffError::MessageOutOfRange {
                used: self.message_span() - 1,
                have: scenario.message_count(),
            });
        }
        if self.link_count() != scenario.link_count() {
            return Err(PayoffError::LinkCountMismatch {
                code: self.link_count(),
                scenario: scenario.link_count(),
            });
        }
        Ok(())
    }

    /// Whether every portion appearing in the code is also transmitted alone
    /// (a single-term symbol, any nonzero coefficient) on at least one link.
    pub fn is_systematic(&self) -> bool {
        let solo: Vec<PortionId> = self
            .symbols
            .iter()
            .filter(|s| s.terms.len() == 1)
            .map(|s| s.terms[0].portion)
            .collect();
        self.portions().into_iter().all(|p| solo.contains(&p))
    }

    /// Apply the dominance-preserving replacement rule until fixpoint: a
    /// portion that occurs exactly once in the whole code, inside a combined
    /// symbol, replaces that symbol. When several portions of a symbol
    /// qualify the lowest (message, portion) wins; [`Code::reduced_with`]
    /// prefers the highest-worth message instead.
    pub fn reduced(&self) -> Code {
        self.reduce_impl(|candidates| candidates[0])
    }

    /// Like [`Code::reduced`], but replacement candidates are ranked by the
    /// scenario's message worths (highest first, index as tie-break).
    pub fn reduced_with<R: Real>(&self, scenario: &Scenario<R>) -> Code {
        let worths: Vec<R> = scenario.messages.iter().map(|m| m.worth_per_unit).collect();
        self.reduce_impl(|candidates| {
            *candidates
                .iter()
                .min_by(|a, b| {
                    let wa = worths.get(a.message).copied().unwrap_or_else(R::zero);
                    let wb = worths.get(b.message).copied().unwrap_or_else(R::zero);
                    wb.partial_cmp(&wa).unwrap().then(a.cmp(b))
                })
                .unwrap()
        })
    }

    fn reduce_impl(&self, choose: impl Fn(&[PortionId]) -> PortionId) -> Code {
        let mut symbols: Vec<Vec<Term>> =
            self.symbols.iter().map(|s| s.terms.clone()).collect();
        loop {
            let mut occurrences: std::collections::HashMap<PortionId, usize> =
                std::collections::HashMap::new();
            for terms in &symbols {
                for t in terms {
                    *occurrences.entry(t.portion).or_insert(0) += 1;
                }
            }
            let mut replaced = false;
            for terms in symbols.iter_mut() {
                if terms.len() < 2 {
                    continue;
                }
                let mut lonely: Vec<PortionId> = terms
                    .iter()
                    .map(|t| t.portion)
                    .filter(|p| occurrences[p] == 1)
                    .collect();
                if lonely.is_empty() {
                    continue;
                }
                lonely.sort();
                let keep = choose(&lonely);
                *terms = vec![Term { portion: keep, coeff: 1 }];
                replaced = true;
                break;
            }
            if !replaced {
                break;
            }
        }
        renumber_portions(&mut symbols);
        Code::from_symbols(self.field, symbols).expect("reduction preserves validity")
    }

    /// The rank-function view: ground set of all portions plus all links,
    /// ranks computed by GF(q) elimination. Requires every link to carry a
    /// symbol (one data unit per link).
    pub fn rank_function(&self) -> Result<RankFunction, RankOfCodeError> {
        if let Some(i) = (0..self.link_count()).find(|&i| !self.uses_link(i)) {
            return Err(RankOfCodeError::EmptySymbol(i));
        }
        let m = self.total_portions();
        let n = self.link_count();
        let ground = GroundSet::new(m, n)?;
        let columns: Vec<Vec<u16>> = (0..n).map(|i| self.column(i)).collect();
        let mut unit = vec![0u16; m];
        let ranks = (0..ground.subset_count())
            .map(|subset| {
                let mut basis = RowBasis::new(self.field, m);
                for t in 0..m {
                    if subset >> t & 1 == 1 {
                        unit.iter_mut().for_each(|c| *c = 0);
                        unit[t] = 1;
                        basis.insert(&unit);
                    }
                }
                for (i, col) in columns.iter().enumerate() {
                    if subset >> (m + i) & 1 == 1 {
                        basis.insert(col);
                    }
                }
                basis.rank() as u8
            })
            .collect();
        Ok(RankFunction::new(ground, ranks)?)
    }

    /// Scenario over this code's portions: every portion becomes a unit-size
    /// message carrying its parent message's worth. Pairs with
    /// [`Code::rank_function`], whose ground set is portion-indexed.
    pub fn portion_scenario<R: Real>(&self, scenario: &Scenario<R>) -> Scenario<R> {
        Scenario {
            links: scenario.links.clone(),
            messages: self
                .portions()
                .iter()
                .map(|p| crate::model::MessageSpec {
                    size: R::one(),
                    worth_per_unit: scenario.messages[p.message].worth_per_unit,
                })
                .collect(),
        }
    }
}

/// Renumber portions per message into a gap-free 1..=t range, preserving
/// relative order. Needed after reduction drops portions.
fn renumber_portions(symbols: &mut [Vec<Term>]) {
    use std::collections::BTreeSet;
    let mut used: std::collections::HashMap<usize, BTreeSet<u32>> =
        std::collections::HashMap::new();
    for terms in symbols.iter() {
        for t in terms {
            used.entry(t.portion.message).or_default().insert(t.portion.portion);
        }
    }
    let remap: std::collections::HashMap<PortionId, u32> = used
        .iter()
        .flat_map(|(&message, portions)| {
            portions
                .iter()
                .enumerate()
                .map(move |(new, &old)| (PortionId { message, portion: old }, new as u32 + 1))
        })
        .collect();
    for terms in symbols.iter_mut() {
        for t in terms.iter_mut() {
            t.portion.portion = remap[&t.portion];
        }
    }
}

impl fmt::Display for Code {
    /// Canonical text: terms sorted by (message, portion), coefficient 1
    /// omitted, portion suffix printed only for messages split into several
    /// portions. Round-trips through [`Code::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, symbol) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            if symbol.is_empty() {
                f.write_str("-")?;
                continue;
            }
            for (k, t) in symbol.terms.iter().enumerate() {
                if k > 0 {
                    f.write_str("+")?;
                }
                if t.coeff != 1 {
                    write!(f, "{}", t.coeff)?;
                }
                write!(f, "{}", (b'A' + t.portion.message as u8) as char)?;
                if self.portion_count(t.portion.message) >= 2 {
                    write!(f, "{}", t.portion.portion)?;
                }
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    field: FieldOrder,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn syntax(&self, msg: &str) -> CodeError {
        CodeError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn parse(mut self) -> Result<Code, CodeError> {
        let mut symbols = Vec::new();
        loop {
            symbols.push(self.parse_symbol()?);
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                None => break,
                Some(c) => {
                    return Err(self.syntax(&format!(
                        "expected ',' or end of code, found {:?}",
                        c as char
                    )))
                }
            }
        }
        Code::from_symbols(self.field, symbols)
    }

    fn parse_symbol(&mut self) -> Result<Vec<Term>, CodeError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Vec::new());
        }
        let mut terms = vec![self.parse_term()?];
        while self.peek() == Some(b'+') {
            self.pos += 1;
            terms.push(self.parse_term()?);
        }
        Ok(terms)
    }

    fn parse_term(&mut self) -> Result<Term, CodeError> {
        let coeff_pos = self.pos;
        let coeff = match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let raw = self.parse_number()?;
                let reduced = self.field.reduce(raw);
                if reduced == 0 {
                    return Err(CodeError::ZeroCoefficient {
                        pos: coeff_pos,
                        q: self.field.order(),
                    });
                }
                reduced
            }
            _ => 1,
        };
        let message = match self.peek() {
            Some(c @ b'A'..=b'Z') => {
                self.pos += 1;
                (c - b'A') as usize
            }
            _ => return Err(self.syntax("expected a message letter A..Z")),
        };
        let portion = match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let raw = self.parse_number()?;
                if raw == 0 {
                    return Err(self.syntax("portion index must be at least 1"));
                }
                raw as u32
            }
            _ => 1,
        };
        Ok(Term { portion: PortionId { message, portion }, coeff })
    }

    fn parse_number(&mut self) -> Result<u64, CodeError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos - start > 6 {
            return Err(self.syntax("number has too many digits"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("digits are utf8")
            .parse()
            .map_err(|_| self.syntax("expected a number"))
    }
}
