//! Arithmetic over small prime fields GF(q) and the Gaussian elimination
//! helpers used for decodability and rank computations.
//!
//! Field elements are plain `u16` values in `0..q`; all operations are exact.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field order.
pub const MAX_FIELD_ORDER: u16 = 257;

/// A prime field order `q`, `2 <= q <= 257`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u16", into = "u16")]
pub struct FieldOrder(u16);

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("field order {0} is not prime")]
    NotPrime(u16),
    #[error("field order {0} exceeds the supported maximum of {MAX_FIELD_ORDER}")]
    TooLarge(u16),
}

fn is_prime(n: u16) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= u32::from(n) {
        if u32::from(n) % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldOrder {
    pub fn new(q: u16) -> Result<Self, FieldError> {
        if q > MAX_FIELD_ORDER {
            return Err(FieldError::TooLarge(q));
        }
        if !is_prime(q) {
            return Err(FieldError::NotPrime(q));
        }
        Ok(FieldOrder(q))
    }

    /// GF(2), the default field for code notation.
    pub const BINARY: FieldOrder = FieldOrder(2);
    /// GF(3), the smallest field with a combining coefficient other than 1.
    pub const TERNARY: FieldOrder = FieldOrder(3);

    pub fn order(&self) -> u16 {
        self.0
    }

    /// Reduce an arbitrary integer into `0..q`.
    pub fn reduce(&self, x: u64) -> u16 {
        (x % u64::from(self.0)) as u16
    }

    pub fn add(&self, a: u16, b: u16) -> u16 {
        let s = u32::from(a) + u32::from(b);
        (s % u32::from(self.0)) as u16
    }

    pub fn sub(&self, a: u16, b: u16) -> u16 {
        let s = u32::from(a) + u32::from(self.0) - u32::from(b);
        (s % u32::from(self.0)) as u16
    }

    pub fn neg(&self, a: u16) -> u16 {
        self.sub(0, a)
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        (u32::from(a) * u32::from(b) % u32::from(self.0)) as u16
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(&self, a: u16) -> u16 {
        assert!(a != 0, "zero has no inverse");
        // Fermat: a^(q-2) mod q. q is tiny, so square-and-multiply is plenty.
        let mut result = 1u16;
        let mut base = a % self.0;
        let mut exp = self.0 - 2;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        result
    }
}

impl TryFrom<u16> for FieldOrder {
    type Error = FieldError;
    fn try_from(q: u16) -> Result<Self, FieldError> {
        FieldOrder::new(q)
    }
}

impl From<FieldOrder> for u16 {
    fn from(f: FieldOrder) -> u16 {
        f.0
    }
}

/// Row basis in reduced echelon form over GF(q). Rows are dense vectors of a
/// fixed dimension; insertion keeps the basis reduced.
#[derive(Debug, Clone)]
pub struct RowBasis {
    field: FieldOrder,
    dim: usize,
    rows: Vec<Vec<u16>>,
    pivots: Vec<usize>,
}

impl RowBasis {
    pub fn new(field: FieldOrder, dim: usize) -> Self {
        RowBasis { field, dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the basis in place; the remainder is zero exactly
    /// when `v` lies in the span.
    fn reduce_in_place(&self, v: &mut [u16]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c != 0 {
                for (vi, ri) in v.iter_mut().zip(row) {
                    *vi = self.field.sub(*vi, self.field.mul(c, *ri));
                }
            }
        }
    }

    /// Insert a vector, returning true if it enlarged the span.
    pub fn insert(&mut self, v: &[u16]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut v = v.to_vec();
        self.reduce_in_place(&mut v);
        let Some(pivot) = v.iter().position(|&c| c != 0) else {
            return false;
        };
        // Normalize the new row and eliminate it from the existing ones.
        let inv = self.field.inv(v[pivot]);
        for c in v.iter_mut() {
            *c = self.field.mul(*c, inv);
        }
        for (row, &p) in self.rows.iter_mut().zip(&self.pivots) {
            debug_assert_ne!(p, pivot);
            let c = row[pivot];
            if c != 0 {
                for (ri, vi) in row.iter_mut().zip(&v) {
                    *ri = self.field.sub(*ri, self.field.mul(c, *vi));
                }
            }
        }
        self.rows.push(v);
        self.pivots.push(pivot);
        true
    }

    pub fn contains(&self, v: &[u16]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut v = v.to_vec();
        self.reduce_in_place(&mut v);
        v.iter().all(|&c| c == 0)
    }

    /// Whether the unit vector `e_i` lies in the span.
    pub fn contains_unit(&self, i: usize) -> bool {
        let mut v = vec![0u16; self.dim];
        v[i] = 1;
        self.contains(&v)
    }
}

/// Rank of a set of vectors over GF(q).
pub fn rank_of<'a, I>(field: FieldOrder, dim: usize, vectors: I) -> usize
where
    I: IntoIterator<Item = &'a [u16]>,
{
    let mut basis = RowBasis::new(field, dim);
    for v in vectors {
        basis.insert(v);
    }
    basis.rank()
}
