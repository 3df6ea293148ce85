//! Per-cardinality solution counts.

use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// `counts[k]` = number of solutions of size k. Trailing zeros are not
/// significant: equality ignores them.
#[derive(Clone, Debug, Default)]
pub struct CountVector {
    pub counts: Vec<BigInt>,
}

impl PartialEq for CountVector {
    fn eq(&self, other: &Self) -> bool {
        let n = self.counts.len().max(other.counts.len());
        (0..n).all(|k| self.get(k) == other.get(k))
    }
}

impl Eq for CountVector {}

impl CountVector {
    pub fn new(counts: Vec<BigInt>) -> Self {
        CountVector { counts }
    }

    pub fn from_u64s(v: &[u64]) -> Self {
        CountVector { counts: v.iter().map(|&x| BigInt::from(x)).collect() }
    }

    /// The all-zero vector.
    pub fn zero() -> Self {
        CountVector { counts: Vec::new() }
    }

    /// [1]: one empty solution.
    pub fn one() -> Self {
        CountVector { counts: vec![BigInt::one()] }
    }

    pub fn get(&self, k: usize) -> BigInt {
        self.counts.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.counts.iter().all(|c| !c.is_negative())
    }

    /// Multiplies by x^k.
    pub fn shift(&self, k: usize) -> Self {
        let mut counts = vec![BigInt::zero(); k];
        counts.extend(self.counts.iter().cloned());
        CountVector { counts }
    }

    pub fn total(&self) -> BigInt {
        self.counts.iter().sum()
    }

    /// Exactly `n + 1` entries (truncating beyond `n`).
    pub fn padded(&self, n: usize) -> Self {
        CountVector { counts: (0..=n).map(|k| self.get(k)).collect() }
    }

    pub fn trimmed(mut self) -> Self {
        while self.counts.last().is_some_and(Zero::is_zero) {
            self.counts.pop();
        }
        self
    }

    /// Smallest k with a nonzero count.
    pub fn min_size(&self) -> Option<usize> {
        self.counts.iter().position(|c| !c.is_zero())
    }

    pub fn convolve(&self, other: &Self) -> Self {
        if self.counts.is_empty() || other.counts.is_empty() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.counts.len() + other.counts.len() - 1];
        for (i, a) in self.counts.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.counts.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CountVector { counts: out }
    }

    /// Lines `k count`.
    pub fn to_lines(&self) -> Vec<String> {
        self.counts.iter().enumerate().map(|(k, c)| format!("{k} {c}")).collect()
    }
}

impl fmt::Display for CountVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

fn zip_with(a: &CountVector, b: &CountVector, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> CountVector {
    let n = a.counts.len().max(b.counts.len());
    CountVector { counts: (0..n).map(|k| f(&a.get(k), &b.get(k))).collect() }
}

impl Add for &CountVector {
    type Output = CountVector;
    fn add(self, o: &CountVector) -> CountVector {
        zip_with(self, o, |x, y| x + y)
    }
}

impl Sub for &CountVector {
    type Output = CountVector;
    fn sub(self, o: &CountVector) -> CountVector {
        zip_with(self, o, |x, y| x - y)
    }
}

/// Counts of a disjoint union: the discrete convolution.
pub fn combine_components(a: &CountVector, b: &CountVector) -> CountVector {
    a.convolve(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_triangles_convolve() {
        let t = CountVector::from_u64s(&[0, 3, 3, 1]);
        let expect = CountVector::from_u64s(&[0, 0, 9, 18, 15, 6, 1]);
        assert_eq!(combine_components(&t, &t).counts, expect.counts);
    }

    #[test]
    fn identity_and_zero() {
        let b = CountVector::from_u64s(&[2, 0, 5]);
        assert_eq!(combine_components(&CountVector::one(), &b), b);
        assert!(combine_components(&CountVector::zero(), &b).is_zero());
    }

    #[test]
    fn equality_ignores_trailing_zeros() {
        assert_eq!(CountVector::from_u64s(&[0, 1]), CountVector::from_u64s(&[0, 1, 0, 0]));
        assert_ne!(CountVector::from_u64s(&[0, 1]), CountVector::from_u64s(&[1]));
    }

    #[test]
    fn shift_and_sub() {
        let a = CountVector::from_u64s(&[1, 2]);
        assert_eq!(a.shift(2), CountVector::from_u64s(&[0, 0, 1, 2]));
        let d = &a - &CountVector::from_u64s(&[1, 3]);
        assert!(!d.is_nonnegative());
    }
}
