//! Enumeration of fixed-length words over a finite alphabet.
//!
//! Words are indexed big-endian: the first symbol is the most significant
//! digit, so index order coincides with lexicographic order.

use crate::error::{Error, Result};

/// Default cap on the number of tuples any exhaustive check may visit.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Caller-configurable limit for exhaustive enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u128);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    pub fn check(self, required: u128) -> Result<()> {
        if required > self.0 {
            Err(Error::BudgetExceeded {
                required,
                budget: self.0,
            })
        } else {
            Ok(())
        }
    }
}

/// `base^exp` as u128, saturating on overflow.
pub fn pow_sat(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordSpace {
    pub alphabet: usize,
    pub len: usize,
}

impl WordSpace {
    pub fn new(alphabet: usize, len: usize) -> Self {
        WordSpace { alphabet, len }
    }

    /// Number of words; fails if it does not fit in memory-addressable range.
    pub fn count(&self) -> Result<usize> {
        let c = pow_sat(self.alphabet, self.len);
        if c > (1u128 << 40) {
            return Err(Error::BudgetExceeded {
                required: c,
                budget: 1u128 << 40,
            });
        }
        Ok(c as usize)
    }

    pub fn decode(&self, mut idx: usize) -> Vec<usize> {
        let mut w = vec![0; self.len];
        for slot in w.iter_mut().rev() {
            *slot = idx % self.alphabet;
            idx /= self.alphabet;
        }
        w
    }

    pub fn encode(&self, word: &[usize]) -> Result<usize> {
        if word.len() != self.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                got: word.len(),
            });
        }
        let mut idx = 0usize;
        for &s in word {
            if s >= self.alphabet {
                return Err(Error::SymbolOutOfRange {
                    symbol: s,
                    size: self.alphabet,
                });
            }
            idx = idx * self.alphabet + s;
        }
        Ok(idx)
    }

    /// Place value of position `i` in the index.
    pub fn weight(&self, i: usize) -> usize {
        self.alphabet.pow((self.len - 1 - i) as u32)
    }

    /// Symbol at position `i` of the word with index `idx`.
    pub fn symbol(&self, idx: usize, i: usize) -> usize {
        (idx / self.weight(i)) % self.alphabet
    }

    /// Index of the word obtained by setting position `i` to `s`.
    pub fn replace(&self, idx: usize, i: usize, s: usize) -> usize {
        let w = self.weight(i);
        let cur = (idx / w) % self.alphabet;
        idx - cur * w + s * w
    }

    /// Positions where the two words differ.
    pub fn diff_positions(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.len)
            .filter(|&i| self.symbol(a, i) != self.symbol(b, i))
            .collect()
    }

    pub fn hamming(&self, a: usize, b: usize) -> usize {
        (0..self.len)
            .filter(|&i| self.symbol(a, i) != self.symbol(b, i))
            .count()
    }
}
