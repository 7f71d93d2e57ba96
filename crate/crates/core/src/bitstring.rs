//! Packed bitstrings and the benchmark functions OneMax, LeadingOnes and
//! BinVal.
//!
//! Logical position `i` (0-based here, `i + 1` in the usual 1-based
//! notation) lives in word `i / 64` at bit `63 - i % 64`, so the first
//! position is the most significant bit of the first word. With that layout
//! the lexicographic order of the word vectors is exactly the BinVal order
//! and the leading-ones prefix is a run of leading one bits. Unused bits of
//! the last word are always zero.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

#[inline]
pub(crate) fn mask_of(i: usize) -> (usize, u64) {
    (i / WORD_BITS, 1u64 << (WORD_BITS - 1 - i % WORD_BITS))
}

/// A fixed-length search point in `{0,1}^n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    /// All-zeros string of length `n`.
    ///
    /// Panics if `n == 0`.
    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "bitstring length must be positive");
        Self {
            len: n,
            words: vec![0; words_for(n)],
        }
    }

    pub fn ones(n: usize) -> Self {
        let mut x = Self::zeros(n);
        x.words.iter_mut().for_each(|w| *w = u64::MAX);
        x.clear_padding();
        x
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut x = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            x.set(i, b);
        }
        x
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; kept for API symmetry with collections.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let (w, m) = mask_of(i);
        self.words[w] & m != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let (w, m) = mask_of(i);
        if value {
            self.words[w] |= m;
        } else {
            self.words[w] &= !m;
        }
    }

    #[inline]
    pub(crate) fn flip(&mut self, i: usize) {
        let (w, m) = mask_of(i);
        self.words[w] ^= m;
    }

    /// Packed words, most significant position first.
    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Length of the maximal all-ones prefix.
    pub fn leading_ones(&self) -> usize {
        let mut total = 0;
        for &w in &self.words {
            if w == u64::MAX {
                total += WORD_BITS;
            } else {
                total += w.leading_ones() as usize;
                break;
            }
        }
        total.min(self.len)
    }

    pub fn complement(&self) -> Self {
        let mut x = self.clone();
        x.words.iter_mut().for_each(|w| *w = !*w);
        x.clear_padding();
        x
    }

    pub fn is_all_ones(&self) -> bool {
        self.count_ones() == self.len
    }

    /// Indices of the set positions, in increasing order.
    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let lz = rest.leading_zeros() as usize;
                rest &= !(1u64 << (WORD_BITS - 1 - lz));
                Some(wi * WORD_BITS + lz)
            })
        })
    }

    fn clear_padding(&mut self) {
        let used = self.len % WORD_BITS;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX << (WORD_BITS - used);
            }
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Parse("empty bitstring".into()));
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(&bits))
    }
}

/// Exact, non-negative fitness value.
///
/// Backed by an arbitrary-width integer since BinVal reaches `2^n - 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fitness(BigUint);

impl Fitness {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl From<u64> for Fitness {
    fn from(v: u64) -> Self {
        Fitness(BigUint::from(v))
    }
}

impl From<BigUint> for Fitness {
    fn from(v: BigUint) -> Self {
        Fitness(v)
    }
}

impl fmt::Display for Fitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A pseudo-Boolean function to be maximised.
///
/// `compare` must agree with the order of `evaluate`; implementations
/// override it when the order can be decided without building the exact
/// fitness value.
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;

    fn evaluate(&self, x: &BitString) -> Fitness;

    fn compare(&self, a: &BitString, b: &BitString) -> Ordering {
        self.evaluate(a).cmp(&self.evaluate(b))
    }

    fn optimal_fitness(&self, n: usize) -> Fitness;

    fn is_optimal(&self, x: &BitString) -> bool {
        self.evaluate(x) == self.optimal_fitness(x.len())
    }
}

/// OneMax: number of ones.
pub fn onemax(x: &BitString) -> Fitness {
    Fitness::from(x.count_ones() as u64)
}

/// LeadingOnes: length of the all-ones prefix.
pub fn leadingones(x: &BitString) -> Fitness {
    Fitness::from(x.leading_ones() as u64)
}

/// BinVal: the string read as a binary number, first position most
/// significant. Exact for any length.
pub fn binval(x: &BitString) -> Fitness {
    let mut digits = Vec::with_capacity(x.words.len() * 2);
    for &w in x.words.iter().rev() {
        digits.push(w as u32);
        digits.push((w >> 32) as u32);
    }
    let padding = x.words.len() * WORD_BITS - x.len;
    Fitness(BigUint::new(digits) >> padding)
}

/// Lexicographic comparison, equivalent to comparing [`binval`] values.
#[inline]
pub fn binval_cmp(a: &BitString, b: &BitString) -> Ordering {
    a.words.cmp(&b.words)
}

/// The three benchmark functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    OneMax,
    LeadingOnes,
    BinVal,
}

impl Problem {
    pub const ALL: [Problem; 3] = [Problem::OneMax, Problem::LeadingOnes, Problem::BinVal];

    pub fn as_str(&self) -> &'static str {
        match self {
            Problem::OneMax => "onemax",
            Problem::LeadingOnes => "leadingones",
            Problem::BinVal => "binval",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "onemax" => Ok(Problem::OneMax),
            "leadingones" => Ok(Problem::LeadingOnes),
            "binval" => Ok(Problem::BinVal),
            other => Err(Error::Parse(format!(
                "unknown problem {other:?} (expected onemax, leadingones or binval)"
            ))),
        }
    }
}

impl Objective for Problem {
    fn name(&self) -> &str {
        self.as_str()
    }

    fn evaluate(&self, x: &BitString) -> Fitness {
        match self {
            Problem::OneMax => onemax(x),
            Problem::LeadingOnes => leadingones(x),
            Problem::BinVal => binval(x),
        }
    }

    #[inline]
    fn compare(&self, a: &BitString, b: &BitString) -> Ordering {
        match self {
            Problem::OneMax => a.count_ones().cmp(&b.count_ones()),
            Problem::LeadingOnes => a.leading_ones().cmp(&b.leading_ones()),
            Problem::BinVal => binval_cmp(a, b),
        }
    }

    fn optimal_fitness(&self, n: usize) -> Fitness {
        match self {
            Problem::OneMax | Problem::LeadingOnes => Fitness::from(n as u64),
            Problem::BinVal => Fitness((BigUint::from(1u8) << n) - 1u8),
        }
    }

    #[inline]
    fn is_optimal(&self, x: &BitString) -> bool {
        // 1^n is the unique maximiser of all three functions.
        x.is_all_ones()
    }
}
