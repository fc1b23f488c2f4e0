//! Finite combinatorics of Cantor space: bit words, the pairing function,
//! interleaving, prefix-free sets of words, partial assignments and exact
//! dyadic measure.
//!
//! Nothing in here uses floating point. Every measure is a [`Rational`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// A finite word over `{0,1}`.
///
/// Ordering is shortlex (length first, then lexicographic), which is the
/// canonical order used for every set of words in this crate.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        Self {
            bits: bits.into_iter().collect(),
        }
    }

    /// `bit` repeated `len` times.
    pub fn repeat(bit: bool, len: usize) -> Self {
        Self {
            bits: vec![bit; len],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn truncate(&mut self, len: usize) {
        self.bits.truncate(len);
    }

    /// The word extended by one bit.
    pub fn child(&self, bit: bool) -> Self {
        let mut c = self.clone();
        c.push(bit);
        c
    }

    /// The first `len` bits (or the whole word if it is shorter).
    pub fn prefix(&self, len: usize) -> Self {
        Self {
            bits: self.bits[..len.min(self.bits.len())].to_vec(),
        }
    }

    /// `self ⪯ other`.
    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.len() <= other.len() && other.bits[..self.len()] == self.bits[..]
    }

    /// Comparable under the prefix order (one extends the other).
    pub fn is_compatible(&self, other: &BitString) -> bool {
        let n = self.len().min(other.len());
        self.bits[..n] == other.bits[..n]
    }

    /// Length of the longest common prefix.
    pub fn common_prefix_len(&self, other: &BitString) -> usize {
        self.bits
            .iter()
            .zip(other.bits.iter())
            .take_while(|(a, b)| a == b)
            .count()
    }

    pub fn concat(&self, other: &BitString) -> Self {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Self { bits }
    }

    /// Every word of length `len`, in lexicographic order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64, "refusing to enumerate 2^{len} words");
        (0u64..(1u64 << len)).map(move |v| {
            BitString::from_bits((0..len).map(|i| (v >> (len - 1 - i)) & 1 == 1))
        })
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::parse(format!("invalid bit {other:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(|bits| Self { bits })
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self::from_bits(iter)
    }
}

/// Cantor pairing `⟨n,s⟩ = (n+s)(n+s+1)/2 + s`.
///
/// A bijection `ℕ×ℕ → ℕ` with `⟨n,s⟩ ≥ s`. Defined for `n + s < 2^31`.
pub fn pair(n: u64, s: u64) -> u64 {
    let t = n + s;
    t * (t + 1) / 2 + s
}

/// Inverse of [`pair`].
pub fn unpair(m: u64) -> (u64, u64) {
    // largest t with t(t+1)/2 <= m
    let mut t = ((8 * m as u128 + 1).isqrt() as u64 - 1) / 2;
    while t * (t + 1) / 2 > m {
        t -= 1;
    }
    while (t + 1) * (t + 2) / 2 <= m {
        t += 1;
    }
    let s = m - t * (t + 1) / 2;
    (t - s, s)
}

/// `a ⊕ b`: even positions from `a`, odd positions from `b`.
pub fn interleave(a: &BitString, b: &BitString) -> Result<BitString> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b.iter())
        .flat_map(|(x, y)| [x, y])
        .collect())
}

pub fn deinterleave(c: &BitString) -> Result<(BitString, BitString)> {
    if !c.len().is_multiple_of(2) {
        return Err(Error::OddLength(c.len()));
    }
    let even = c.iter().step_by(2).collect();
    let odd = c.iter().skip(1).step_by(2).collect();
    Ok((even, odd))
}

/// An exact rational number in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numerator: i64, denominator: i64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::parse("zero denominator"));
        }
        Ok(Self(BigRational::new(numerator.into(), denominator.into())))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    /// `2^-k`.
    pub fn dyadic(k: u64) -> Self {
        let den = BigInt::one() << (k as usize);
        Self(BigRational::new(BigInt::one(), den))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn half(&self) -> Self {
        Self(&self.0 / BigInt::from(2))
    }

    pub fn min(self, other: Self) -> Self {
        std::cmp::min(self, other)
    }

    /// `count / 2^k`, exactly.
    pub fn fraction_of_pow2(count: u64, k: u64) -> Self {
        let den = BigInt::one() << (k as usize);
        Self(BigRational::new(BigInt::from(count), den))
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite set of pairwise prefix-incomparable words.
///
/// Members are held in shortlex order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrefixFreeSet {
    members: BTreeSet<BitString>,
}

impl PrefixFreeSet {
    pub fn new<I: IntoIterator<Item = BitString>>(words: I) -> Result<Self> {
        let mut members = BTreeSet::new();
        for w in words {
            if let Some(dup) = members.replace(w) {
                return Err(Error::NotPrefixFree {
                    shorter: dup.to_string(),
                    longer: dup.to_string(),
                });
            }
        }
        // In plain lexicographic order every extension of a word follows it
        // immediately, so comparing neighbours is enough.
        let mut lex: Vec<&BitString> = members.iter().collect();
        lex.sort_by(|a, b| a.bits.cmp(&b.bits));
        for pair in lex.windows(2) {
            if pair[0].is_prefix_of(pair[1]) {
                return Err(Error::NotPrefixFree {
                    shorter: pair[0].to_string(),
                    longer: pair[1].to_string(),
                });
            }
        }
        Ok(Self { members })
    }

    /// Parses the prefix-set text format: one word per line, `#` starts a
    /// comment, blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut words = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let word = line
                .parse::<BitString>()
                .map_err(|e| e.at_line(lineno + 1))?;
            words.push(word);
        }
        Self::new(words)
    }

    pub fn members(&self) -> impl Iterator<Item = &BitString> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, w: &BitString) -> bool {
        self.members.contains(w)
    }

    /// `μ(⟦v⟧) = Σ 2^-|τ|`.
    pub fn measure(&self) -> Rational {
        self.members
            .iter()
            .map(|t| Rational::dyadic(t.len() as u64))
            .sum()
    }

    /// `μ(⟦v⟧ ∩ ⟦σ⟧)`.
    pub fn intersect_measure(&self, sigma: &BitString) -> Rational {
        let mut total = Rational::zero();
        for t in &self.members {
            if t.is_prefix_of(sigma) {
                // no other member can meet ⟦σ⟧ once a member covers it
                return Rational::dyadic(sigma.len() as u64);
            }
            if sigma.is_prefix_of(t) {
                total += Rational::dyadic(t.len() as u64);
            }
        }
        total
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

/// Constraints `position ↦ bit` on a real.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PartialAssignment {
    constraints: BTreeMap<u64, bool>,
}

impl PartialAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (u64, bool)>>(pairs: I) -> Result<Self> {
        let mut a = Self::new();
        for (pos, bit) in pairs {
            a.insert(pos, bit)?;
        }
        Ok(a)
    }

    /// Fixes the bits of `word` at positions `0..|word|`.
    pub fn from_word(word: &BitString) -> Self {
        Self {
            constraints: word.iter().enumerate().map(|(i, b)| (i as u64, b)).collect(),
        }
    }

    pub fn insert(&mut self, pos: u64, bit: bool) -> Result<()> {
        if self.constraints.insert(pos, bit).is_some() {
            return Err(Error::DuplicatePosition(pos));
        }
        Ok(())
    }

    /// Copy with one more constraint. The position must be free.
    pub fn with(&self, pos: u64, bit: bool) -> Self {
        let mut a = self.clone();
        let fresh = a.constraints.insert(pos, bit).is_none();
        debug_assert!(fresh, "position {pos} already constrained");
        a
    }

    pub fn get(&self, pos: u64) -> Option<bool> {
        self.constraints.get(&pos).copied()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, bool)> + '_ {
        self.constraints.iter().map(|(&p, &b)| (p, b))
    }

    pub fn max_position(&self) -> Option<u64> {
        self.constraints.keys().next_back().copied()
    }

    /// Measure of the class of reals satisfying every constraint:
    /// exactly `2^-|domain|`.
    pub fn measure(&self) -> Rational {
        Rational::dyadic(self.constraints.len() as u64)
    }

    /// True when no position is constrained differently by the two.
    pub fn agrees_with(&self, other: &PartialAssignment) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .iter()
            .all(|(p, b)| large.get(p).is_none_or(|c| c == b))
    }
}

/// A set of words of one length described by the bits they fix: every word
/// of length `length` agreeing with `fixed`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderPattern {
    pub length: u64,
    pub fixed: PartialAssignment,
}

impl CylinderPattern {
    pub fn new(length: u64, fixed: PartialAssignment) -> Self {
        debug_assert!(fixed.max_position().is_none_or(|m| m < length));
        Self { length, fixed }
    }

    /// Number of concrete words this pattern stands for, as a power of two.
    pub fn free_bits(&self) -> u64 {
        self.length - self.fixed.len() as u64
    }

    /// Measure of the union of the cylinders of all instances.
    pub fn measure(&self) -> Rational {
        self.fixed.measure()
    }

    fn conflicts_below(&self, other: &CylinderPattern, bound: u64) -> bool {
        self.fixed
            .iter()
            .take_while(|&(p, _)| p < bound)
            .any(|(p, b)| other.fixed.get(p).is_some_and(|c| c != b))
    }

    fn intersect_measure(&self, sigma: &BitString) -> Rational {
        let n = sigma.len() as u64;
        let mut extra = 0u64;
        for (p, b) in self.fixed.iter() {
            if p < n {
                if sigma.get(p as usize) != Some(b) {
                    return Rational::zero();
                }
            } else {
                extra += 1;
            }
        }
        Rational::dyadic(n + extra)
    }

    /// All concrete words, if there are at most `limit` of them.
    pub fn instances(&self, limit: usize) -> Option<Vec<BitString>> {
        let free = self.free_bits();
        if free >= 63 || (1usize << free) > limit {
            return None;
        }
        let free_positions: Vec<u64> = (0..self.length)
            .filter(|p| self.fixed.get(*p).is_none())
            .collect();
        let mut out = Vec::with_capacity(1 << free);
        for v in 0u64..(1u64 << free) {
            let mut bits = vec![false; self.length as usize];
            for (p, b) in self.fixed.iter() {
                bits[p as usize] = b;
            }
            for (j, &p) in free_positions.iter().enumerate() {
                bits[p as usize] = (v >> (free - 1 - j as u64)) & 1 == 1;
            }
            out.push(BitString::from_bits(bits));
        }
        Some(out)
    }
}

/// A finite union of [`CylinderPattern`]s; the compact form of a set of
/// words that may be far too large to list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternSet {
    members: Vec<CylinderPattern>,
}

impl PatternSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, p: CylinderPattern) {
        self.members.push(p);
    }

    pub fn members(&self) -> &[CylinderPattern] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn max_length(&self) -> Option<u64> {
        self.members.iter().map(|p| p.length).max()
    }

    /// Whether the set of all instances is prefix-free.
    ///
    /// Two instances are comparable exactly when their patterns agree on all
    /// fixed positions below the shorter length, and a single pattern only
    /// produces distinct words of one length.
    pub fn is_prefix_free(&self) -> bool {
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                let bound = a.length.min(b.length);
                if !a.conflicts_below(b, bound) && !b.conflicts_below(a, bound) {
                    return false;
                }
            }
        }
        true
    }

    /// `μ(⟦W⟧)`. Only meaningful when [`Self::is_prefix_free`] holds.
    pub fn measure(&self) -> Rational {
        self.members.iter().map(CylinderPattern::measure).sum()
    }

    /// `μ(⟦W⟧ ∩ ⟦σ⟧)` for a prefix-free pattern set.
    pub fn intersect_measure(&self, sigma: &BitString) -> Rational {
        self.members
            .iter()
            .map(|p| p.intersect_measure(sigma))
            .sum()
    }

    /// The explicit word set, if it has at most `limit` members.
    pub fn expand(&self, limit: usize) -> Option<Result<PrefixFreeSet>> {
        let mut words = Vec::new();
        for p in &self.members {
            let inst = p.instances(limit.saturating_sub(words.len()))?;
            words.extend(inst);
        }
        Some(PrefixFreeSet::new(words))
    }
}
