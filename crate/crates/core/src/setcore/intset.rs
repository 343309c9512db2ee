use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set of integers drawn from `{0, 1, ..., n}`.
///
/// Used for allowed intersection sizes `M`, forbidden sizes `P`, signatures
/// and height-function arguments. Note the range has `n + 1` positions while
/// the ground set `V` has `n` elements.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntSet {
    n: usize,
    words: Vec<u64>,
}

fn word_count(n: usize) -> usize {
    (n + 1).div_ceil(64)
}

impl IntSet {
    pub fn empty(n: usize) -> Self {
        IntSet { n, words: vec![0; word_count(n)] }
    }

    /// `{0, ..., n}`.
    pub fn full(n: usize) -> Self {
        Self::interval(n, 0, n)
    }

    /// `{lo, ..., hi}` clipped to `{0..n}`; empty when `lo > hi`.
    pub fn interval(n: usize, lo: usize, hi: usize) -> Self {
        let mut s = Self::empty(n);
        if lo <= hi {
            for x in lo..=hi.min(n) {
                s.insert_unchecked(x);
            }
        }
        s
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(n: usize, elements: I) -> Result<Self> {
        let mut s = Self::empty(n);
        for x in elements {
            s.insert(x)?;
        }
        Ok(s)
    }

    /// Builds a set from the low bits of `mask`; bits above `n` are an error.
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        let mut s = Self::empty(n);
        let mut m = mask;
        while m != 0 {
            let x = m.trailing_zeros() as usize;
            s.insert(x)?;
            m &= m - 1;
        }
        Ok(s)
    }

    /// Low 64 positions as a bit mask, or `None` if any element is >= 64.
    pub fn to_mask(&self) -> Option<u64> {
        if self.words[1..].iter().any(|&w| w != 0) {
            return None;
        }
        Some(self.words[0])
    }

    pub fn bound(&self) -> usize {
        self.n
    }

    /// Same elements, new range bound. Fails if an element would fall outside.
    pub fn with_bound(&self, n: usize) -> Result<Self> {
        Self::from_elements(n, self.iter())
    }

    pub fn insert(&mut self, x: usize) -> Result<()> {
        if x > self.n {
            return Err(Error::ElementOutOfRange { element: x, n: self.n });
        }
        self.insert_unchecked(x);
        Ok(())
    }

    fn insert_unchecked(&mut self, x: usize) {
        self.words[x / 64] |= 1u64 << (x % 64);
    }

    pub fn remove(&mut self, x: usize) {
        if x <= self.n {
            self.words[x / 64] &= !(1u64 << (x % 64));
        }
    }

    pub fn contains(&self, x: usize) -> bool {
        x <= self.n && self.words[x / 64] >> (x % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn min(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn max(&self) -> Option<usize> {
        self.iter().last()
    }

    fn check_same(&self, other: &IntSet) -> Result<()> {
        if self.n != other.n {
            return Err(Error::IntSetBoundMismatch { expected: self.n, got: other.n });
        }
        Ok(())
    }

    fn zip_with(&self, other: &IntSet, f: impl Fn(u64, u64) -> u64) -> Result<IntSet> {
        self.check_same(other)?;
        let words = self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect();
        Ok(IntSet { n: self.n, words })
    }

    pub fn union(&self, other: &IntSet) -> Result<IntSet> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &IntSet) -> Result<IntSet> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &IntSet) -> Result<IntSet> {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn is_subset(&self, other: &IntSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    /// `{0..n} \ self`.
    pub fn complement(&self) -> IntSet {
        let mut out = IntSet::empty(self.n);
        for x in 0..=self.n {
            if !self.contains(x) {
                out.insert_unchecked(x);
            }
        }
        out
    }

    /// `self - r = { s - r : s in self }`, keeping only results inside `{0..n}`.
    /// A negative `r` shifts upward.
    pub fn shift(&self, r: i64) -> IntSet {
        let mut out = IntSet::empty(self.n);
        for s in self.iter() {
            let v = s as i64 - r;
            if v >= 0 && (v as usize) <= self.n {
                out.insert_unchecked(v as usize);
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct IntSetWire {
    n: usize,
    elements: Vec<usize>,
}

impl Serialize for IntSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntSetWire { n: self.n, elements: self.to_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = IntSetWire::deserialize(d)?;
        IntSet::from_elements(w.n, w.elements).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// Length of the longest run of consecutive integers in `m`; 0 for the empty set.
pub fn length_l(m: &IntSet) -> usize {
    let mut best = 0;
    let mut run = 0;
    let mut prev: Option<usize> = None;
    for x in m.iter() {
        run = match prev {
            Some(p) if p + 1 == x => run + 1,
            _ => 1,
        };
        best = best.max(run);
        prev = Some(x);
    }
    best
}

/// Whether every window of `l` consecutive integers inside `{0..range_end}`
/// meets `s`. Vacuously true when the range is shorter than `l`.
pub fn is_syndetic(s: &IntSet, l: usize, range_end: usize) -> bool {
    assert!(l >= 1, "window length must be positive");
    // A window is missed exactly when a gap of length >= l exists.
    let mut gap = 0;
    for x in 0..=range_end {
        if s.contains(x) {
            gap = 0;
        } else {
            gap += 1;
            if gap >= l {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, xs: &[usize]) -> IntSet {
        IntSet::from_elements(n, xs.iter().copied()).unwrap()
    }

    #[test]
    fn longest_run() {
        assert_eq!(length_l(&set(8, &[0, 2, 4])), 1);
        assert_eq!(length_l(&set(8, &[1, 2, 3, 7, 8])), 3);
        assert_eq!(length_l(&IntSet::empty(8)), 0);
    }

    #[test]
    fn syndetic_windows() {
        assert!(is_syndetic(&set(4, &[0, 2, 4]), 2, 4));
        assert!(!is_syndetic(&set(4, &[0, 4]), 2, 4));
    }

    #[test]
    fn run_length_is_dual_to_syndetic_complement() {
        for n in 0..=12usize {
            for mask in 0u64..(1 << (n + 1)) {
                let m = IntSet::from_mask(n, mask).unwrap();
                let comp = m.complement();
                for l in 0..=n + 1 {
                    assert_eq!(length_l(&m) <= l, is_syndetic(&comp, l + 1, n), "n={n} M={m} l={l}");
                }
            }
        }
    }

    #[test]
    fn shift_drops_out_of_range() {
        assert_eq!(set(6, &[3, 5]).shift(1), set(6, &[2, 4]));
        assert!(set(6, &[0]).shift(1).is_empty());
        assert_eq!(set(6, &[1, 4]).shift(0), set(6, &[1, 4]));
        assert_eq!(set(6, &[1, 6]).shift(-1), set(6, &[2]));
    }

    #[test]
    fn multiword_sets() {
        let s = set(130, &[0, 63, 64, 127, 130]);
        assert_eq!(s.len(), 5);
        assert_eq!(s.to_vec(), vec![0, 63, 64, 127, 130]);
        assert_eq!(s.to_mask(), None);
        assert_eq!(s.complement().len(), 131 - 5);
        assert_eq!(s.shift(1).to_vec(), vec![62, 63, 126, 129]);
        assert!(s.clone().insert(131).is_err());
    }
}
