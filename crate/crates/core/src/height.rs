//! The recursive height function on finite sets of integers.
//!
//! `h(∅) = 0` and for nonempty `L`
//!
//! ```text
//! h(L) = 1 + max over M ≠ L, 0 < |M| <= |L| of min{ h(L ∩ M), h(L ∩ (M - 1)) }
//! ```
//!
//! Only the trace of `M` on `L ∪ (L + 1)` matters, so the candidates are
//! enumerated as pairs `X = L ∩ M`, `Y = L ∩ (M - 1)` with `M = X ∪ (Y + 1)`.
//! For `M = L + 1` the inner minimum is `h(L ∩ (L + 1))` by monotonicity,
//! which removes the self-reference. Every recursive argument is a proper
//! subset of `L`.
//!
//! Sets are handled internally as `u64` masks; the largest admissible element
//! is 62 so that `L + 1` still fits.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::bounds::{binomial, log2_big, BoundReport};
use crate::error::{Error, Result};
use crate::setcore::{length_l, signature, FamilyPair, IntSet};

pub const MAX_ELEMENT: usize = 62;
/// Largest `|L|` accepted by [`height`] unless a caller raises it.
pub const DEFAULT_SIZE_LIMIT: usize = 14;
/// Largest `|L|` accepted by [`height_original`].
pub const DEFAULT_ORIGINAL_LIMIT: usize = 10;
pub const DEFAULT_AXIOM_LIMIT: usize = 6;

/// Memoised heights keyed by absolute positions (`h` is not shift-invariant).
#[derive(Clone, Debug)]
pub struct HeightMemo {
    table: HashMap<u64, u32>,
    limit: usize,
}

impl Default for HeightMemo {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MemoEntry {
    pub set: Vec<usize>,
    pub h: u32,
}

impl HeightMemo {
    pub fn new() -> Self {
        Self::with_limit(DEFAULT_SIZE_LIMIT)
    }

    pub fn with_limit(limit: usize) -> Self {
        let mut table = HashMap::new();
        table.insert(0, 0);
        HeightMemo { table, limit }
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn get(&self, set: &IntSet) -> Option<u32> {
        set.to_mask().and_then(|m| self.table.get(&m).copied())
    }

    /// Entries sorted by (size, mask), ready for a JSON dump.
    pub fn entries(&self) -> Vec<MemoEntry> {
        let mut keys: Vec<u64> = self.table.keys().copied().collect();
        keys.sort_by_key(|&m| (m.count_ones(), m));
        keys.into_iter().map(|m| MemoEntry { set: mask_elements(m), h: self.table[&m] }).collect()
    }

    fn key(&self, set: &IntSet) -> Result<u64> {
        set_to_key(set, self.limit)
    }
}

fn mask_elements(mut m: u64) -> Vec<usize> {
    let mut out = Vec::new();
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

fn set_to_key(set: &IntSet, limit: usize) -> Result<u64> {
    if set.len() > limit {
        return Err(Error::LimitExceeded { size: set.len(), limit });
    }
    match set.max() {
        Some(x) if x > MAX_ELEMENT => Err(Error::ElementOutOfRange { element: x, n: MAX_ELEMENT }),
        _ => Ok(set.to_mask().unwrap_or(0)),
    }
}

/// Iterates over all submasks of `mask`, from `mask` down to 0.
fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

pub fn height(set: &IntSet, memo: &mut HeightMemo) -> Result<u32> {
    let key = memo.key(set)?;
    Ok(height_mask(key, &mut memo.table))
}

/// Height of a mask; callers guarantee the element bound.
pub fn height_mask(l: u64, table: &mut HashMap<u64, u32>) -> u32 {
    if l == 0 {
        return 0;
    }
    if let Some(&h) = table.get(&l) {
        return h;
    }
    let size = l.count_ones();
    let h = if size == 1 {
        1
    } else {
        let mut best = 0;
        for x in submasks(l) {
            if x == l {
                continue; // forces M = L
            }
            let hx = height_mask(x, table);
            if hx <= best {
                continue;
            }
            for y in submasks(l) {
                let m = x | (y << 1);
                if m == 0 || m == l || m.count_ones() > size {
                    continue;
                }
                let value = if y == l { hx } else { hx.min(height_mask(y, table)) };
                if value > best {
                    best = value;
                    if best == hx {
                        break;
                    }
                }
            }
        }
        1 + best
    };
    table.insert(l, h);
    h
}

/// Height with a replayable witness: the chain of maximising candidates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightReport {
    pub set: Vec<usize>,
    pub h: u32,
    pub witness_chain: Vec<WitnessStep>,
    /// `(2l / (2l - 1))^(h - 1)` as a float; compare with `|L|`.
    pub bound_sharp: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessStep {
    /// The set whose height is being realised.
    pub set: Vec<usize>,
    /// The maximising candidate `M` (restricted to `L ∪ (L + 1)`).
    pub candidate: Vec<usize>,
    /// The branch with the smaller height, followed next in the chain.
    pub branch: Vec<usize>,
    pub branch_height: u32,
}

pub fn height_report(set: &IntSet, memo: &mut HeightMemo) -> Result<HeightReport> {
    let key = memo.key(set)?;
    let h = height_mask(key, &mut memo.table);
    let mut chain = Vec::new();
    let mut cur = key;
    while cur.count_ones() > 1 {
        let hc = memo.table[&cur];
        let size = cur.count_ones();
        let mut found = None;
        'search: for x in submasks(cur) {
            if x == cur {
                continue;
            }
            for y in submasks(cur) {
                let m = x | (y << 1);
                if m == 0 || m == cur || m.count_ones() > size {
                    continue;
                }
                let hx = height_mask(x, &mut memo.table);
                let (branch, value) = if y == cur {
                    (x, hx)
                } else {
                    let hy = height_mask(y, &mut memo.table);
                    if hx <= hy {
                        (x, hx)
                    } else {
                        (y, hy)
                    }
                };
                if value + 1 == hc {
                    found = Some((m, branch, value));
                    break 'search;
                }
            }
        }
        let (m, branch, value) = found.expect("memoised height has a realising candidate");
        chain.push(WitnessStep {
            set: mask_elements(cur),
            candidate: mask_elements(m),
            branch: mask_elements(branch),
            branch_height: value,
        });
        if branch == 0 {
            break;
        }
        cur = branch;
    }
    let l = length_l(set).max(1) as f64;
    let bound_sharp = if h == 0 { 1.0 } else { (2.0 * l / (2.0 * l - 1.0)).powi(h as i32 - 1) };
    Ok(HeightReport { set: set.to_vec(), h, witness_chain: chain, bound_sharp })
}

/// The defining recursion taken literally: an explicit `h(L ∩ (L + 1))` term,
/// and candidates `M ⊆ L ∪ (L + 1)` excluding both `L` and `L + 1`.
pub fn height_original(set: &IntSet) -> Result<u32> {
    let key = set_to_key(set, DEFAULT_ORIGINAL_LIMIT)?;
    let mut table = HashMap::new();
    Ok(original_mask(key, &mut table))
}

fn original_mask(l: u64, table: &mut HashMap<u64, u32>) -> u32 {
    if l == 0 {
        return 0;
    }
    if let Some(&h) = table.get(&l) {
        return h;
    }
    let size = l.count_ones();
    let up = l << 1;
    let mut best = original_mask(l & up, table);
    for m in submasks(l | up) {
        if m == 0 || m == l || m == up || m.count_ones() > size {
            continue;
        }
        let a = original_mask(l & m, table);
        let b = original_mask(l & (m >> 1), table);
        best = best.max(a.min(b));
    }
    table.insert(l, 1 + best);
    1 + best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axiom {
    A1,
    A2,
    A3,
    A4,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub l: Vec<usize>,
    pub l_prime: Vec<usize>,
}

/// Exhaustively checks A1–A4 for all `L, L' ⊆ {0..max}`.
pub fn check_axioms(max: usize) -> Result<Vec<AxiomViolation>> {
    check_axioms_with_limit(max, DEFAULT_AXIOM_LIMIT)
}

pub fn check_axioms_with_limit(max: usize, limit: usize) -> Result<Vec<AxiomViolation>> {
    if max > limit {
        return Err(Error::LimitExceeded { size: max, limit });
    }
    let mut table = HashMap::new();
    let universe = (1u64 << (max + 1)) - 1;
    let h: Vec<u32> = (0..=universe).map(|m| height_mask(m, &mut table)).collect();
    let mut out = Vec::new();
    let mut flag = |axiom, l: u64, lp: u64| {
        out.push(AxiomViolation { axiom, l: mask_elements(l), l_prime: mask_elements(lp) })
    };
    for l in 0..=universe {
        if (h[l as usize] == 0) != (l == 0) {
            flag(Axiom::A1, l, l);
        }
    }
    for l in 0..=universe {
        let hl = h[l as usize];
        let down = l >> 1; // L - 1
        for lp in 0..=universe {
            let hlp = h[lp as usize];
            if lp & !l == 0 && hlp > hl {
                flag(Axiom::A2, l, lp);
            }
            if lp & !down == 0 && hlp > hl {
                flag(Axiom::A3, l, lp);
            }
            let s = hl.max(hlp);
            if s >= 1 {
                let a = h[(lp & l) as usize];
                let b = h[(lp & down) as usize];
                if a.min(b) > s - 1 {
                    flag(Axiom::A4, l, lp);
                }
            }
        }
    }
    Ok(out)
}

/// A set violating the growth inequality `(2l/(2l-1))^(h-1) <= |W|`,
/// `h <= |W|`, or `h <= 1 + 2l·log2(max(n, 2))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthViolation {
    pub set: Vec<usize>,
    pub h: u32,
    pub run_length: usize,
    pub reason: String,
}

/// Checks the growth inequalities for every nonempty `W ⊆ {0..max}`.
pub fn check_growth(max: usize) -> Result<Vec<GrowthViolation>> {
    if max > 12 {
        return Err(Error::LimitExceeded { size: max, limit: 12 });
    }
    let n = max.max(2) as f64;
    let mut table = HashMap::new();
    let mut out = Vec::new();
    for w in 1..(1u64 << (max + 1)) {
        let h = height_mask(w, &mut table);
        let size = w.count_ones() as usize;
        let set = IntSet::from_mask(max, w)?;
        let l = length_l(&set);
        let mut fail = |reason: &str| {
            out.push(GrowthViolation { set: set.to_vec(), h, run_length: l, reason: reason.into() })
        };
        // (2l)^(h-1) <= |W| (2l-1)^(h-1), exactly
        let lhs = BigUint::from(2 * l).pow(h - 1);
        let rhs = BigUint::from(size) * BigUint::from(2 * l - 1).pow(h - 1);
        if lhs > rhs {
            fail("(2l/(2l-1))^(h-1) > |W|");
        }
        if h as usize > size {
            fail("h > |W|");
        }
        if h as f64 > 1.0 + 2.0 * l as f64 * n.log2() {
            fail("h > 1 + 2l log2 n");
        }
    }
    Ok(out)
}

/// `max_{B ∈ B} h(signature(A, B))`; 0 when either family is empty.
pub fn pair_height(pair: &FamilyPair, memo: &mut HeightMemo) -> Result<u32> {
    let mut s = 0;
    if pair.a().is_empty() {
        return Ok(0);
    }
    for &b in pair.b().members() {
        let sig = signature(pair.a(), b)?;
        s = s.max(height(&sig, memo)?);
    }
    Ok(s)
}

/// `2^(n+s-1) · C(n, s-1)` for a pair of height `s`.
pub fn sgall_bound(n: usize, s: usize) -> Result<BoundReport> {
    if s < 1 || s > n + 1 {
        return Err(Error::InvalidParameter(format!("height s={s} must satisfy 1 <= s <= n+1 = {}", n + 1)));
    }
    let value = (BigUint::from(1u8) << (n + s - 1)) * binomial(n as u64, (s - 1) as u64);
    Ok(BoundReport::exact("pair product bound from height", "Sgall height bound", value))
}

/// `⌈2l·log2 n⌉`, exactly: the least `c` with `2^c >= n^(2l)`.
pub fn ceil_two_l_log2(n: u64, l: u32) -> u64 {
    let p = BigUint::from(n).pow(2 * l);
    if p <= BigUint::from(1u8) {
        0
    } else {
        (p - 1u8).bits()
    }
}

/// Whether `2^(n+s-1) C(n, s-1) < 2^(n + 2l log2² n)` with `s = 1 + ⌈2l log2 n⌉`.
/// `None` when `s > n + 1`, where the height bound does not apply.
pub fn second_bound_holds(n: u64, l: u32) -> Option<bool> {
    let c = ceil_two_l_log2(n, l);
    if c > n {
        return None;
    }
    let lhs = c as f64 + log2_big(&binomial(n, c));
    let ln = (n as f64).log2();
    Some(lhs < 2.0 * l as f64 * ln * ln)
}

/// Smallest `n1 >= 2` such that [`second_bound_holds`] is true for every
/// `n in n1..=max_n`.
pub fn second_bound_threshold(l: u32, max_n: u64) -> Option<u64> {
    let mut threshold = None;
    for n in (2..=max_n).rev() {
        if second_bound_holds(n, l) == Some(true) {
            threshold = Some(n);
        } else {
            break;
        }
    }
    threshold
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub enum LogBase {
    #[default]
    Two,
    Natural,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeightBound {
    /// `1 + log(size) / log(2l/(2l-1))`; independent of the log base.
    pub sharp: f64,
    /// `1 + 2l·log(size)`.
    pub relaxed: f64,
}

pub fn height_upper_bound(l: usize, size: usize, base: LogBase) -> Result<HeightBound> {
    if l == 0 || size == 0 {
        return Err(Error::InvalidParameter("run length and size must be positive".into()));
    }
    let lf = l as f64;
    let sf = size as f64;
    let sharp = 1.0 + sf.ln() / (2.0 * lf / (2.0 * lf - 1.0)).ln();
    let log = match base {
        LogBase::Two => sf.log2(),
        LogBase::Natural => sf.ln(),
    };
    Ok(HeightBound { sharp, relaxed: 1.0 + 2.0 * lf * log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setcore::{Family, GroundSet};

    fn set(xs: &[usize]) -> IntSet {
        IntSet::from_elements(64, xs.iter().copied()).unwrap()
    }

    /// Unrestricted oracle: the defining recursion with every
    /// `M ⊆ {0..universe_top}` considered.
    fn oracle(l: u64, universe_top: u32, table: &mut HashMap<u64, u32>) -> u32 {
        if l == 0 {
            return 0;
        }
        if let Some(&h) = table.get(&l) {
            return h;
        }
        let size = l.count_ones();
        let mut best = oracle(l & (l << 1), universe_top, table);
        for m in 1..(1u64 << (universe_top + 1)) {
            if m == l || m == l << 1 || m.count_ones() > size {
                continue;
            }
            let a = oracle(l & m, universe_top, table);
            let b = oracle(l & (m >> 1), universe_top, table);
            best = best.max(a.min(b));
        }
        table.insert(l, best + 1);
        best + 1
    }

    #[test]
    fn small_heights() {
        let mut memo = HeightMemo::new();
        assert_eq!(height(&set(&[]), &mut memo).unwrap(), 0);
        assert_eq!(height(&set(&[7]), &mut memo).unwrap(), 1);
        assert_eq!(height(&set(&[0, 1]), &mut memo).unwrap(), 2);
        assert_eq!(height_original(&set(&[])).unwrap(), 0);
        assert_eq!(height_original(&set(&[7])).unwrap(), 1);
        let mut t = HashMap::new();
        assert_eq!(oracle(0b11, 4, &mut t), 2);
    }

    #[test]
    fn restricted_candidates_match_unrestricted_oracle() {
        let mut memo = HeightMemo::new();
        let mut t = HashMap::new();
        for l in 0u64..64 {
            let expected = oracle(l, 7, &mut t);
            let s = IntSet::from_mask(64, l).unwrap();
            assert_eq!(height(&s, &mut memo).unwrap(), expected, "L={s}");
        }
    }

    #[test]
    fn both_recursions_agree() {
        let mut memo = HeightMemo::new();
        for l in 0u64..128 {
            let s = IntSet::from_mask(64, l).unwrap();
            assert_eq!(height(&s, &mut memo).unwrap(), height_original(&s).unwrap(), "L={s}");
        }
    }

    #[test]
    fn height_at_most_size() {
        let mut table = HashMap::new();
        for l in 0u64..512 {
            assert!(height_mask(l, &mut table) <= l.count_ones());
        }
    }

    #[test]
    fn axioms_hold_on_small_universe() {
        assert!(check_axioms(3).unwrap().is_empty());
        assert!(check_axioms(7).is_err());
        let mut memo = HeightMemo::new();
        assert!(height(&set(&[1]), &mut memo).unwrap() <= height(&set(&[1, 2]), &mut memo).unwrap());
    }

    #[test]
    fn limits_are_enforced() {
        let mut memo = HeightMemo::new();
        assert!(height(&set(&[63]), &mut memo).is_err());
        let big = IntSet::interval(64, 0, 14);
        assert!(height(&big, &mut memo).is_err());
        assert!(height_original(&IntSet::interval(64, 0, 10)).is_err());
    }

    #[test]
    fn witness_chain_replays() {
        let mut memo = HeightMemo::new();
        for xs in [&[0usize, 1][..], &[0, 1, 5], &[0, 2, 3, 4, 7], &[1, 2, 3, 4]] {
            let r = height_report(&set(xs), &mut memo).unwrap();
            assert_eq!(r.witness_chain.first().map(|w| w.branch_height + 1).unwrap_or(1), r.h);
            for pair in r.witness_chain.windows(2) {
                assert_eq!(pair[0].branch, pair[1].set);
                assert_eq!(pair[0].branch_height, pair[1].branch_height + 1);
            }
            let last = r.witness_chain.last().unwrap();
            assert!(last.branch_height <= 1);
        }
    }

    #[test]
    fn interval_heights_equal_length() {
        let mut memo = HeightMemo::new();
        for k in 1..=8 {
            assert_eq!(height(&IntSet::interval(64, 3, 3 + k - 1), &mut memo).unwrap(), k as u32);
        }
    }

    #[test]
    fn pair_height_cases() {
        let g = GroundSet::new(3).unwrap();
        let mut memo = HeightMemo::new();
        let empty = Family::empty(g);
        let all = Family::power_set(g).unwrap();
        let pair = FamilyPair::new(empty, all.clone()).unwrap();
        assert_eq!(pair_height(&pair, &mut memo).unwrap(), 0);
        let top = Family::from_masks(3, &[0b111]).unwrap();
        let pair = FamilyPair::new(all, top).unwrap();
        let expected = oracle(0b1111, 6, &mut HashMap::new());
        assert_eq!(pair_height(&pair, &mut memo).unwrap(), expected);
        assert_eq!(expected, 4);
    }

    #[test]
    fn sgall_values() {
        assert_eq!(sgall_bound(4, 1).unwrap().exact, Some(BigUint::from(16u32)));
        assert_eq!(sgall_bound(5, 3).unwrap().exact, Some(BigUint::from(1280u32)));
        assert!(sgall_bound(4, 0).is_err());
        assert!(sgall_bound(4, 6).is_err());
    }

    #[test]
    fn exact_ceiling_of_log() {
        assert_eq!(ceil_two_l_log2(16, 1), 8);
        assert_eq!(ceil_two_l_log2(17, 1), 9);
        assert_eq!(ceil_two_l_log2(3, 1), 4);
        assert_eq!(ceil_two_l_log2(1, 3), 0);
    }

    #[test]
    fn height_bounds() {
        let b = height_upper_bound(1, 2, LogBase::Two).unwrap();
        assert!((b.sharp - 2.0).abs() < 1e-12);
        assert_eq!(height_upper_bound(2, 8, LogBase::Two).unwrap().relaxed, 13.0);
        assert!(height_upper_bound(0, 8, LogBase::Two).is_err());
        for l in 1..=20 {
            for size in (2..=1_000_000).step_by(997) {
                let b = height_upper_bound(l, size, LogBase::Two).unwrap();
                assert!(b.sharp <= b.relaxed, "l={l} size={size}");
            }
        }
    }
}
