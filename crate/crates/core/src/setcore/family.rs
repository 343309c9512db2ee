use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::dyadic::DyadicRational;
use super::intset::IntSet;
use crate::error::{Error, Result};

pub const MAX_GROUND: usize = 64;

/// The ground set `V = {0, ..., n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundSet(usize);

impl GroundSet {
    /// `n = 0` is allowed so that repeated vertex deletion can exhaust `V`.
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::GroundTooLarge(n));
        }
        Ok(GroundSet(n))
    }

    pub fn size(self) -> usize {
        self.0
    }

    /// Mask with every element of `V` set.
    pub fn full_mask(self) -> u64 {
        if self.0 == 64 {
            u64::MAX
        } else {
            (1u64 << self.0) - 1
        }
    }

    pub fn contains_mask(self, m: SubsetMask) -> bool {
        m.0 & !self.full_mask() == 0
    }
}

/// A subset of the ground set as a bit mask (bit `i` set iff `i` is a member).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubsetMask(pub u64);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn from_elements<I: IntoIterator<Item = usize>>(ground: GroundSet, elements: I) -> Result<Self> {
        let mut bits = 0u64;
        for x in elements {
            if x >= ground.size() {
                return Err(Error::ElementOutOfRange { element: x, n: ground.size() });
            }
            bits |= 1 << x;
        }
        Ok(SubsetMask(bits))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, x: usize) -> bool {
        x < 64 && self.0 >> x & 1 == 1
    }

    pub fn intersection_size(self, other: SubsetMask) -> usize {
        (self.0 & other.0).count_ones() as usize
    }

    pub fn elements(self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut m = self.0;
        while m != 0 {
            out.push(m.trailing_zeros() as usize);
            m &= m - 1;
        }
        out
    }

    /// Deletes coordinate `v`, shifting higher elements down by one.
    pub fn delete_coordinate(self, v: usize) -> SubsetMask {
        let low = self.0 & ((1u64 << v) - 1);
        let high = if v >= 63 { 0 } else { (self.0 >> (v + 1)) << v };
        SubsetMask(low | high)
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.elements().into_iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// A duplicate-free family of subsets, ordered by mask value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Family {
    ground: GroundSet,
    members: Vec<SubsetMask>,
}

#[derive(Serialize, Deserialize)]
struct FamilyWire {
    n: usize,
    members: Vec<Vec<usize>>,
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyWire { n: self.n(), members: self.members.iter().map(|m| m.elements()).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = FamilyWire::deserialize(d)?;
        let ground = GroundSet::new(w.n).map_err(serde::de::Error::custom)?;
        let members = w
            .members
            .into_iter()
            .map(|els| SubsetMask::from_elements(ground, els))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Family::new(ground, members).map_err(serde::de::Error::custom)
    }
}

impl Family {
    pub fn new<I: IntoIterator<Item = SubsetMask>>(ground: GroundSet, members: I) -> Result<Self> {
        let mut members: Vec<SubsetMask> = members.into_iter().collect();
        if let Some(bad) = members.iter().find(|m| !ground.contains_mask(**m)) {
            let element = 63 - bad.0.leading_zeros() as usize;
            return Err(Error::ElementOutOfRange { element, n: ground.size() });
        }
        members.sort_unstable();
        members.dedup();
        Ok(Family { ground, members })
    }

    pub fn from_masks(n: usize, masks: &[u64]) -> Result<Self> {
        Self::new(GroundSet::new(n)?, masks.iter().map(|&m| SubsetMask(m)))
    }

    pub fn from_sets(n: usize, sets: &[&[usize]]) -> Result<Self> {
        let ground = GroundSet::new(n)?;
        let members = sets
            .iter()
            .map(|s| SubsetMask::from_elements(ground, s.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ground, members)
    }

    pub fn empty(ground: GroundSet) -> Self {
        Family { ground, members: Vec::new() }
    }

    /// `2^V`.
    pub fn power_set(ground: GroundSet) -> Result<Self> {
        if ground.size() > 30 {
            return Err(Error::LimitExceeded { size: ground.size(), limit: 30 });
        }
        let members = (0..1u64 << ground.size()).map(SubsetMask).collect();
        Ok(Family { ground, members })
    }

    /// All subsets whose size satisfies `keep`.
    pub fn by_size(ground: GroundSet, keep: impl Fn(usize) -> bool) -> Result<Self> {
        let all = Self::power_set(ground)?;
        Ok(Family { ground, members: all.members.into_iter().filter(|m| keep(m.len())).collect() })
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn n(&self) -> usize {
        self.ground.size()
    }

    pub fn members(&self) -> &[SubsetMask] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, m: SubsetMask) -> bool {
        self.members.binary_search(&m).is_ok()
    }

    pub fn union(&self, other: &Family) -> Result<Family> {
        check_ground(self, other)?;
        Family::new(self.ground, self.members.iter().chain(&other.members).copied())
    }

    pub fn intersection(&self, other: &Family) -> Result<Family> {
        check_ground(self, other)?;
        let members = self.members.iter().copied().filter(|m| other.contains(*m)).collect();
        Ok(Family { ground: self.ground, members })
    }
}

fn check_ground(a: &Family, b: &Family) -> Result<()> {
    if a.ground != b.ground {
        return Err(Error::GroundMismatch(a.n(), b.n()));
    }
    Ok(())
}

/// Two families on a common ground set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyPair {
    a: Family,
    b: Family,
}

impl FamilyPair {
    pub fn new(a: Family, b: Family) -> Result<Self> {
        check_ground(&a, &b)?;
        Ok(FamilyPair { a, b })
    }

    pub fn a(&self) -> &Family {
        &self.a
    }

    pub fn b(&self) -> &Family {
        &self.b
    }

    pub fn ground(&self) -> GroundSet {
        self.a.ground
    }

    pub fn into_parts(self) -> (Family, Family) {
        (self.a, self.b)
    }
}

/// A pair of sets whose intersection size is not allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation {
    pub a: SubsetMask,
    pub b: SubsetMask,
    pub size: usize,
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Self {
        Error::NotIntersecting { a: v.a.elements(), b: v.b.elements(), size: v.size }
    }
}

/// Checks `|A ∩ B| ∈ M` over unordered pairs of members, including `A = B`
/// when `include_diagonal` is set. Reports the first failing pair in member order.
pub fn is_intersecting_family(
    family: &Family,
    m: &IntSet,
    include_diagonal: bool,
) -> std::result::Result<(), Violation> {
    let members = family.members();
    for (i, &a) in members.iter().enumerate() {
        let start = if include_diagonal { i } else { i + 1 };
        for &b in &members[start..] {
            let size = a.intersection_size(b);
            if !m.contains(size) {
                return Err(Violation { a, b, size });
            }
        }
    }
    Ok(())
}

/// Checks `|A ∩ B| ∈ M` for every `A` in the first family and `B` in the second.
pub fn is_intersecting_pair(pair: &FamilyPair, m: &IntSet) -> std::result::Result<(), Violation> {
    for &a in pair.a().members() {
        for &b in pair.b().members() {
            let size = a.intersection_size(b);
            if !m.contains(size) {
                return Err(Violation { a, b, size });
            }
        }
    }
    Ok(())
}

/// `{ |A ∩ B| : A ∈ family }` as a subset of `{0..n}`.
pub fn signature(family: &Family, b: SubsetMask) -> Result<IntSet> {
    if !family.ground().contains_mask(b) {
        let element = 63 - b.0.leading_zeros() as usize;
        return Err(Error::ElementOutOfRange { element, n: family.n() });
    }
    let mut out = IntSet::empty(family.n());
    for &a in family.members() {
        out.insert(a.intersection_size(b))?;
    }
    Ok(out)
}

/// `|F| / 2^n`, exactly.
pub fn density(family: &Family) -> DyadicRational {
    DyadicRational::new(BigUint::from(family.len()), family.n() as u64)
}

fn check_vertex(family: &Family, v: usize) -> Result<GroundSet> {
    if v >= family.n() {
        return Err(Error::ElementOutOfRange { element: v, n: family.n() });
    }
    GroundSet::new(family.n() - 1)
}

/// `{ F \ {v} : v ∈ F ∈ family }`, re-indexed onto `V \ {v}`.
pub fn restrict1(family: &Family, v: usize) -> Result<Family> {
    let ground = check_vertex(family, v)?;
    // deleting a coordinate from masks that all contain it preserves order
    let members = family
        .members()
        .iter()
        .filter(|m| m.contains(v))
        .map(|m| m.delete_coordinate(v))
        .collect();
    Ok(Family { ground, members })
}

/// `{ F ∈ family : v ∉ F }`, re-indexed onto `V \ {v}`.
pub fn restrict0(family: &Family, v: usize) -> Result<Family> {
    let ground = check_vertex(family, v)?;
    let members = family
        .members()
        .iter()
        .filter(|m| !m.contains(v))
        .map(|m| m.delete_coordinate(v))
        .collect();
    Ok(Family { ground, members })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize) -> GroundSet {
        GroundSet::new(n).unwrap()
    }

    #[test]
    fn families_are_canonical() {
        let f = Family::from_masks(3, &[5, 1, 5, 0]).unwrap();
        assert_eq!(f.members(), &[SubsetMask(0), SubsetMask(1), SubsetMask(5)]);
        assert!(Family::from_masks(3, &[8]).is_err());
        assert!(GroundSet::new(65).is_err());
    }

    #[test]
    fn intersecting_family_checks() {
        let f = Family::from_sets(3, &[&[0], &[0, 1]]).unwrap();
        let m = IntSet::from_elements(3, [0]).unwrap();
        let v = is_intersecting_family(&f, &m, false).unwrap_err();
        assert_eq!((v.a, v.b, v.size), (SubsetMask(1), SubsetMask(3), 1));
        let all = Family::power_set(g(3)).unwrap();
        assert!(is_intersecting_family(&all, &IntSet::full(3), true).is_ok());
        assert!(is_intersecting_family(&all, &IntSet::full(3), false).is_ok());
    }

    #[test]
    fn diagonal_requires_member_sizes() {
        let f = Family::from_sets(4, &[&[0, 1, 2]]).unwrap();
        let evens = IntSet::from_elements(4, [0, 2, 4]).unwrap();
        assert!(is_intersecting_family(&f, &evens, false).is_ok());
        assert!(is_intersecting_family(&f, &evens, true).is_err());
    }

    #[test]
    fn pair_checks() {
        let a = Family::from_sets(3, &[&[0, 1]]).unwrap();
        let b = Family::from_sets(3, &[&[1, 2]]).unwrap();
        let pair = FamilyPair::new(a, b).unwrap();
        assert!(is_intersecting_pair(&pair, &IntSet::from_elements(3, [0]).unwrap()).is_err());
        assert!(is_intersecting_pair(&pair, &IntSet::full(3)).is_ok());
    }

    #[test]
    fn signatures() {
        let only_empty = Family::from_masks(3, &[0]).unwrap();
        assert_eq!(signature(&only_empty, SubsetMask(0b101)).unwrap().to_vec(), vec![0]);
        let all = Family::power_set(g(3)).unwrap();
        assert_eq!(signature(&all, SubsetMask(0b011)).unwrap().to_vec(), vec![0, 1, 2]);
        assert!(signature(&all, SubsetMask(0b1000)).is_err());
    }

    #[test]
    fn densities() {
        let all = Family::power_set(g(3)).unwrap();
        assert_eq!(density(&all), DyadicRational::new(1u32.into(), 0));
        assert!(density(&Family::empty(g(3))).is_zero());
        let three = Family::from_masks(3, &[0, 1, 2]).unwrap();
        assert_eq!(density(&three), DyadicRational::new(3u32.into(), 3));
    }

    #[test]
    fn restrictions() {
        let all = Family::power_set(g(4)).unwrap();
        let sub = Family::power_set(g(3)).unwrap();
        for v in 0..4 {
            assert_eq!(restrict1(&all, v).unwrap(), sub);
            assert_eq!(restrict0(&all, v).unwrap(), sub);
        }
        let f = Family::from_sets(2, &[&[0], &[1]]).unwrap();
        assert_eq!(restrict1(&f, 0).unwrap(), Family::from_masks(1, &[0]).unwrap());
        assert_eq!(restrict0(&f, 0).unwrap(), Family::from_masks(1, &[1]).unwrap());
        assert!(restrict0(&f, 2).is_err());
    }

    #[test]
    fn coordinate_deletion_at_top_bit() {
        assert_eq!(SubsetMask(u64::MAX).delete_coordinate(63), SubsetMask(u64::MAX >> 1));
        assert_eq!(SubsetMask(0b1011).delete_coordinate(1), SubsetMask(0b101));
    }
}
