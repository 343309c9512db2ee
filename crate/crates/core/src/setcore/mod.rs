//! Ground sets, subsets, integer sets and families.

mod dyadic;
mod family;
pub mod format;
mod intset;

pub use dyadic::DyadicRational;
pub use family::{
    density, is_intersecting_family, is_intersecting_pair, restrict0, restrict1, signature, Family,
    FamilyPair, GroundSet, SubsetMask, Violation, MAX_GROUND,
};
pub use intset::{is_syndetic, length_l, IntSet};

/// `S - r`, dropping results outside `{0..n}`.
pub fn shift(s: &IntSet, r: i64) -> IntSet {
    s.shift(r)
}
