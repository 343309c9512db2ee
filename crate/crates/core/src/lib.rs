//! Set families with specified intersection sizes.
//!
//! The crate is organised around a few layers:
//!
//! * [`setcore`]: subsets of a ground set `V = {0..n-1}`, integer sets over
//!   `{0..n}`, families, exact dyadic densities, and the text formats.
//! * [`exact`]: exact arithmetic in `Q(√5)` used to decide the decomposition
//!   inequalities without floating point.
//! * [`height`]: the recursive height function, its axiom checks and the
//!   pair-height bound.
//! * [`procedure`]: the density-driven vertex deletion procedure on
//!   M-intersecting pairs, with a replaying auditor.
//! * [`search`]: exact maximum-clique and pair-product oracles.
//! * [`constructions`]: named extremal families.
//! * [`numbertheory`]: primality, primes in short intervals, the binomial gcd
//!   condition and the small-interval bound pipeline.

pub mod bounds;
pub mod constructions;
pub mod error;
pub mod exact;
pub mod height;
pub mod numbertheory;
pub mod procedure;
pub mod search;
pub mod setcore;

pub use error::{Error, Result};
pub use setcore::{
    density, is_intersecting_family, is_intersecting_pair, is_syndetic, length_l, restrict0,
    restrict1, signature, DyadicRational, Family, FamilyPair, GroundSet, IntSet, SubsetMask,
};
