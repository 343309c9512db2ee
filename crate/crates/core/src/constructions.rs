//! Named families and pairs: Eventown, the Katona and Frankl families, the
//! large pair with a sparse forbidden set, and interval-omitting specifications.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bounds::{binomial, binomial_le, log2_big};
use crate::error::{Error, Result};
use crate::setcore::{Family, FamilyPair, GroundSet, IntSet, SubsetMask};

/// Largest ground set on which families are materialised.
pub const MAX_MATERIALIZE: usize = 24;

fn check_size(n: usize, limit: usize) -> Result<GroundSet> {
    if n > limit {
        return Err(Error::LimitExceeded { size: n, limit });
    }
    GroundSet::new(n)
}

/// Spreads bit `i` of `x` to bits `2i` and `2i+1`.
fn double_bits(x: u64) -> u64 {
    let mut out = 0;
    for i in 0..32 {
        if x >> i & 1 == 1 {
            out |= 0b11 << (2 * i);
        }
    }
    out
}

/// All unions of the pairs `{2i, 2i+1}`.
pub fn eventown(n: usize) -> Result<Family> {
    if n % 2 == 1 {
        return Err(Error::InvalidParameter(format!("eventown needs even n, got {n}")));
    }
    let ground = check_size(n, MAX_MATERIALIZE)?;
    Family::new(ground, (0..1u64 << (n / 2)).map(|x| SubsetMask(double_bits(x))))
}

/// `{0, 2, 4, ...}` up to `n`.
pub fn evens(n: usize) -> IntSet {
    IntSet::from_elements(n, (0..=n).step_by(2)).expect("in range")
}

fn check_katona(n: usize, t: usize) -> Result<GroundSet> {
    if t >= n {
        return Err(Error::InvalidParameter(format!("need 0 <= t < n, got n={n}, t={t}")));
    }
    check_size(n, MAX_MATERIALIZE)
}

fn katona_member(n: usize, t: usize, s: SubsetMask) -> bool {
    if (n + t) % 2 == 1 {
        s.len() >= (n + t).div_ceil(2)
    } else {
        // the deleted point is element 0
        (s.bits() & !1).count_ones() as usize >= (n + t) / 2
    }
}

/// `A(n, t)`: every two members meet in more than `t` points.
pub fn katona_family(n: usize, t: usize) -> Result<Family> {
    let ground = check_katona(n, t)?;
    Family::new(ground, (0..1u64 << n).map(SubsetMask).filter(|&s| katona_member(n, t, s)))
}

/// `|A(n, t)|` from binomial sums.
pub fn katona_size(n: usize, t: usize) -> BigUint {
    let (n64, t64) = (n as u64, t as u64);
    if (n + t) % 2 == 1 {
        let lo = (n64 + t64).div_ceil(2);
        (lo..=n64).map(|i| binomial(n64, i)).sum()
    } else {
        let lo = (n64 + t64) / 2;
        (lo..n64).map(|i| binomial(n64 - 1, i)).sum::<BigUint>() * 2u32
    }
}

/// `A*(n, t)`: `A(n, t)` together with every set of size below `t`.
pub fn frankl_family(n: usize, t: usize) -> Result<Family> {
    if t == 0 {
        return Err(Error::InvalidParameter("frankl family needs t >= 1".into()));
    }
    let ground = check_katona(n, t)?;
    Family::new(
        ground,
        (0..1u64 << n).map(SubsetMask).filter(|&s| s.len() < t || katona_member(n, t, s)),
    )
}

/// `[n] \ {t}`.
pub fn avoid_one(n: usize, t: usize) -> Result<IntSet> {
    let mut m = IntSet::full(n);
    if t > n {
        return Err(Error::ElementOutOfRange { element: t, n });
    }
    m.remove(t);
    Ok(m)
}

/// `{t+1, ..., n}`.
pub fn above(n: usize, t: usize) -> IntSet {
    IntSet::interval(n, t + 1, n)
}

/// `[n] \ {d, 2d, ..., n}`.
pub fn remark_spec(n: usize, d: usize) -> Result<IntSet> {
    if d == 0 || !n.is_multiple_of(d) {
        return Err(Error::InvalidParameter(format!("d must divide n, got n={n}, d={d}")));
    }
    let mut m = IntSet::full(n);
    for x in (d..=n).step_by(d) {
        m.remove(x);
    }
    Ok(m)
}

/// `(2^V, all sets of size at most d-1)` with `M = [n] \ {d, 2d, ..., n}`.
pub fn remark_pair(n: usize, d: usize) -> Result<(FamilyPair, IntSet)> {
    let m = remark_spec(n, d)?;
    let ground = check_size(n, 20)?;
    let pair = FamilyPair::new(Family::power_set(ground)?, Family::by_size(ground, |s| s < d)?)?;
    Ok((pair, m))
}

/// `log2(|A| |B|) = n + log2(C(n, <=d-1))` for the pair above, without building it.
pub fn remark_log_size(n: u64, d: u64) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    Ok(n as f64 + log2_big(&binomial_le(n, d - 1)))
}

/// Least `w` with `w >= n^(21/40)`, i.e. `w^40 >= n^21`.
pub fn default_width(n: usize) -> usize {
    let target = BigUint::from(n).pow(21);
    let mut w = (n as f64).powf(0.525).floor().max(0.0) as usize;
    while BigUint::from(w).pow(40) < target {
        w += 1;
    }
    while w > 0 && BigUint::from(w - 1).pow(40) >= target {
        w -= 1;
    }
    w
}

/// `[0..t] ∪ [t+width..n]`: sizes strictly between `t` and `t + width` are forbidden.
pub fn interval_omit_spec(n: usize, t: usize, width: Option<usize>) -> Result<IntSet> {
    let width = width.unwrap_or_else(|| default_width(n));
    if t + width > n {
        return Err(Error::InvalidParameter(format!("need t + width <= n, got t={t}, width={width}, n={n}")));
    }
    let mut m = IntSet::full(n);
    for x in t + 1..t + width {
        m.remove(x);
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ConstructionSpec {
    Eventown { n: usize },
    Katona { n: usize, t: usize },
    FranklStar { n: usize, t: usize },
    RemarkPair { n: usize, d: usize },
    IntervalOmit { n: usize, t: usize, width: Option<usize> },
}

#[derive(Clone, Debug)]
pub enum Construction {
    Family { family: Family, m: IntSet },
    Pair { pair: FamilyPair, m: IntSet },
    Spec(IntSet),
}

impl ConstructionSpec {
    /// Builds the object together with the intersection specification it is certified against.
    pub fn build(&self) -> Result<Construction> {
        Ok(match *self {
            ConstructionSpec::Eventown { n } => Construction::Family { family: eventown(n)?, m: evens(n) },
            ConstructionSpec::Katona { n, t } => Construction::Family { family: katona_family(n, t)?, m: above(n, t) },
            ConstructionSpec::FranklStar { n, t } => {
                Construction::Family { family: frankl_family(n, t)?, m: avoid_one(n, t)? }
            }
            ConstructionSpec::RemarkPair { n, d } => {
                let (pair, m) = remark_pair(n, d)?;
                Construction::Pair { pair, m }
            }
            ConstructionSpec::IntervalOmit { n, t, width } => Construction::Spec(interval_omit_spec(n, t, width)?),
        })
    }
}

impl Construction {
    /// Re-checks the intersection property; `Spec` has nothing to check.
    pub fn certify(&self) -> Result<()> {
        match self {
            Construction::Family { family, m } => Ok(crate::setcore::is_intersecting_family(family, m, true)?),
            Construction::Pair { pair, m } => Ok(crate::setcore::is_intersecting_pair(pair, m)?),
            Construction::Spec(_) => Ok(()),
        }
    }
}

/// `Σ_{i<d} C(n, i)`, zero for `d = 0`.
pub fn small_sets_count(n: u64, d: u64) -> BigUint {
    if d == 0 {
        BigUint::zero()
    } else {
        binomial_le(n, d - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setcore::{is_intersecting_family, is_intersecting_pair, length_l};

    #[test]
    fn eventown_small() {
        let e2 = eventown(2).unwrap();
        assert_eq!(e2.members(), &[SubsetMask(0), SubsetMask(0b11)]);
        for n in (0..=12).step_by(2) {
            let e = eventown(n).unwrap();
            assert_eq!(e.len(), 1 << (n / 2));
            assert!(is_intersecting_family(&e, &evens(n), true).is_ok());
        }
        assert!(eventown(5).is_err());
        assert!(eventown(26).is_err());
    }

    #[test]
    fn katona_counts() {
        assert_eq!(katona_family(5, 1).unwrap().len(), 10);
        assert_eq!(katona_family(4, 1).unwrap().len(), 5);
        for n in 1..=12 {
            for t in 0..n {
                let k = katona_family(n, t).unwrap();
                assert_eq!(BigUint::from(k.len()), katona_size(n, t), "n={n} t={t}");
                if n <= 8 {
                    assert!(is_intersecting_family(&k, &above(n, t), true).is_ok(), "n={n} t={t}");
                }
            }
        }
        assert!(katona_family(3, 3).is_err());
    }

    #[test]
    fn frankl_counts() {
        assert_eq!(frankl_family(4, 1).unwrap().len(), 6);
        assert_eq!(frankl_family(6, 2).unwrap().len(), katona_family(6, 2).unwrap().len() + 7);
        for n in 2..=8 {
            for t in 1..n {
                let f = frankl_family(n, t).unwrap();
                assert!(is_intersecting_family(&f, &avoid_one(n, t).unwrap(), true).is_ok(), "n={n} t={t}");
            }
        }
        assert!(frankl_family(4, 0).is_err());
    }

    #[test]
    fn remark_pair_small() {
        let (pair, m) = remark_pair(8, 2).unwrap();
        assert_eq!(pair.a().len(), 256);
        assert_eq!(pair.b().len(), 9);
        assert!(is_intersecting_pair(&pair, &m).is_ok());
        assert_eq!(length_l(&m), 2);
        assert_eq!(m.to_vec(), vec![0, 1, 3, 5, 7]);
        assert!(remark_pair(8, 3).is_err());
        for (n, d) in [(6, 1), (6, 3), (9, 3), (12, 4)] {
            let (pair, m) = remark_pair(n, d).unwrap();
            assert!(is_intersecting_pair(&pair, &m).is_ok());
            assert_eq!(length_l(&m), d);
            assert_eq!(BigUint::from(pair.b().len()), small_sets_count(n as u64, d as u64));
        }
    }

    #[test]
    fn remark_law() {
        let n = 100_000u64;
        assert!(remark_log_size(n, 10).unwrap() >= 1.0001 * n as f64);
        let exact = remark_log_size(8, 2).unwrap();
        assert!((exact - (8.0 + 9f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn interval_spec() {
        assert_eq!(default_width(100), 12);
        assert_eq!(default_width(1), 1);
        let m = interval_omit_spec(100, 19, None).unwrap();
        let gone: Vec<usize> = m.complement().to_vec();
        assert_eq!(gone, (20..=30).collect::<Vec<_>>());
        assert_eq!(interval_omit_spec(10, 3, Some(1)).unwrap(), IntSet::full(10));
        for (n, t, w) in [(20, 3, 4), (30, 10, 5), (12, 0, 2)] {
            let m = interval_omit_spec(n, t, Some(w)).unwrap();
            assert_eq!(length_l(&m), (t + 1).max(n - t - w + 1));
        }
        assert!(interval_omit_spec(10, 8, Some(5)).is_err());
    }

    #[test]
    fn specs_certify() {
        let specs = [
            ConstructionSpec::Eventown { n: 8 },
            ConstructionSpec::Katona { n: 6, t: 2 },
            ConstructionSpec::FranklStar { n: 6, t: 2 },
            ConstructionSpec::RemarkPair { n: 8, d: 2 },
            ConstructionSpec::IntervalOmit { n: 100, t: 19, width: None },
        ];
        for s in specs {
            s.build().unwrap().certify().unwrap();
        }
        let json = serde_json::to_string(&specs[1]).unwrap();
        assert_eq!(json, r#"{"name":"katona","n":6,"t":2}"#);
    }
}
