//! Big-integer binomials, base-2 logarithms, and bound reports.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, ≤k) = Σ_{i ≤ k} C(n, i)`.
pub fn binomial_le(n: u64, k: u64) -> BigUint {
    let mut term = BigUint::one();
    let mut sum = BigUint::one();
    for i in 0..k.min(n) {
        term = term * (n - i) / (i + 1);
        sum += &term;
    }
    sum
}

/// `log2(x)` to double precision; `-inf` for zero.
pub fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let drop = bits.saturating_sub(60);
    let top = (x >> drop).to_f64().unwrap();
    top.log2() + drop as f64
}

fn ser_big<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&x.to_str_radix(10)),
        None => s.serialize_none(),
    }
}

/// A bound value carried in log2 space, with an exact integer when one exists.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub label: String,
    pub log2: f64,
    #[serde(serialize_with = "ser_big")]
    pub exact: Option<BigUint>,
    /// Which result the formula comes from.
    pub source: String,
}

impl BoundReport {
    pub fn exact(label: &str, source: &str, value: BigUint) -> Self {
        BoundReport { label: label.into(), log2: log2_big(&value), exact: Some(value), source: source.into() }
    }

    pub fn log_only(label: &str, source: &str, log2: f64) -> Self {
        BoundReport { label: label.into(), log2, exact: None, source: source.into() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(4, 5), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(100, 50).to_str_radix(10), "100891344545564193334812497256");
        assert_eq!(binomial_le(5, 2), BigUint::from(16u32));
        assert_eq!(binomial_le(3, 7), BigUint::from(8u32));
        // Pascal's rule as an independent check
        for n in 1..40u64 {
            for k in 1..n {
                assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
            }
        }
    }

    #[test]
    fn logs() {
        assert_eq!(log2_big(&BigUint::from(1024u32)), 10.0);
        let big = BigUint::one() << 200u32;
        assert!((log2_big(&(big * 3u32)) - (200.0 + 3f64.log2())).abs() < 1e-12);
        assert_eq!(log2_big(&BigUint::zero()), f64::NEG_INFINITY);
    }
}
