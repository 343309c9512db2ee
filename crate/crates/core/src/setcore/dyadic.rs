use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// A nonnegative rational `numerator / 2^log2_denominator`, kept canonical
/// (numerator odd, or zero with exponent 0).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: BigUint,
    log2_denominator: u64,
}

impl DyadicRational {
    pub fn new(numerator: BigUint, log2_denominator: u64) -> Self {
        if numerator.is_zero() {
            return DyadicRational { numerator, log2_denominator: 0 };
        }
        let tz = numerator.trailing_zeros().unwrap_or(0).min(log2_denominator);
        DyadicRational { numerator: numerator >> tz, log2_denominator: log2_denominator - tz }
    }

    pub fn zero() -> Self {
        Self::new(BigUint::zero(), 0)
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn log2_denominator(&self) -> u64 {
        self.log2_denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Numerator rescaled to the denominator `2^log2_den`; `None` if that
    /// denominator is too small to represent the value exactly.
    pub fn numerator_at(&self, log2_den: u64) -> Option<BigUint> {
        if log2_den < self.log2_denominator {
            return None;
        }
        Some(&self.numerator << (log2_den - self.log2_denominator))
    }

    pub fn mul(&self, other: &DyadicRational) -> DyadicRational {
        DyadicRational::new(
            &self.numerator * &other.numerator,
            self.log2_denominator + other.log2_denominator,
        )
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numerator.clone().into(), (BigUint::from(1u8) << self.log2_denominator).into())
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.numerator.bits();
        // keep 60 significant bits before scaling
        let drop = bits.saturating_sub(60);
        let top = (&self.numerator >> drop).to_f64().unwrap_or(f64::INFINITY);
        top * 2f64.powi(drop as i32 - self.log2_denominator as i32)
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.log2_denominator.max(other.log2_denominator);
        self.numerator_at(d).unwrap().cmp(&other.numerator_at(d).unwrap())
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.log2_denominator)
    }
}

#[derive(Serialize, Deserialize)]
struct DyadicWire {
    num: String,
    log2den: u64,
}

impl Serialize for DyadicRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DyadicWire { num: self.numerator.to_str_radix(10), log2den: self.log2_denominator }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DyadicRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = DyadicWire::deserialize(d)?;
        let num = BigUint::parse_bytes(w.num.as_bytes(), 10)
            .ok_or_else(|| serde::de::Error::custom(format!("bad decimal numerator {:?}", w.num)))?;
        Ok(DyadicRational::new(num, w.log2den))
    }
}
