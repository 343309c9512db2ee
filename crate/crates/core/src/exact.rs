//! Exact arithmetic in the field `Q(√5)`.
//!
//! The procedure's thresholds `a0 = 6 - 2√5` and `a = a0 - 7/1000` live in this
//! field, so every inequality of the form `r > a·q` with rational `r, q` can be
//! decided exactly by sign analysis instead of floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `rational + irrational·√5` with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Surd {
    rational: BigRational,
    irrational: BigRational,
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn big_ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

impl Surd {
    pub fn new(rational: BigRational, irrational: BigRational) -> Self {
        Surd { rational, irrational }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Surd { rational: r, irrational: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n.clone())))
    }

    /// `√5`.
    pub fn sqrt5() -> Self {
        Surd { rational: BigRational::zero(), irrational: BigRational::one() }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.irrational
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.irrational.is_zero()
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let s = |r: &BigRational| {
            if r.is_positive() {
                1
            } else if r.is_negative() {
                -1
            } else {
                0
            }
        };
        let (sa, sb) = (s(&self.rational), s(&self.irrational));
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with 5 b^2 (never equal since √5 is irrational)
        let a2 = &self.rational * &self.rational;
        let b2 = &self.irrational * &self.irrational * BigRational::from_integer(5.into());
        if a2 > b2 {
            sa
        } else {
            sb
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn conjugate(&self) -> Surd {
        Surd { rational: self.rational.clone(), irrational: -self.irrational.clone() }
    }

    /// Field norm `a^2 - 5 b^2`.
    pub fn norm(&self) -> BigRational {
        &self.rational * &self.rational
            - &self.irrational * &self.irrational * BigRational::from_integer(5.into())
    }

    pub fn recip(&self) -> Option<Surd> {
        let norm = self.norm();
        if norm.is_zero() {
            return None;
        }
        let c = self.conjugate();
        Some(Surd { rational: c.rational / &norm, irrational: c.irrational / norm })
    }

    pub fn div(&self, other: &Surd) -> Option<Surd> {
        Some(self * &other.recip()?)
    }

    pub fn scale(&self, r: &BigRational) -> Surd {
        Surd { rational: &self.rational * r, irrational: &self.irrational * r }
    }

    pub fn pow(&self, mut e: u32) -> Surd {
        let mut base = self.clone();
        let mut acc = Surd::from_int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        let f = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
        f(&self.rational) + f(&self.irrational) * 5f64.sqrt()
    }

    /// Smallest `k / 2^bits` (integer `k`) with `(k / 2^bits)^2 >= self`.
    /// `self` must be nonnegative.
    pub fn sqrt_ceil(&self, bits: u32) -> BigRational {
        assert!(self.signum() >= 0, "square root of a negative value");
        let scale = BigInt::one() << bits;
        let at = |k: &BigInt| BigRational::new(k.clone(), scale.clone());
        let ge = |k: &BigInt| {
            let q = at(k);
            (Surd::from_rational(&q * &q) - self.clone()).signum() >= 0
        };
        let est = self.to_f64().max(0.0).sqrt() * 2f64.powi(bits as i32);
        let mut k = BigInt::from(est.ceil() as i128);
        while !ge(&k) {
            k += 1;
        }
        while k.is_positive() && ge(&(&k - 1)) {
            k -= 1;
        }
        at(&k)
    }

    /// Largest `k / 2^bits` with `(k / 2^bits)^2 <= self`.
    pub fn sqrt_floor(&self, bits: u32) -> BigRational {
        let up = self.sqrt_ceil(bits);
        let sq = Surd::from_rational(&up * &up);
        if sq == *self {
            up
        } else {
            up - BigRational::new(BigInt::one(), BigInt::one() << bits)
        }
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}·√5)", self.rational, self.irrational)
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, o: &Surd) -> Surd {
        Surd { rational: &self.rational + &o.rational, irrational: &self.irrational + &o.irrational }
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, o: &Surd) -> Surd {
        Surd { rational: &self.rational - &o.rational, irrational: &self.irrational - &o.irrational }
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, o: &Surd) -> Surd {
        let five = BigRational::from_integer(5.into());
        Surd {
            rational: &self.rational * &o.rational + &self.irrational * &o.irrational * five,
            irrational: &self.rational * &o.irrational + &self.irrational * &o.rational,
        }
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, o: Surd) -> Surd {
        &self + &o
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, o: Surd) -> Surd {
        &self - &o
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, o: Surd) -> Surd {
        &self * &o
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { rational: -self.rational, irrational: -self.irrational }
    }
}

/// Smallest integer `s` with `s >= sqrt(r) · x / 2`, i.e. `4 s^2 >= r x^2`.
pub fn ceil_half_sqrt_times(r: &BigRational, x: u64) -> u64 {
    let target = r * BigRational::from_integer((x * x).into());
    let mut s = ((r.to_f64().unwrap().sqrt() * x as f64) / 2.0).floor().max(0.0) as u64;
    while BigRational::from_integer((4 * s * s).into()) < target {
        s += 1;
    }
    while s > 0 && BigRational::from_integer((4 * (s - 1) * (s - 1)).into()) >= target {
        s -= 1;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_cases() {
        let s = |a: i64, b: i64| Surd::new(ratio(a, 1), ratio(b, 1)).signum();
        assert_eq!(s(0, 0), 0);
        assert_eq!(s(3, 0), 1);
        assert_eq!(s(0, -1), -1);
        assert_eq!(s(2, 1), 1);
        assert_eq!(s(-2, -1), -1);
        // 3 - √5 > 0, 2 - √5 < 0, -3 + √5 < 0, -2 + √5 > 0
        assert_eq!(s(3, -1), 1);
        assert_eq!(s(2, -1), -1);
        assert_eq!(s(-3, 1), -1);
        assert_eq!(s(-2, 1), 1);
    }

    #[test]
    fn field_operations() {
        let x = Surd::new(ratio(6, 1), ratio(-2, 1));
        let r = Surd::new(ratio(-1, 1), ratio(1, 1));
        assert_eq!(&r * &r, x);
        let inv = x.recip().unwrap();
        assert_eq!(&x * &inv, Surd::from_int(1));
        assert_eq!(x.pow(3), &(&x * &x) * &x);
        assert!((x.to_f64() - (6.0 - 2.0 * 5f64.sqrt())).abs() < 1e-15);
        assert!(Surd::from_int(0).recip().is_none());
    }

    #[test]
    fn square_root_brackets() {
        let x = Surd::new(ratio(6, 1), ratio(-2, 1));
        let lo = x.sqrt_floor(40);
        let hi = x.sqrt_ceil(40);
        assert!(Surd::from_rational(&lo * &lo) <= x);
        assert!(Surd::from_rational(&hi * &hi) >= x);
        assert!(lo < hi);
        let four = Surd::from_int(4);
        assert_eq!(four.sqrt_ceil(10), ratio(2, 1));
        assert_eq!(four.sqrt_floor(10), ratio(2, 1));
    }

    #[test]
    fn ceil_half_sqrt() {
        let eps = ratio(2, 10_000);
        // sqrt(eps)/2 * x ≈ 0.00707 x
        assert_eq!(ceil_half_sqrt_times(&eps, 0), 0);
        assert_eq!(ceil_half_sqrt_times(&eps, 1), 1);
        assert_eq!(ceil_half_sqrt_times(&eps, 141), 1);
        assert_eq!(ceil_half_sqrt_times(&eps, 142), 2);
        assert_eq!(ceil_half_sqrt_times(&ratio(4, 1), 3), 3);
    }
}
