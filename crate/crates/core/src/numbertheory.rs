//! Primality, primes in short intervals, the gcd condition for t-avoiding
//! uniform families, and the interval-omitting bound pipeline.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::bounds::{binomial, log2_big};
use crate::constructions::default_width;
use crate::error::{Error, Result};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin over all of `u64`.
pub fn is_prime(m: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if m < 2 {
        return false;
    }
    for p in BASES {
        if m.is_multiple_of(p) {
            return m == p;
        }
    }
    let s = (m - 1).trailing_zeros();
    let d = (m - 1) >> s;
    'outer: for a in BASES {
        let mut x = pow_mod(a, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, m);
            if x == m - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Sieve of Eratosthenes on `0..=limit`.
pub struct Sieve {
    composite: Vec<bool>,
}

impl Sieve {
    pub fn new(limit: usize) -> Self {
        let mut composite = vec![false; limit + 1];
        for c in composite.iter_mut().take(2) {
            *c = true;
        }
        let mut i = 2;
        while i * i <= limit {
            if !composite[i] {
                for j in (i * i..=limit).step_by(i) {
                    composite[j] = true;
                }
            }
            i += 1;
        }
        Sieve { composite }
    }

    pub fn limit(&self) -> usize {
        self.composite.len() - 1
    }

    pub fn is_prime(&self, m: usize) -> bool {
        !self.composite[m]
    }

    /// Largest prime strictly below `s`.
    pub fn prev_prime(&self, s: usize) -> Option<usize> {
        (2..s.min(self.composite.len())).rev().find(|&p| !self.composite[p])
    }
}

/// Exponent `γ = num / den` used for interval lengths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Gamma {
    pub num: u32,
    pub den: u32,
}

impl Gamma {
    pub const BHP: Gamma = Gamma { num: 21, den: 40 };

    /// Accepts decimal text such as `0.525`, reduced to lowest terms.
    pub fn parse(text: &str) -> Result<Gamma> {
        let bad = || Error::Parse(format!("gamma must be a decimal in (0, 1), got {text:?}"));
        let text = text.trim();
        let (int, frac) = text.split_once('.').unwrap_or((text, ""));
        if !int.trim_start_matches('0').is_empty() || frac.len() > 9 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let num: u32 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let den = 10u32.pow(frac.len() as u32);
        if num == 0 {
            return Err(bad());
        }
        let g = num.gcd(&den);
        Ok(Gamma { num: num / g, den: den / g })
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `d < s^γ`, i.e. `d^den < s^num`, exactly.
    pub fn below_power(self, d: u64, s: u64) -> bool {
        let (lhs, rhs) = (self.den as f64 * (d as f64).ln(), self.num as f64 * (s as f64).ln());
        if d == 0 {
            return s > 0;
        }
        if (lhs - rhs).abs() > 1e-9 * rhs.abs().max(1.0) {
            return lhs < rhs;
        }
        BigUint::from(d).pow(self.den) < BigUint::from(s).pow(self.num)
    }
}

/// Largest prime `p` with `s - s^γ < p < s`.
pub fn prime_in_interval(s: u64, gamma: Gamma) -> Option<u64> {
    let mut p = s.checked_sub(1)?;
    while p >= 2 && gamma.below_power(s - p, s) {
        if is_prime(p) {
            return Some(p);
        }
        p -= 1;
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BhpSweep {
    pub from: u64,
    pub to: u64,
    /// Values of `s` whose interval holds no prime.
    pub failures: Vec<u64>,
    /// Largest ratio `(s - p) / s^γ` over the sweep.
    pub worst_ratio: f64,
    pub worst_s: u64,
}

/// Checks every `from <= s <= to` with a sieve. Only the largest prime below
/// `s` matters: if it misses the interval, every smaller prime does.
pub fn bhp_sweep(from: u64, to: u64, gamma: Gamma) -> BhpSweep {
    let sieve = Sieve::new(to as usize);
    let mut prev = None;
    let mut sweep = BhpSweep { from, to, failures: Vec::new(), worst_ratio: 0.0, worst_s: from };
    for s in 2..=to {
        if s >= from {
            let ok = prev.is_some_and(|p| gamma.below_power(s - p, s));
            if !ok {
                sweep.failures.push(s);
            }
            if let Some(p) = prev {
                let r = (s - p) as f64 / (s as f64).powf(gamma.to_f64());
                if r > sweep.worst_ratio {
                    sweep.worst_ratio = r;
                    sweep.worst_s = s;
                }
            }
        }
        if sieve.is_prime(s as usize) {
            prev = Some(s);
        }
    }
    sweep
}

fn ser_dec<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FwCondition {
    pub k: u64,
    pub t: u64,
    #[serde(serialize_with = "ser_dec")]
    pub gcd: BigUint,
    pub holds: bool,
}

/// `gcd(C(k-1, k-t-1), C(k-2, k-t-1), ..., C(k-t, k-t-1)) > 1`.
pub fn fw_gcd_condition(k: u64, t: u64) -> Result<FwCondition> {
    if t == 0 || k <= 2 * t {
        return Err(Error::InvalidParameter(format!("need t >= 1 and k > 2t, got k={k}, t={t}")));
    }
    let r = k - t - 1;
    let gcd = (1..=t).fold(BigUint::zero(), |g, i| g.gcd(&binomial(k - i, r)));
    let holds = gcd > BigUint::one();
    Ok(FwCondition { k, t, gcd, holds })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MisintRow {
    pub k: u64,
    /// `k - t`
    pub s: u64,
    pub prime: Option<u64>,
    /// The prime also lies in `(s - s^γ, s)`.
    pub in_bhp_interval: bool,
    pub t_k: Option<u64>,
    #[serde(serialize_with = "ser_opt_dec")]
    pub term: Option<BigUint>,
    pub term_log2: Option<f64>,
    /// `term <= C(n, ⌊(n-t)/2⌋)`
    pub capped: bool,
    /// `k > 2 t_k`, the uniform-family hypothesis at the chosen `t_k`.
    pub fw_hypothesis_holds: bool,
    pub gcd_condition_holds: bool,
}

fn ser_opt_dec<S: Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&x.to_str_radix(10)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MisintReport {
    pub n: u64,
    pub t: u64,
    pub gamma: Gamma,
    pub eps: f64,
    /// `⌈n^γ⌉`
    pub width: u64,
    #[serde(serialize_with = "ser_dec")]
    pub first_range_term: BigUint,
    pub first_range_count: u64,
    pub rows: Vec<MisintRow>,
    pub missing_primes: Vec<u64>,
    #[serde(serialize_with = "ser_dec")]
    pub final_term_floor: BigUint,
    #[serde(serialize_with = "ser_dec")]
    pub final_term_ceil: BigUint,
    pub final_range_count: u64,
    /// `C(n, ⌊(n-t)/2⌋)`
    #[serde(serialize_with = "ser_dec")]
    pub middle_cap: BigUint,
    /// Sum of every per-size bound in the three ranges.
    #[serde(serialize_with = "ser_dec")]
    pub decomposition_total: BigUint,
    /// `n · C(n, ⌊(n+t)/2⌋)`
    #[serde(serialize_with = "ser_dec")]
    pub total_bound: BigUint,
    pub total_bound_log2: f64,
    pub warning: String,
}

impl MisintReport {
    pub fn all_primes_found(&self) -> bool {
        self.missing_primes.is_empty()
    }

    pub fn all_capped(&self) -> bool {
        self.rows.iter().all(|r| r.capped)
    }
}

/// The three-range decomposition bounding a family that omits every size in
/// `(t, t + n^γ)`. Sizes `k <= 2t` are bounded by `C(n, 2t)`, sizes above
/// `(n+t)/2` by `C(n, ⌊(n+t)/2⌋)`, and each size in between by `C(n, k - t_k - 1)`
/// where `k - t_k` is the largest prime below `k - t`, accepted when
/// `t < t_k < t + n^γ`. Whether it also lies in the short interval
/// `(k-t - (k-t)^γ, k-t)` is recorded per row.
pub fn misint_bound(n: u64, t: u64, eps: f64, gamma: Gamma) -> Result<MisintReport> {
    if !(eps > 0.0 && eps < 0.2) {
        return Err(Error::InvalidParameter(format!("need 0 < eps < 1/5, got {eps}")));
    }
    if !(eps * (n as f64) < t as f64 && 5 * t < n) {
        return Err(Error::InvalidParameter(format!("need eps*n < t < n/5, got n={n}, t={t}, eps={eps}")));
    }
    let width = if gamma == Gamma::BHP { default_width(n as usize) as u64 } else { ceil_power(n, gamma) };
    if width <= 1 {
        return Err(Error::InvalidParameter(format!("n^gamma <= 1 for n={n}: nothing is forbidden")));
    }
    let middle_cap = binomial(n, (n - t) / 2);
    let hi = (n + t) / 2;
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for k in 2 * t + 1..=hi {
        let s = k - t;
        // the largest prime below s; it is usable when t_k = k - p lies in (t, t + n^γ)
        let below = (2..s).rev().find(|&p| is_prime(p));
        let in_bhp_interval = below.is_some_and(|p| gamma.below_power(s - p, s));
        let prime = below.filter(|&p| gamma.below_power(s - p, n));
        let t_k = prime.map(|p| k - p);
        let term = t_k.map(|tk| binomial(n, k - tk - 1));
        if prime.is_none() {
            missing.push(k);
        }
        let gcd_condition_holds = t_k.is_some_and(|tk| tk >= 1 && fw_gcd_condition(k, tk).is_ok_and(|c| c.holds));
        rows.push(MisintRow {
            k,
            s,
            prime,
            in_bhp_interval,
            t_k,
            term_log2: term.as_ref().map(log2_big),
            capped: term.as_ref().is_some_and(|x| *x <= middle_cap),
            term,
            fw_hypothesis_holds: t_k.is_some_and(|tk| k > 2 * tk),
            gcd_condition_holds,
        });
    }
    let first_range_term = binomial(n, 2 * t);
    let first_range_count = 2 * t + 1;
    let final_term_floor = binomial(n, hi);
    let final_term_ceil = binomial(n, (n + t).div_ceil(2));
    let final_range_count = n - hi;
    let mut decomposition_total = &first_range_term * first_range_count + &final_term_floor * final_range_count;
    for r in &rows {
        decomposition_total += r.term.as_ref().unwrap_or(&middle_cap);
    }
    let total_bound = &final_term_floor * n;
    Ok(MisintReport {
        n,
        t,
        gamma,
        eps,
        width,
        first_range_term,
        first_range_count,
        total_bound_log2: log2_big(&total_bound),
        rows,
        missing_primes: missing,
        final_term_floor,
        final_term_ceil,
        final_range_count,
        middle_cap,
        decomposition_total,
        total_bound,
        warning: "hypotheses are checked syntactically; the asymptotic threshold on n is not certified".into(),
    })
}

/// Least `w` with `w^den >= n^num`.
pub fn ceil_power(n: u64, gamma: Gamma) -> u64 {
    let target = BigUint::from(n).pow(gamma.num);
    let mut w = (n as f64).powf(gamma.to_f64()).floor().max(0.0) as u64;
    while BigUint::from(w).pow(gamma.den) < target {
        w += 1;
    }
    while w > 0 && BigUint::from(w - 1).pow(gamma.den) >= target {
        w -= 1;
    }
    w
}
