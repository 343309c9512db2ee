use num_bigint::BigUint;
use num_integer::Integer;
use proptest::prelude::*;
use specint::bounds::binomial;
use specint::numbertheory::{
    bhp_sweep, ceil_power, fw_gcd_condition, is_prime, misint_bound, prime_in_interval, Gamma, Sieve,
};

fn trial_division(m: u64) -> bool {
    m >= 2 && (2..).take_while(|d| d * d <= m).all(|d| !m.is_multiple_of(d))
}

#[test]
fn sweep_gaps_match_frozen_values() {
    // computed separately with exact integer comparisons (s - p)^40 < s^21
    let sweep = bhp_sweep(10, 1_000_000, Gamma::BHP);
    assert_eq!(sweep.failures, vec![11, 29, 126, 127]);
    assert_eq!(bhp_sweep(128, 1_000_000, Gamma::BHP).failures, Vec::<u64>::new());
}

#[test]
fn pipeline_at_one_hundred() {
    let r = misint_bound(100, 19, 0.15, Gamma::BHP).unwrap();
    assert!(r.all_primes_found());
    assert_eq!(r.width, 12);
    assert_eq!(r.rows.len(), 21);
    assert_eq!(r.rows.first().unwrap().k, 39);
    assert_eq!(r.rows.last().unwrap().k, 59);
    assert_eq!(r.total_bound, binomial(100, 59) * 100u32);
    for row in &r.rows {
        let tk = row.t_k.unwrap();
        assert!(19 < tk && tk < 19 + 12, "k={} t_k={tk}", row.k);
        assert!(is_prime(row.k - tk));
        assert!(row.capped);
        // the largest prime below k - t
        assert!(((row.k - tk + 1)..(row.k - 19)).all(|x| !is_prime(x)));
    }
    let outside: Vec<u64> = r.rows.iter().filter(|x| !x.in_bhp_interval).map(|x| x.k).collect();
    assert_eq!(outside, vec![48]);
    assert!(r.decomposition_total <= r.total_bound);
}

#[test]
fn misint_rejects_bad_parameters() {
    assert!(misint_bound(100, 10, 0.15, Gamma::BHP).is_err());
    assert!(misint_bound(100, 19, 0.3, Gamma::BHP).is_err());
    assert!(misint_bound(100, 25, 0.15, Gamma::BHP).is_err());
}

#[test]
fn gamma_parsing() {
    assert_eq!(Gamma::parse("0.525").unwrap(), Gamma::BHP);
    assert_eq!(Gamma::parse("0.5").unwrap(), Gamma { num: 1, den: 2 });
    assert!(Gamma::parse("1.5").is_err());
    assert!(Gamma::parse("abc").is_err());
    assert_eq!(ceil_power(100, Gamma::BHP), 12);
    assert_eq!(ceil_power(64, Gamma { num: 1, den: 2 }), 8);
}

proptest! {
    #[test]
    fn primality_matches_trial_division(m in 0u64..2_000_000) {
        prop_assert_eq!(is_prime(m), trial_division(m));
    }

    #[test]
    fn large_primality_matches_trial_division(m in 1_000_000_000u64..1_000_100_000) {
        prop_assert_eq!(is_prime(m), trial_division(m));
    }

    #[test]
    fn sieve_agrees(limit in 2usize..5000, q in 0usize..5000) {
        let s = Sieve::new(limit);
        let q = q.min(limit);
        prop_assert_eq!(s.is_prime(q), trial_division(q as u64));
        let expected = (2..q).rev().find(|&p| trial_division(p as u64));
        prop_assert_eq!(s.prev_prime(q), expected);
    }

    #[test]
    fn interval_prime_is_the_largest_admissible(s in 3u64..50_000) {
        let g = Gamma::BHP;
        match prime_in_interval(s, g) {
            Some(p) => {
                prop_assert!(is_prime(p) && p < s);
                // (s - p)^40 < s^21
                prop_assert!(BigUint::from(s - p).pow(40) < BigUint::from(s).pow(21));
                prop_assert!((p + 1..s).all(|x| !is_prime(x)));
            }
            None => {
                let p = (2..s).rev().find(|&x| is_prime(x));
                prop_assert!(p.is_none_or(|p| BigUint::from(s - p).pow(40) >= BigUint::from(s).pow(21)));
            }
        }
    }

    #[test]
    fn prime_difference_implies_gcd_condition(k in 3u64..120, t in 1u64..60) {
        prop_assume!(k > 2 * t);
        let c = fw_gcd_condition(k, t).unwrap();
        let mut g = BigUint::from(0u8);
        for i in 1..=t {
            g = g.gcd(&binomial(k - i, k - t - 1));
        }
        prop_assert_eq!(&c.gcd, &g);
        prop_assert_eq!(c.holds, g > BigUint::from(1u8));
        if is_prime(k - t) {
            prop_assert!(c.holds);
        }
    }

    #[test]
    fn ceil_power_is_least(n in 1u64..100_000) {
        let w = ceil_power(n, Gamma::BHP);
        prop_assert!(BigUint::from(w).pow(40) >= BigUint::from(n).pow(21));
        prop_assert!(w == 0 || BigUint::from(w - 1).pow(40) < BigUint::from(n).pow(21));
    }
}
