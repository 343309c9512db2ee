use num_bigint::BigUint;
use specint::bounds::binomial;
use specint::constructions::{
    above, avoid_one, default_width, eventown, evens, frankl_family, interval_omit_spec, katona_family, katona_size,
    remark_log_size, remark_pair, remark_spec, small_sets_count, Construction, ConstructionSpec,
};
use specint::height::{pair_height, sgall_bound, HeightMemo};
use specint::procedure::{run_procedure_with, verify_trace, Strategy, Variant};
use specint::{is_intersecting_family, is_intersecting_pair, length_l};

#[test]
fn eventown_sizes_and_certificates() {
    for n in (0..=16).step_by(2) {
        let e = eventown(n).unwrap();
        assert_eq!(e.len(), 1 << (n / 2));
        assert!(is_intersecting_family(&e, &evens(n), true).is_ok());
    }
    assert!(eventown(5).is_err());
}

#[test]
fn katona_sizes_match_the_formula() {
    for n in 1..=12 {
        for t in 0..n {
            let f = katona_family(n, t).unwrap();
            assert_eq!(BigUint::from(f.len()), katona_size(n, t), "n={n} t={t}");
            assert!(is_intersecting_family(&f, &above(n, t), true).is_ok());
        }
    }
}

#[test]
fn frankl_family_avoids_one_size() {
    for n in 2..=10 {
        for t in 1..n {
            let f = frankl_family(n, t).unwrap();
            let m = avoid_one(n, t).unwrap();
            assert!(is_intersecting_family(&f, &m, true).is_ok(), "n={n} t={t}");
            let small: usize = (0..t).map(|i| usize::try_from(binomial(n as u64, i as u64)).unwrap()).sum();
            assert_eq!(f.len(), katona_family(n, t).unwrap().len() + small);
        }
    }
}

#[test]
fn remark_pair_is_certified_and_long() {
    for (n, d) in [(8, 2), (9, 3), (12, 4)] {
        let (pair, m) = remark_pair(n, d).unwrap();
        assert!(is_intersecting_pair(&pair, &m).is_ok());
        assert_eq!(length_l(&m), d);
        assert_eq!(BigUint::from(pair.b().len()), small_sets_count(n as u64, d as u64));
        let log2 = ((pair.a().len() * pair.b().len()) as f64).log2();
        assert!((log2 - remark_log_size(n as u64, d as u64).unwrap()).abs() < 1e-9);
        // the height bound applies to this pair as to any other
        let mut memo = HeightMemo::new();
        let s = pair_height(&pair, &mut memo).unwrap().max(1) as usize;
        let bound = sgall_bound(n, s).unwrap().exact.unwrap();
        assert!(BigUint::from(pair.a().len() * pair.b().len()) <= bound);
    }
    assert!(remark_spec(10, 3).is_err());
    assert!(remark_log_size(100_000, 10).unwrap() >= 1.0001 * 100_000.0);
}

#[test]
fn interval_omit_forbids_the_open_window() {
    let m = interval_omit_spec(100, 19, None).unwrap();
    assert_eq!(default_width(100), 12);
    let forbidden = m.complement().to_vec();
    assert_eq!(forbidden, (20..31).collect::<Vec<_>>());
    assert!(interval_omit_spec(20, 15, Some(8)).is_err());
}

#[test]
fn specs_build_and_round_trip() {
    let specs = [
        ConstructionSpec::Eventown { n: 6 },
        ConstructionSpec::Katona { n: 7, t: 2 },
        ConstructionSpec::FranklStar { n: 7, t: 3 },
        ConstructionSpec::RemarkPair { n: 8, d: 2 },
        ConstructionSpec::IntervalOmit { n: 40, t: 7, width: None },
    ];
    for spec in specs {
        let json = serde_json::to_string(&spec).unwrap();
        let back: ConstructionSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let built = spec.build().unwrap();
        built.certify().unwrap();
        if let Construction::Spec(m) = &built {
            assert!(m.contains(7) && !m.contains(8));
        }
    }
}

#[test]
fn procedure_runs_clean_on_constructions() {
    let e = eventown(6).unwrap();
    let pair = specint::FamilyPair::new(e.clone(), e).unwrap();
    for strategy in [Strategy::FirstMatch, Strategy::Greedy] {
        for variant in [Variant::Literal, Variant::Symmetric] {
            let trace = run_procedure_with(&pair, &evens(6), strategy, variant).unwrap();
            assert!(verify_trace(&trace).is_clean());
        }
    }
    let (pair, m) = remark_pair(6, 2).unwrap();
    let trace = run_procedure_with(&pair, &m, Strategy::FirstMatch, Variant::Symmetric).unwrap();
    let audit = verify_trace(&trace);
    assert!(audit.is_clean(), "{:?}", audit.violations);
    assert!(trace.c3_count() <= length_l(&m));
}
