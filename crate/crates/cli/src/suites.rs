//! Named verification suites. Each returns its measurements and a list of
//! violations; an empty list means the suite passed.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use specint::bounds::{binomial, log2_big};
use specint::constructions::{eventown, evens, remark_log_size, remark_pair};
use specint::height::{check_axioms, check_growth, height, height_original, pair_height, sgall_bound, HeightMemo};
use specint::numbertheory::{bhp_sweep, ceil_power, fw_gcd_condition, is_prime, misint_bound, Gamma};
use specint::procedure::{
    audit_constants, random_intersecting_pair, run_procedure_with, verify_trace, Strategy, Variant,
};
use specint::search::{max_family, verify_fw_bound, verify_katona, SearchConfig};
use specint::{length_l, FamilyPair, IntSet};

pub const DEFAULT_SEED: u64 = 7;

/// Sweep length for the largest value of `σ(m)`.
pub const SIGMA_SWEEP: u64 = 1_000_000;
/// `|f(a0)|` must be below this in floating point as well.
pub const F_A0_TOLERANCE: f64 = 1e-12;
/// `n + log2 |B|` must reach `REMARK_FACTOR · n`.
pub const REMARK_FACTOR: f64 = 1.0001;
pub const REMARK_N: u64 = 100_000;
pub const REMARK_D: u64 = 10;
/// The search oracle for the gcd-condition bound only visits `C(n, k) <= FW_MAX_VERTICES`.
pub const FW_MAX_VERTICES: u64 = 500;
pub const MISINT_N: u64 = 100;
pub const MISINT_T: u64 = 19;
pub const MISINT_EPS: f64 = 0.15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Constants,
    Axioms,
    P2,
    Sgall,
    Procedure,
    Fw,
    Katona,
    Eventown,
    Bhp,
    Remark,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Constants,
        Suite::Axioms,
        Suite::P2,
        Suite::Sgall,
        Suite::Procedure,
        Suite::Fw,
        Suite::Katona,
        Suite::Eventown,
        Suite::Bhp,
        Suite::Remark,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Constants => "constants",
            Suite::Axioms => "axioms",
            Suite::P2 => "p2",
            Suite::Sgall => "sgall",
            Suite::Procedure => "procedure",
            Suite::Fw => "fw",
            Suite::Katona => "katona",
            Suite::Eventown => "eventown",
            Suite::Bhp => "bhp",
            Suite::Remark => "remark",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            format!("unknown suite {s:?}; expected one of {}", names.join(", "))
        })
    }
}

/// Suite parameters; `None` picks the suite's default.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteParams {
    pub max_n: Option<usize>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub max_k: Option<u64>,
    pub max_s: Option<u64>,
    pub variant: Variant,
    pub threads: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            max_n: None,
            samples: None,
            seed: DEFAULT_SEED,
            max_k: None,
            max_s: None,
            variant: Variant::Literal,
            threads: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub summary: String,
    pub details: Value,
    pub violations: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn run_suite(suite: Suite, params: &SuiteParams) -> SuiteOutcome {
    let (summary, details, violations) = match suite {
        Suite::Constants => constants(),
        Suite::Axioms => axioms(params.max_n.unwrap_or(6)),
        Suite::P2 => p2(params.max_n.unwrap_or(8)),
        Suite::Sgall => sgall(params.max_n.unwrap_or(5), params.samples.unwrap_or(1000), params.seed),
        Suite::Procedure => procedure(params.max_n.unwrap_or(8), params.samples.unwrap_or(50), params.seed, params.variant),
        Suite::Fw => fw(params.max_n.unwrap_or(10), params.max_k.unwrap_or(200), params),
        Suite::Katona => katona(params.max_n.unwrap_or(7), params),
        Suite::Eventown => eventown_suite(params.max_n.unwrap_or(6), params),
        Suite::Bhp => bhp(params.max_s.unwrap_or(1_000_000)),
        Suite::Remark => remark(),
    };
    SuiteOutcome { suite, summary, details, violations }
}

fn search_config(params: &SuiteParams) -> SearchConfig {
    SearchConfig { threads: params.threads, seed: params.seed, ..SearchConfig::default() }
}

/// The fw suite only needs the bound, so the exact maximum gets a short budget.
fn fw_config(params: &SuiteParams) -> SearchConfig {
    SearchConfig { time_limit: Some(std::time::Duration::from_millis(250)), ..search_config(params) }
}

type Parts = (String, Value, Vec<String>);

fn constants() -> Parts {
    let audit = audit_constants(SIGMA_SWEEP);
    let mut v = Vec::new();
    if !audit.f_a0_is_zero || audit.f_a0.abs() >= F_A0_TOLERANCE {
        v.push(format!("f(a0) = {:e} is not zero", audit.f_a0));
    }
    if !audit.f_a_exceeds_sqrt_eps {
        v.push(format!("f(a) = {} does not exceed sqrt(eps) = {}", audit.f_a, audit.sqrt_eps));
    }
    if !audit.four_over_a_in_range {
        v.push(format!("4/a = {} is outside (2.630, 2.631)", audit.four_over_a));
    }
    if !audit.one_minus_log2_a_exceeds {
        v.push(format!("1 - log2 a = {} is not above 0.38", audit.one_minus_log2_a));
    }
    if audit.sigma_max >= 0.1 {
        v.push(format!("sigma({}) = {} is not below 0.1", audit.sigma_argmax, audit.sigma_max));
    }
    let summary = format!(
        "f(a0)={:.1e} f(a)={:.5} 4/a={:.5} 1-log2(a)={:.4} max sigma={:.5} at m={}",
        audit.f_a0, audit.f_a, audit.four_over_a, audit.one_minus_log2_a, audit.sigma_max, audit.sigma_argmax
    );
    (summary, json!(audit), v)
}

fn axioms(max_n: usize) -> Parts {
    let mut v = Vec::new();
    let found = match check_axioms(max_n) {
        Ok(found) => found,
        Err(e) => return (format!("error: {e}"), Value::Null, vec![e.to_string()]),
    };
    for x in found.iter().take(20) {
        v.push(format!("{:?} fails at L={:?}, L'={:?}", x.axiom, x.l, x.l_prime));
    }
    if found.len() > 20 {
        v.push(format!("... {} axiom violations in total", found.len()));
    }
    let mut memo = HeightMemo::new();
    let mut compared = 0;
    let mut mismatches = 0;
    for mask in 0..1u64 << (max_n + 1) {
        let set = IntSet::from_mask(max_n, mask).expect("mask within range");
        let fast = height(&set, &mut memo);
        let slow = height_original(&set);
        compared += 1;
        match (fast, slow) {
            (Ok(a), Ok(b)) if a == b => {}
            (a, b) => {
                mismatches += 1;
                if mismatches <= 20 {
                    v.push(format!("height {set} = {a:?} but direct recursion gives {b:?}"));
                }
            }
        }
    }
    let pairs = 1u64 << (2 * (max_n + 1));
    let summary = format!(
        "{pairs} ordered pairs checked, {} axiom violations; {compared} sets compared with the direct recursion, {mismatches} mismatches",
        found.len()
    );
    (summary, json!({"max_n": max_n, "pairs": pairs, "axiom_violations": found, "compared": compared, "mismatches": mismatches}), v)
}

fn p2(max_n: usize) -> Parts {
    match check_growth(max_n) {
        Ok(found) => {
            let v: Vec<String> = found
                .iter()
                .map(|g| format!("W={:?} h={} l={}: {}", g.set, g.h, g.run_length, g.reason))
                .collect();
            let sets = (1u64 << (max_n + 1)) - 1;
            (format!("{sets} nonempty sets checked, {} violations", v.len()), json!({"max_n": max_n, "sets": sets, "violations": found}), v)
        }
        Err(e) => (format!("error: {e}"), Value::Null, vec![e.to_string()]),
    }
}

fn sgall(max_n: usize, samples: usize, seed: u64) -> Parts {
    let mut v = Vec::new();
    let mut rows = Vec::new();
    let mut memo = HeightMemo::new();
    for n in 3..=max_n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(n as u64));
        let mut worst = f64::NEG_INFINITY;
        let mut max_s = 0;
        for i in 0..samples {
            let (pair, _m) = match random_intersecting_pair(n, &mut rng) {
                Ok(x) => x,
                Err(e) => {
                    v.push(format!("n={n}: {e}"));
                    break;
                }
            };
            let s = match pair_height(&pair, &mut memo) {
                Ok(s) => s.max(1) as usize,
                Err(e) => {
                    v.push(format!("n={n} sample {i}: {e}"));
                    continue;
                }
            };
            max_s = max_s.max(s);
            let product = pair.a().len() as u64 * pair.b().len() as u64;
            match sgall_bound(n, s) {
                Ok(b) => {
                    let bound = b.exact.expect("exact bound");
                    worst = worst.max((product as f64).log2() - log2_big(&bound));
                    if BigUint::from(product) > bound {
                        v.push(format!("n={n} sample {i}: |A||B| = {product} exceeds the bound {bound} at s={s}"));
                    }
                }
                Err(e) => v.push(format!("n={n} sample {i}: {e}")),
            }
        }
        rows.push(json!({"n": n, "samples": samples, "max_height": max_s, "worst_log2_ratio": worst}));
    }
    let summary = format!("{} random pairs on n=3..={max_n}, seed {seed}, {} violations", samples * max_n.saturating_sub(2), v.len());
    (summary, json!({"seed": seed, "rows": rows}), v)
}

/// Counts for one variant of the procedure suite.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ProcedureTally {
    pub traces: usize,
    pub clean: usize,
    pub stop_states: usize,
    pub claim_failures: usize,
    pub edge_count_failures: usize,
    pub counting_failures: usize,
    pub other_failures: usize,
    pub max_c3: usize,
}

fn audit_one(pair: &FamilyPair, m: &IntSet, strategy: Strategy, variant: Variant, label: &str, tally: &mut ProcedureTally, v: &mut Vec<String>) {
    let trace = match run_procedure_with(pair, m, strategy, variant) {
        Ok(t) => t,
        Err(e) => {
            tally.other_failures += 1;
            v.push(format!("{label}: {e}"));
            return;
        }
    };
    tally.traces += 1;
    tally.max_c3 = tally.max_c3.max(trace.c3_count());
    if let Some(stop) = &trace.stop_state {
        tally.stop_states += 1;
        tally.claim_failures += usize::from(!stop.claim_ok);
        tally.edge_count_failures += usize::from(!stop.edge_count_ok);
        tally.counting_failures += usize::from(!stop.counting_claim_ok);
    }
    let audit = verify_trace(&trace);
    if audit.is_clean() {
        tally.clean += 1;
        return;
    }
    let stop_kind = |s: &String| s.starts_with("stop state:");
    if !audit.violations.iter().all(stop_kind) {
        tally.other_failures += 1;
    }
    for msg in audit.violations {
        v.push(format!("{label} M={m}: {msg}"));
    }
}

/// Runs the procedure on `samples` random pairs for each `3 <= n <= max_n`
/// under both strategies, plus the Eventown pair on 8 points.
pub fn procedure_tally(max_n: usize, samples: usize, seed: u64, variant: Variant) -> (ProcedureTally, Vec<String>) {
    let mut tally = ProcedureTally::default();
    let mut v = Vec::new();
    for n in 3..=max_n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(n as u64));
        for i in 0..samples {
            let (pair, m) = match random_intersecting_pair(n, &mut rng) {
                Ok(x) => x,
                Err(e) => {
                    v.push(format!("n={n}: {e}"));
                    break;
                }
            };
            for strategy in [Strategy::FirstMatch, Strategy::Greedy] {
                audit_one(&pair, &m, strategy, variant, &format!("n={n} sample {i} {strategy:?}"), &mut tally, &mut v);
            }
        }
    }
    let e = eventown(8).expect("n=8 is even");
    let pair = FamilyPair::new(e.clone(), e).expect("same ground set");
    for strategy in [Strategy::FirstMatch, Strategy::Greedy] {
        audit_one(&pair, &evens(8), strategy, variant, &format!("eventown n=8 {strategy:?}"), &mut tally, &mut v);
    }
    (tally, v)
}

fn procedure(max_n: usize, samples: usize, seed: u64, variant: Variant) -> Parts {
    let (tally, v) = procedure_tally(max_n, samples, seed, variant);
    let summary = format!(
        "{variant:?}: {} traces, {} clean; {} stop states with {} claim, {} edge-count and {} counting failures; {} other failures; max C3 steps {}",
        tally.traces,
        tally.clean,
        tally.stop_states,
        tally.claim_failures,
        tally.edge_count_failures,
        tally.counting_failures,
        tally.other_failures,
        tally.max_c3
    );
    (summary, json!({"seed": seed, "samples_per_n": samples, "max_n": max_n, "variant": variant, "tally": tally}), v)
}

fn katona(max_n: usize, params: &SuiteParams) -> Parts {
    let cfg = search_config(params);
    let mut v = Vec::new();
    let mut rows = Vec::new();
    for n in 1..=max_n {
        for t in 0..n {
            match verify_katona(n, t, &cfg) {
                Ok(c) => {
                    if !c.equal {
                        v.push(format!("n={n} t={t}: oracle {} but construction {}", c.oracle, c.construction));
                    }
                    rows.push(json!(c));
                }
                Err(e) => v.push(format!("n={n} t={t}: {e}")),
            }
        }
    }
    (format!("{} cases with n<={max_n}, {} mismatches", rows.len(), v.len()), json!({"rows": rows}), v)
}

fn fw(max_n: usize, max_k: u64, params: &SuiteParams) -> Parts {
    let cfg = fw_config(params);
    let mut v = Vec::new();
    let mut rows = Vec::new();
    for n in 1..=max_n {
        for k in 1..n {
            if binomial(n as u64, k as u64) > BigUint::from(FW_MAX_VERTICES) {
                continue;
            }
            for t in 1..k {
                if k <= 2 * t || !fw_gcd_condition(k as u64, t as u64).is_ok_and(|c| c.holds) {
                    continue;
                }
                match verify_fw_bound(n, k, t, &cfg) {
                    Ok(c) => {
                        if !c.holds {
                            v.push(format!("n={n} k={k} t={t}: family of size above {}", c.bound));
                        }
                        rows.push(json!(c));
                    }
                    Err(e) => v.push(format!("n={n} k={k} t={t}: {e}")),
                }
            }
        }
    }
    let mut prime_pairs = 0;
    for k in 2..=max_k {
        for t in 1..k {
            if k <= 2 * t || !is_prime(k - t) {
                continue;
            }
            prime_pairs += 1;
            match fw_gcd_condition(k, t) {
                Ok(c) if c.holds => {}
                Ok(c) => v.push(format!("k={k} t={t}: k-t prime but gcd is {}", c.gcd)),
                Err(e) => v.push(format!("k={k} t={t}: {e}")),
            }
        }
    }
    let summary = format!(
        "{} oracle cases with n<={max_n} hold; {prime_pairs} prime pairs with k<={max_k} checked; {} violations",
        rows.len(),
        v.len()
    );
    (summary, json!({"oracle": rows, "prime_pairs": prime_pairs, "max_k": max_k}), v)
}

fn eventown_suite(max_n: usize, params: &SuiteParams) -> Parts {
    let cfg = search_config(params);
    let mut v = Vec::new();
    let mut rows = Vec::new();
    for n in (4..=max_n).step_by(2) {
        match max_family(n, &evens(n), true, &cfg) {
            Ok(r) => {
                let expected = 1usize << (n / 2);
                if !r.optimal || r.best_size != expected {
                    v.push(format!("n={n}: oracle {} (optimal {}) but 2^(n/2) = {expected}", r.best_size, r.optimal));
                }
                rows.push(json!({"n": n, "oracle": r.best_size, "expected": expected, "optimal": r.optimal, "nodes": r.nodes}));
            }
            Err(e) => v.push(format!("n={n}: {e}")),
        }
    }
    (format!("even n in 4..={max_n}: {} mismatches", v.len()), json!({"rows": rows}), v)
}

fn bhp(max_s: u64) -> Parts {
    let mut v = Vec::new();
    let gamma = Gamma::BHP;
    let report = match misint_bound(MISINT_N, MISINT_T, MISINT_EPS, gamma) {
        Ok(r) => r,
        Err(e) => return (format!("error: {e}"), Value::Null, vec![e.to_string()]),
    };
    if !report.all_primes_found() {
        v.push(format!("pipeline: no usable prime for k in {:?}", report.missing_primes));
    }
    let hi = MISINT_T + ceil_power(MISINT_N, gamma);
    for r in &report.rows {
        if let Some(tk) = r.t_k {
            if tk < MISINT_T || tk > hi {
                v.push(format!("pipeline: t_k = {tk} at k={} is outside [{MISINT_T}, {hi}]", r.k));
            }
        }
    }
    let expected = binomial(MISINT_N, (MISINT_N + MISINT_T) / 2) * MISINT_N;
    if report.total_bound != expected {
        v.push(format!("pipeline: total bound {} differs from n C(n, (n+t)/2) = {expected}", report.total_bound));
    }
    let outside: Vec<u64> = report.rows.iter().filter(|r| !r.in_bhp_interval).map(|r| r.k).collect();
    let sweep = bhp_sweep(10, max_s, gamma);
    for s in &sweep.failures {
        v.push(format!("sweep: (s - s^0.525, s) holds no prime at s={s}"));
    }
    let summary = format!(
        "pipeline n={MISINT_N} t={MISINT_T}: {} rows, missing primes {:?}, rows whose prime lies outside the short interval {:?}; sweep 10..={max_s}: failures {:?}, worst ratio {:.4} at s={}",
        report.rows.len(),
        report.missing_primes,
        outside,
        sweep.failures,
        sweep.worst_ratio,
        sweep.worst_s
    );
    (summary, json!({"pipeline": report_json(&report), "sweep": sweep}), v)
}

fn report_json(report: &specint::numbertheory::MisintReport) -> Value {
    serde_json::to_value(report).unwrap_or(Value::Null)
}

fn remark() -> Parts {
    let mut v = Vec::new();
    let log2 = match remark_log_size(REMARK_N, REMARK_D) {
        Ok(x) => x,
        Err(e) => return (format!("error: {e}"), Value::Null, vec![e.to_string()]),
    };
    let target = REMARK_FACTOR * REMARK_N as f64;
    if log2 < target {
        v.push(format!("log2(|A||B|) = {log2} is below {target}"));
    }
    let certified = match remark_pair(8, 2) {
        Ok((pair, m)) => {
            let ok = specint::is_intersecting_pair(&pair, &m);
            if let Err(x) = &ok {
                v.push(format!("n=8 d=2: {x:?}"));
            }
            json!({"n": 8, "d": 2, "m": m.to_string(), "a": pair.a().len(), "b": pair.b().len(), "run_length": length_l(&m), "certified": ok.is_ok()})
        }
        Err(e) => {
            v.push(format!("n=8 d=2: {e}"));
            Value::Null
        }
    };
    let summary = format!("n={REMARK_N} d={REMARK_D}: log2(|A||B|) = {log2:.3} vs {target:.1}; n=8 d=2 pair certified: {}", v.is_empty());
    (summary, json!({"log2_product": log2, "target": target, "materialized": certified}), v)
}
