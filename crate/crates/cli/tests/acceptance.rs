//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Two criteria fail for mathematical reasons and print FAIL. Their exact
//! failure pattern is pinned below, so this target errors only when an
//! outcome changes: a new failure, a different failure, or a known failure
//! that starts passing.

use std::process::ExitCode;
use std::time::Instant;

use specint::procedure::Variant;
use specint_cli::suites::{procedure_tally, run_suite, Suite, SuiteOutcome, SuiteParams, DEFAULT_SEED};

/// Values of `s` in `10..=10^6` whose interval `(s - s^0.525, s)` has no prime.
const BHP_GAPS: [u64; 4] = [11, 29, 126, 127];

type FailureCheck = fn(&SuiteOutcome) -> Result<(), String>;

struct Criterion {
    id: u32,
    suite: Suite,
    params: SuiteParams,
    /// `None` when the criterion must pass; otherwise a check on the pinned failure.
    known_failure: Option<FailureCheck>,
}

fn params(max_n: Option<usize>, samples: Option<usize>) -> SuiteParams {
    SuiteParams { max_n, samples, seed: DEFAULT_SEED, ..SuiteParams::default() }
}

/// The literal procedure only fails at stop states; the rest of the audit is clean.
fn procedure_failure(o: &SuiteOutcome) -> Result<(), String> {
    if o.violations.is_empty() {
        return Err("stop-state claim failures disappeared".into());
    }
    match o.violations.iter().find(|v| !v.contains("stop state:")) {
        Some(v) => Err(format!("unexpected violation kind: {v}")),
        None => Ok(()),
    }
}

/// Only the sweep fails, at exactly the pinned values of `s`.
fn bhp_failure(o: &SuiteOutcome) -> Result<(), String> {
    let expected: Vec<String> =
        BHP_GAPS.iter().map(|s| format!("sweep: (s - s^0.525, s) holds no prime at s={s}")).collect();
    if o.violations == expected {
        Ok(())
    } else {
        Err(format!("violations differ from the pinned sweep gaps: {:?}", o.violations))
    }
}

fn criteria() -> Vec<Criterion> {
    let c = |id, suite, params| Criterion { id, suite, params, known_failure: None };
    vec![
        c(1, Suite::Constants, params(None, None)),
        c(2, Suite::Axioms, params(Some(6), None)),
        c(3, Suite::P2, params(Some(8), None)),
        c(4, Suite::Sgall, params(Some(5), Some(1000))),
        Criterion {
            id: 5,
            suite: Suite::Procedure,
            params: params(Some(8), Some(50)),
            known_failure: Some(procedure_failure),
        },
        c(6, Suite::Katona, params(Some(7), None)),
        c(7, Suite::Fw, SuiteParams { max_k: Some(200), ..params(Some(10), None) }),
        c(8, Suite::Eventown, params(Some(6), None)),
        c(9, Suite::Remark, params(None, None)),
        Criterion {
            id: 10,
            suite: Suite::Bhp,
            params: SuiteParams { max_s: Some(1_000_000), ..params(None, None) },
            known_failure: Some(bhp_failure),
        },
    ]
}

fn main() -> ExitCode {
    let mut unexpected = Vec::new();
    let (mut pass, mut fail) = (0, 0);
    for c in criteria() {
        let start = Instant::now();
        let outcome = run_suite(c.suite, &c.params);
        let secs = start.elapsed().as_secs_f64();
        let verdict = if outcome.passed() { "PASS" } else { "FAIL" };
        if outcome.passed() {
            pass += 1;
        } else {
            fail += 1;
        }
        println!("criterion {:>2} {:<9} {verdict} ({secs:.2}s) {}", c.id, c.suite.name(), outcome.summary);
        match c.known_failure {
            None if !outcome.passed() => {
                for v in outcome.violations.iter().take(5) {
                    println!("    {v}");
                }
                unexpected.push(format!("criterion {} failed", c.id));
            }
            None => {}
            Some(check) => match check(&outcome) {
                Ok(()) => println!("    known failure, pattern matches the pinned expectation"),
                Err(e) => unexpected.push(format!("criterion {}: {e}", c.id)),
            },
        }
        if c.suite == Suite::Procedure {
            let (sym, v) = procedure_tally(8, 50, DEFAULT_SEED, Variant::Symmetric);
            println!(
                "    symmetric variant on the same sample: {} traces, {} clean, {} stop states",
                sym.traces, sym.clean, sym.stop_states
            );
            if !v.is_empty() || sym.clean != sym.traces {
                unexpected.push(format!("criterion 5: symmetric variant has violations: {:?}", &v[..v.len().min(3)]));
            }
        }
    }
    println!("acceptance: {pass} PASS, {fail} FAIL");
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        for u in &unexpected {
            println!("unexpected: {u}");
        }
        ExitCode::FAILURE
    }
}
