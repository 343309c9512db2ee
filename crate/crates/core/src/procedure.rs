//! Density-driven vertex deletion on M-intersecting pairs.
//!
//! Given a pair `(F, G)` whose cross intersections avoid a forbidden set `P`,
//! each step deletes one vertex `v` and replaces the pair by one of
//!
//! * `C1`: `(F1, G1)` with `P - 1`, if `p(F1) p(G1) > a p(F) p(G)`;
//! * `C2`: `(F0, G0 ∪ G1)` with `P`, if `p(G0 ∪ G1) p(F0) > a p(F) p(G)`;
//! * `C3`: `(F1, G0 ∩ G1)` with `(P - 1) ∪ P`, if `p(G0 ∩ G1) p(F1) > ε p(F) p(G)`;
//!
//! testing the cases in that order, with `ε = 2/10^4` and
//! `a = 6 - 2√5 - 7/1000`. Every comparison is decided exactly: densities are
//! dyadic rationals and `a` lies in `Q(√5)`. Tests against `√ε` are made on
//! squares.
//!
//! The three cases are not symmetric in `F` and `G`, and a stop state of the
//! literal procedure need not satisfy `p(F1) <= √ε p(F)` or `p(G1) <= √ε p(G)`
//! at every vertex. [`Variant::Symmetric`] also tries `C2` and `C3` with the
//! roles of `F` and `G` exchanged, which restores that property.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{binomial_le, BoundReport};
use crate::error::{Error, Result};
use crate::exact::{ceil_half_sqrt_times, ratio, Surd};
use crate::setcore::{
    density, is_intersecting_pair, length_l, restrict0, restrict1, DyadicRational, Family, FamilyPair,
    GroundSet, IntSet, SubsetMask,
};

/// The fixed constants of the procedure.
#[derive(Clone, Debug)]
pub struct Constants {
    pub eps: BigRational,
    pub a0: Surd,
    pub delta: BigRational,
    pub a: Surd,
}

impl Default for Constants {
    fn default() -> Self {
        let eps = ratio(2, 10_000);
        let a0 = Surd::new(ratio(6, 1), ratio(-2, 1));
        let delta = ratio(7, 1000);
        let a = &a0 - &Surd::from_rational(delta.clone());
        Constants { eps, a0, delta, a }
    }
}

/// `f(x) = 2 - x / (2 - √x)` for `0 <= x < 4`.
pub fn f_value(x: f64) -> Result<f64> {
    if !(0.0..4.0).contains(&x) {
        return Err(Error::InvalidParameter(format!("f is evaluated on [0, 4), got {x}")));
    }
    Ok(2.0 - x / (2.0 - x.sqrt()))
}

/// `4 log2(√ε m) / m + ½ √ε log2(2e / √ε)`.
pub fn sigma(m: f64, eps: f64) -> f64 {
    let r = eps.sqrt();
    4.0 * (r * m).log2() / m + 0.5 * r * (2.0 * std::f64::consts::E / r).log2()
}

/// Checks on the constants, each decided exactly where the quantity is
/// algebraic, with the float value alongside.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantsAudit {
    /// `√a0 = √5 - 1` and `a0 / (2 - √a0) = 2` hold exactly.
    pub f_a0_is_zero: bool,
    pub f_a0: f64,
    /// Certified: a rational upper bracket of `√a` gives a lower bound `L`
    /// on `f(a)` with `L > 0` and `L² > ε`.
    pub f_a_exceeds_sqrt_eps: bool,
    pub f_a: f64,
    pub sqrt_eps: f64,
    /// `2.630 < 4/a < 2.631`, exactly.
    pub four_over_a_in_range: bool,
    pub four_over_a: f64,
    /// `1 - log2 a > 0.38`, i.e. `a^50 < 2^31`, exactly.
    pub one_minus_log2_a_exceeds: bool,
    pub one_minus_log2_a: f64,
    /// Largest `σ(m)` over integer `1 <= m <= sigma_sweep_max`.
    pub sigma_max: f64,
    pub sigma_argmax: u64,
    pub sigma_sweep_max: u64,
    /// `(4 / (e ln 2)) √ε`, the continuous maximum of the first term.
    pub sigma_first_term_peak: f64,
}

impl ConstantsAudit {
    pub fn all_pass(&self) -> bool {
        self.f_a0_is_zero
            && self.f_a0.abs() < 1e-12
            && self.f_a_exceeds_sqrt_eps
            && self.four_over_a_in_range
            && self.one_minus_log2_a_exceeds
            && self.sigma_max < 0.1
    }
}

pub fn audit_constants(sigma_sweep_max: u64) -> ConstantsAudit {
    let c = Constants::default();
    let two = Surd::from_int(2);

    let root = Surd::new(ratio(-1, 1), ratio(1, 1));
    let f_a0_is_zero = root.signum() > 0
        && &root * &root == c.a0
        && c.a0.div(&(&two - &root)).is_some_and(|q| q == two);

    // lower bound for f(a) from an upper bracket on √a
    let hi = c.a.sqrt_ceil(64);
    let denom = &two - &Surd::from_rational(hi);
    let f_a_exceeds_sqrt_eps = denom.is_positive()
        && c.a.div(&denom).is_some_and(|q| {
            let lower = &two - &q;
            lower.is_positive() && (&lower * &lower - Surd::from_rational(c.eps.clone())).is_positive()
        });

    let four = Surd::from_int(4);
    let four_over_a = four.div(&c.a).expect("a is nonzero");
    let four_over_a_in_range = (&four_over_a - &Surd::from_rational(ratio(2630, 1000))).is_positive()
        && (Surd::from_rational(ratio(2631, 1000)) - four_over_a.clone()).is_positive();

    let one_minus_log2_a_exceeds = (Surd::from_rational(BigRational::from_integer((1i64 << 31).into()))
        - c.a.pow(50))
    .is_positive();

    let eps = 2e-4;
    let (mut sigma_max, mut sigma_argmax) = (f64::NEG_INFINITY, 0);
    for m in 1..=sigma_sweep_max {
        let s = sigma(m as f64, eps);
        if s > sigma_max {
            sigma_max = s;
            sigma_argmax = m;
        }
    }

    let a = c.a.to_f64();
    ConstantsAudit {
        f_a0_is_zero,
        f_a0: f_value(c.a0.to_f64()).unwrap(),
        f_a_exceeds_sqrt_eps,
        f_a: f_value(a).unwrap(),
        sqrt_eps: eps.sqrt(),
        four_over_a_in_range,
        four_over_a: 4.0 / a,
        one_minus_log2_a_exceeds,
        one_minus_log2_a: 1.0 - a.log2(),
        sigma_max,
        sigma_argmax,
        sigma_sweep_max,
        sigma_first_term_peak: 4.0 / (std::f64::consts::E * std::f64::consts::LN_2) * eps.sqrt(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepCase {
    C1,
    C2,
    C3,
    /// `(F0 ∪ F1, G0)` with `P`.
    C2Swapped,
    /// `(F0 ∩ F1, G1)` with `(P - 1) ∪ P`.
    C3Swapped,
}

impl StepCase {
    /// Cases that widen the forbidden set to `(P - 1) ∪ P`.
    pub fn is_narrowing(self) -> bool {
        matches!(self, StepCase::C3 | StepCase::C3Swapped)
    }
}

impl fmt::Display for StepCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StepCase::C1 => "C1",
            StepCase::C2 => "C2",
            StepCase::C3 => "C3",
            StepCase::C2Swapped => "C2'",
            StepCase::C3Swapped => "C3'",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Strategy {
    /// Lowest vertex whose first satisfied case fires.
    #[default]
    FirstMatch,
    /// Vertex maximising the density product of the new pair; ties to the lowest vertex.
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// The three cases exactly as stated.
    #[default]
    Literal,
    /// After `C3`, also `C2` and `C3` with `F` and `G` exchanged.
    Symmetric,
}

/// The derived families for one vertex.
#[derive(Clone, Debug)]
pub struct Split {
    pub f1: Family,
    pub f0: Family,
    pub g1: Family,
    pub g0: Family,
    pub g_union: Family,
    pub g_inter: Family,
    pub f_union: Family,
    pub f_inter: Family,
}

impl Split {
    pub fn new(f: &Family, g: &Family, v: usize) -> Result<Split> {
        let f1 = restrict1(f, v)?;
        let f0 = restrict0(f, v)?;
        let g1 = restrict1(g, v)?;
        let g0 = restrict0(g, v)?;
        let g_union = g0.union(&g1)?;
        let g_inter = g0.intersection(&g1)?;
        let f_union = f0.union(&f1)?;
        let f_inter = f0.intersection(&f1)?;
        Ok(Split { f1, f0, g1, g0, g_union, g_inter, f_union, f_inter })
    }

    /// The pair a case moves to.
    pub fn successor(&self, case: StepCase) -> (Family, Family) {
        match case {
            StepCase::C1 => (self.f1.clone(), self.g1.clone()),
            StepCase::C2 => (self.f0.clone(), self.g_union.clone()),
            StepCase::C3 => (self.f1.clone(), self.g_inter.clone()),
            StepCase::C2Swapped => (self.f_union.clone(), self.g0.clone()),
            StepCase::C3Swapped => (self.f_inter.clone(), self.g1.clone()),
        }
    }
}

/// Outcome of the three exact tests for one vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub vertex: usize,
    pub case: Option<StepCase>,
    pub c1_holds: bool,
    pub c2_holds: bool,
    pub c3_holds: bool,
    /// Only evaluated under [`Variant::Symmetric`].
    pub c2_swapped_holds: bool,
    pub c3_swapped_holds: bool,
    /// Member counts `|F|, |G|, |F1|, |F0|, |G1|, |G0|, |G0 ∪ G1|, |G0 ∩ G1|`.
    pub counts: [usize; 8],
}

fn big(x: usize) -> BigUint {
    BigUint::from(x)
}

/// `lhs > a · rhs`, exactly.
fn exceeds_a(c: &Constants, lhs: &BigUint, rhs: &BigUint) -> bool {
    (Surd::from_biguint(lhs) - c.a.scale(&BigRational::from_integer(rhs.clone().into()))).is_positive()
}

fn exceeds_eps(c: &Constants, lhs: &BigUint, rhs: &BigUint) -> bool {
    let l = BigRational::from_integer(lhs.clone().into());
    let r = BigRational::from_integer(rhs.clone().into());
    l > &c.eps * r
}

fn classify_split(c: &Constants, f: &Family, g: &Family, split: &Split, v: usize, variant: Variant) -> Classification {
    // densities on V \ {v} carry one fewer factor of 2, hence the 4
    let base = big(f.len()) * big(g.len());
    let four = |x: &Family, y: &Family| big(4) * big(x.len()) * big(y.len());
    let c1 = exceeds_a(c, &four(&split.f1, &split.g1), &base);
    let c2 = exceeds_a(c, &four(&split.g_union, &split.f0), &base);
    let c3 = exceeds_eps(c, &four(&split.g_inter, &split.f1), &base);
    let symmetric = variant == Variant::Symmetric;
    let c2s = symmetric && exceeds_a(c, &four(&split.f_union, &split.g0), &base);
    let c3s = symmetric && exceeds_eps(c, &four(&split.f_inter, &split.g1), &base);
    let case = [
        (c1, StepCase::C1),
        (c2, StepCase::C2),
        (c3, StepCase::C3),
        (c2s, StepCase::C2Swapped),
        (c3s, StepCase::C3Swapped),
    ]
    .into_iter()
    .find_map(|(holds, case)| holds.then_some(case));
    Classification {
        vertex: v,
        case,
        c1_holds: c1,
        c2_holds: c2,
        c3_holds: c3,
        c2_swapped_holds: c2s,
        c3_swapped_holds: c3s,
        counts: [
            f.len(),
            g.len(),
            split.f1.len(),
            split.f0.len(),
            split.g1.len(),
            split.g0.len(),
            split.g_union.len(),
            split.g_inter.len(),
        ],
    }
}

/// The forbidden set after a step of the given case.
pub fn next_forbidden(p: &IntSet, case: StepCase) -> IntSet {
    match case {
        StepCase::C1 => p.shift(1),
        StepCase::C2 | StepCase::C2Swapped => p.clone(),
        StepCase::C3 | StepCase::C3Swapped => p.shift(1).union(p).expect("same bound"),
    }
}

/// Classifies vertex `v` for the pair `(f, g)`; the first case whose strict
/// inequality holds wins.
pub fn classify_step(f: &Family, g: &Family, v: usize) -> Result<Classification> {
    classify_step_with(f, g, v, Variant::Literal)
}

pub fn classify_step_with(f: &Family, g: &Family, v: usize, variant: Variant) -> Result<Classification> {
    if f.is_empty() || g.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let split = Split::new(f, g, v)?;
    Ok(classify_split(&Constants::default(), f, g, &split, v, variant))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: usize,
    /// Index in the current (re-indexed) ground set.
    pub vertex: usize,
    /// Label of the same element in the original ground set.
    pub original_vertex: usize,
    pub case: StepCase,
    pub p_before: IntSet,
    pub p_after: IntSet,
    pub pf: DyadicRational,
    pub pg: DyadicRational,
    pub pf_next: DyadicRational,
    pub pg_next: DyadicRational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// No remaining vertex satisfies any case.
    NoCaseApplies,
    /// Every vertex was deleted.
    GroundExhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoppedStateReport {
    /// Current indices of `W_F = { v : p(F1(v)) < √ε p(F) }`.
    pub w_f: Vec<usize>,
    pub w_g: Vec<usize>,
    pub x: usize,
    pub y: usize,
    /// `⌈½ √ε x⌉`
    pub s: u64,
    /// `⌈½ √ε y⌉`
    pub t: u64,
    pub sigma: f64,
    /// Every vertex satisfies `p(F1) <= √ε p(F)` or `p(G1) <= √ε p(G)`.
    pub claim_ok: bool,
    /// `Σ_{S ∈ F} |S ∩ W_F| < ½ √ε x |F|` and the same for `G`, `W_G`.
    pub edge_count_ok: bool,
    /// `|F| <= (s+1) C(x, <=s) 2^(m-x)` and the same for `G`.
    pub counting_claim_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcedureTrace {
    pub n: usize,
    pub m: IntSet,
    pub strategy: Strategy,
    #[serde(default)]
    pub variant: Variant,
    pub initial_a: Family,
    pub initial_b: Family,
    pub steps: Vec<StepRecord>,
    pub stop_reason: StopReason,
    pub stop_state: Option<StoppedStateReport>,
}

impl ProcedureTrace {
    pub fn c3_count(&self) -> usize {
        self.steps.iter().filter(|s| s.case.is_narrowing()).count()
    }

    pub fn case_sequence(&self) -> String {
        self.steps.iter().map(|s| s.case.to_string()).collect::<Vec<_>>().join(" ")
    }
}

fn choose(
    c: &Constants,
    f: &Family,
    g: &Family,
    strategy: Strategy,
    variant: Variant,
) -> Result<Option<(usize, StepCase, Split)>> {
    let mut best: Option<(usize, StepCase, Split, DyadicRational)> = None;
    for v in 0..f.n() {
        let split = Split::new(f, g, v)?;
        let Some(case) = classify_split(c, f, g, &split, v, variant).case else {
            continue;
        };
        match strategy {
            Strategy::FirstMatch => return Ok(Some((v, case, split))),
            Strategy::Greedy => {
                let (nf, ng) = split.successor(case);
                let gain = density(&nf).mul(&density(&ng));
                if best.as_ref().is_none_or(|b| gain > b.3) {
                    best = Some((v, case, split, gain));
                }
            }
        }
    }
    Ok(best.map(|(v, case, split, _)| (v, case, split)))
}

/// Runs the procedure on an M-intersecting pair until no vertex qualifies or
/// the ground set is exhausted.
pub fn run_procedure(pair: &FamilyPair, m: &IntSet, strategy: Strategy) -> Result<ProcedureTrace> {
    run_procedure_with(pair, m, strategy, Variant::Literal)
}

pub fn run_procedure_with(
    pair: &FamilyPair,
    m: &IntSet,
    strategy: Strategy,
    variant: Variant,
) -> Result<ProcedureTrace> {
    let n = pair.ground().size();
    if m.bound() != n {
        return Err(Error::IntSetBoundMismatch { expected: n, got: m.bound() });
    }
    if pair.a().is_empty() || pair.b().is_empty() {
        return Err(Error::EmptyFamily);
    }
    is_intersecting_pair(pair, m)?;
    let c = Constants::default();
    let mut f = pair.a().clone();
    let mut g = pair.b().clone();
    let mut p = m.complement();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut steps = Vec::new();
    let stop_reason = loop {
        if f.n() == 0 {
            break StopReason::GroundExhausted;
        }
        let Some((v, case, split)) = choose(&c, &f, &g, strategy, variant)? else {
            break StopReason::NoCaseApplies;
        };
        let (nf, ng) = split.successor(case);
        let p_after = next_forbidden(&p, case);
        steps.push(StepRecord {
            index: steps.len(),
            vertex: v,
            original_vertex: labels[v],
            case,
            p_before: p.clone(),
            p_after: p_after.clone(),
            pf: density(&f),
            pg: density(&g),
            pf_next: density(&nf),
            pg_next: density(&ng),
        });
        labels.remove(v);
        f = nf;
        g = ng;
        p = p_after;
    };
    let stop_state = match stop_reason {
        StopReason::NoCaseApplies => Some(stopped_state_analysis_with(&f, &g, variant)?),
        StopReason::GroundExhausted => None,
    };
    Ok(ProcedureTrace {
        n,
        m: m.clone(),
        strategy,
        variant,
        initial_a: pair.a().clone(),
        initial_b: pair.b().clone(),
        steps,
        stop_reason,
        stop_state,
    })
}

/// `4 · count² <= ε · total²`, i.e. `p(H1) <= √ε p(H)` on a ground set one larger.
fn below_sqrt_eps(c: &Constants, count: usize, total: usize, strict: bool) -> bool {
    let lhs = BigRational::from_integer((big(4) * big(count) * big(count)).into());
    let rhs = &c.eps * BigRational::from_integer((big(total) * big(total)).into());
    if strict {
        lhs < rhs
    } else {
        lhs <= rhs
    }
}

fn edge_count_ok(c: &Constants, family: &Family, w: u64, x: usize) -> bool {
    if x == 0 {
        return true;
    }
    let sum: usize = family.members().iter().map(|s| (s.bits() & w).count_ones() as usize).sum();
    // 2 Σ < √ε x |F|  ⟺  4 Σ² < ε x² |F|²
    let lhs = BigRational::from_integer((big(4) * big(sum) * big(sum)).into());
    let rhs = &c.eps * BigRational::from_integer((big(x) * big(x) * big(family.len()) * big(family.len())).into());
    lhs < rhs
}

fn counting_ok(family: &Family, x: usize, s: u64) -> bool {
    let m = family.n();
    let bound = big(s as usize + 1) * binomial_le(x as u64, s) * (BigUint::one() << (m - x));
    big(family.len()) <= bound
}

/// Analyses a pair on which no vertex admits a step.
pub fn stopped_state_analysis(f: &Family, g: &Family) -> Result<StoppedStateReport> {
    stopped_state_analysis_with(f, g, Variant::Literal)
}

pub fn stopped_state_analysis_with(f: &Family, g: &Family, variant: Variant) -> Result<StoppedStateReport> {
    if f.is_empty() || g.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let c = Constants::default();
    let m = f.n();
    let mut w_f = Vec::new();
    let mut w_g = Vec::new();
    let mut claim_ok = true;
    for v in 0..m {
        let split = Split::new(f, g, v)?;
        if classify_split(&c, f, g, &split, v, variant).case.is_some() {
            return Err(Error::NotStopState(v));
        }
        if below_sqrt_eps(&c, split.f1.len(), f.len(), true) {
            w_f.push(v);
        } else {
            w_g.push(v);
        }
        claim_ok &= below_sqrt_eps(&c, split.f1.len(), f.len(), false)
            || below_sqrt_eps(&c, split.g1.len(), g.len(), false);
    }
    let mask = |w: &[usize]| w.iter().fold(0u64, |acc, &v| acc | 1 << v);
    let (x, y) = (w_f.len(), w_g.len());
    let s = ceil_half_sqrt_times(&c.eps, x as u64);
    let t = ceil_half_sqrt_times(&c.eps, y as u64);
    let edge_ok = edge_count_ok(&c, f, mask(&w_f), x) && edge_count_ok(&c, g, mask(&w_g), y);
    let counting_claim_ok = counting_ok(f, x, s) && counting_ok(g, y, t);
    let sigma = if m == 0 { f64::NAN } else { sigma(m as f64, 2e-4) };
    Ok(StoppedStateReport {
        w_f,
        w_g,
        x,
        y,
        s,
        t,
        sigma,
        claim_ok,
        edge_count_ok: edge_ok,
        counting_claim_ok,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TraceAudit {
    pub violations: Vec<String>,
    pub steps_checked: usize,
    pub c3_count: usize,
    pub run_length: usize,
}

impl TraceAudit {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `p(F) p(G) > a^(i-j) ε^j p(A) p(B)`, exactly.
fn chain_holds(c: &Constants, product: &DyadicRational, initial: &DyadicRational, i: usize, j: usize) -> bool {
    let rhs = c
        .a
        .pow((i - j) as u32)
        .scale(&num_traits::pow(c.eps.clone(), j))
        .scale(&initial.to_rational());
    (Surd::from_rational(product.to_rational()) - rhs).is_positive()
}

/// Replays a trace from its initial pair and re-derives every recorded fact.
pub fn verify_trace(trace: &ProcedureTrace) -> TraceAudit {
    let mut audit = TraceAudit::default();
    let mut bad = |msg: String| audit.violations.push(msg);
    let c = Constants::default();
    let m = &trace.m;
    let l = length_l(m);

    let pair = match FamilyPair::new(trace.initial_a.clone(), trace.initial_b.clone()) {
        Ok(p) => p,
        Err(e) => {
            bad(format!("initial pair: {e}"));
            return audit;
        }
    };
    if let Err(v) = is_intersecting_pair(&pair, m) {
        bad(format!("initial pair is not M-intersecting: {v:?}"));
    }
    let mut f = trace.initial_a.clone();
    let mut g = trace.initial_b.clone();
    let mut p = m.complement();
    let mut labels: Vec<usize> = (0..f.n()).collect();
    let initial = density(&f).mul(&density(&g));
    let mut j = 0;

    for (i, step) in trace.steps.iter().enumerate() {
        let tag = format!("step {i}");
        if step.index != i {
            bad(format!("{tag}: recorded index {}", step.index));
        }
        if step.vertex >= f.n() {
            bad(format!("{tag}: vertex {} outside ground set of size {}", step.vertex, f.n()));
            break;
        }
        if labels[step.vertex] != step.original_vertex {
            bad(format!("{tag}: original label {} should be {}", step.original_vertex, labels[step.vertex]));
        }
        if step.p_before != p {
            bad(format!("{tag}: P before is {} but replay has {}", step.p_before, p));
        }
        let split = match Split::new(&f, &g, step.vertex) {
            Ok(s) => s,
            Err(e) => {
                bad(format!("{tag}: {e}"));
                break;
            }
        };
        let cls = classify_split(&c, &f, &g, &split, step.vertex, trace.variant);
        if cls.case != Some(step.case) {
            bad(format!("{tag}: recorded case {} but exact tests give {:?}", step.case, cls.case));
        }
        if trace.strategy == Strategy::FirstMatch {
            for u in 0..step.vertex {
                if let Ok(cu) = classify_step_with(&f, &g, u, trace.variant) {
                    if cu.case.is_some() {
                        bad(format!("{tag}: earlier vertex {u} already qualifies for first-match"));
                        break;
                    }
                }
            }
        }
        let (nf, ng) = split.successor(step.case);
        let p_after = next_forbidden(&p, step.case);
        if step.p_after != p_after {
            bad(format!("{tag}: P after is {} but replay has {}", step.p_after, p_after));
        }
        if step.pf != density(&f) || step.pg != density(&g) {
            bad(format!("{tag}: recorded densities differ from replay"));
        }
        if step.pf_next != density(&nf) || step.pg_next != density(&ng) {
            bad(format!("{tag}: recorded successor densities differ from replay"));
        }
        for &x in nf.members() {
            if let Some(&y) = ng.members().iter().find(|&&y| p_after.contains(x.intersection_size(y))) {
                bad(format!("{tag}: successor pair hits forbidden size via {x:?}, {y:?}"));
                break;
            }
        }
        if step.case.is_narrowing() {
            j += 1;
        }
        let product = density(&nf).mul(&density(&ng));
        if !chain_holds(&c, &product, &initial, i + 1, j) {
            bad(format!("{tag}: chain inequality fails with (i-j, j) = ({}, {j})", i + 1 - j));
        }
        labels.remove(step.vertex);
        f = nf;
        g = ng;
        p = p_after;
        audit.steps_checked += 1;
    }

    audit.c3_count = j;
    audit.run_length = l;
    if j > l {
        bad(format!("{j} C3 steps exceed the longest run l(M) = {l}"));
    }

    match trace.stop_reason {
        StopReason::GroundExhausted => {
            if f.n() != 0 {
                bad(format!("stopped as exhausted with {} vertices left", f.n()));
            }
        }
        StopReason::NoCaseApplies => {
            for v in 0..f.n() {
                let split = match Split::new(&f, &g, v) {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                if let Some(case) = classify_split(&c, &f, &g, &split, v, trace.variant).case {
                    bad(format!("stop state: vertex {v} still admits {case}"));
                }
                let a_ok = below_sqrt_eps(&c, split.f1.len(), f.len(), false);
                let b_ok = below_sqrt_eps(&c, split.g1.len(), g.len(), false);
                if !a_ok && !b_ok {
                    bad(format!("stop state: claim fails at vertex {v} (both densities above √ε p)"));
                }
            }
            match stopped_state_analysis_with(&f, &g, trace.variant) {
                Ok(report) => {
                    if trace.stop_state.as_ref() != Some(&report) {
                        bad("stop-state report differs from recomputation".into());
                    }
                    if !report.edge_count_ok {
                        bad("stop state: edge-count inequality fails".into());
                    }
                    if !report.counting_claim_ok {
                        bad("stop state: counting claim fails".into());
                    }
                }
                Err(e) => bad(format!("stop state: {e}")),
            }
        }
    }
    audit
}

/// Both pair-product bounds, in log2 space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundPair {
    pub first: BoundReport,
    pub second: BoundReport,
    pub min_log2: f64,
}

fn pair_of(first: BoundReport, second: BoundReport) -> BoundPair {
    let min_log2 = first.log2.min(second.log2);
    BoundPair { first, second, min_log2 }
}

/// `|A||B| < min{ 2.631^n 10^(4l+10), 2^(n + 2l log2² n) }`.
pub fn theorem2_bounds(n: u64, l: u64) -> BoundPair {
    let nf = n as f64;
    let lg = nf.log2();
    pair_of(
        BoundReport::log_only(
            "2.631^n * 10^(4l+10)",
            "pair bound via decomposition",
            nf * 2.631f64.log2() + (4 * l + 10) as f64 * 10f64.log2(),
        ),
        BoundReport::log_only("2^(n + 2l log2^2 n)", "pair bound via height", nf + 2.0 * l as f64 * lg * lg),
    )
}

/// `|A| < min{ 1.622^n 10^(2l+5), 2^(n/2 + l log2² n) }` for a single family.
pub fn corollary3_bounds(n: u64, l: u64) -> BoundPair {
    let nf = n as f64;
    let lg = nf.log2();
    pair_of(
        BoundReport::log_only(
            "1.622^n * 10^(2l+5)",
            "family bound via decomposition",
            nf * 1.622f64.log2() + (2 * l + 5) as f64 * 10f64.log2(),
        ),
        BoundReport::log_only("2^(n/2 + l log2^2 n)", "family bound via height", nf / 2.0 + l as f64 * lg * lg),
    )
}

/// Smallest `n0` such that for all `n0 <= n <= max_n`, with `l = ⌈0.15 n⌉`,
/// both pair bounds exceed `4^n`.
pub fn triviality_threshold(max_n: u64) -> Option<u64> {
    let mut threshold = None;
    for n in (1..=max_n).rev() {
        let l = (15 * n).div_ceil(100);
        let b = theorem2_bounds(n, l);
        if b.first.log2 > 2.0 * n as f64 && b.second.log2 > 2.0 * n as f64 {
            threshold = Some(n);
        } else {
            break;
        }
    }
    threshold
}

/// Smallest `l` for which the first pair bound is below the second.
pub fn crossover_l(n: u64) -> Option<u64> {
    (0..=n).find(|&l| {
        let b = theorem2_bounds(n, l);
        b.first.log2 < b.second.log2
    })
}

/// A random M-intersecting pair on `n <= 10` points with both families
/// nonempty. `M` always contains `0` so that the empty set is a valid fallback.
pub fn random_intersecting_pair<R: Rng>(n: usize, rng: &mut R) -> Result<(FamilyPair, IntSet)> {
    if n > 10 {
        return Err(Error::LimitExceeded { size: n, limit: 10 });
    }
    let ground = GroundSet::new(n)?;
    let all: Vec<SubsetMask> = (0..1u64 << n).map(SubsetMask).collect();
    loop {
        let mut m = IntSet::empty(n);
        for x in 0..=n {
            if rng.gen_bool(0.6) {
                m.insert(x)?;
            }
        }
        m.insert(0)?;
        let a_size = rng.gen_range(1..=(1usize << n).min(12));
        let a: Vec<SubsetMask> = all.choose_multiple(rng, a_size).copied().collect();
        let compatible: Vec<SubsetMask> = all
            .iter()
            .copied()
            .filter(|&b| a.iter().all(|&x| m.contains(x.intersection_size(b))))
            .collect();
        if compatible.is_empty() {
            continue;
        }
        let b_size = rng.gen_range(1..=compatible.len());
        let b: Vec<SubsetMask> = compatible.choose_multiple(rng, b_size).copied().collect();
        let pair = FamilyPair::new(Family::new(ground, a)?, Family::new(ground, b)?)?;
        return Ok((pair, m));
    }
}
