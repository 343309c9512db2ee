//! Exact extremal search. M-intersecting families are the cliques of the
//! compatibility graph on subsets, searched by branch and bound with greedy
//! colouring bounds over bitsets. Cross-intersecting pairs are bicliques of
//! the same relation and are enumerated as closed pairs at small `n`.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::binomial;
use crate::constructions::{above, avoid_one, frankl_family, katona_family};
use crate::error::{Error, Result};
use crate::numbertheory::fw_gcd_condition;
use crate::setcore::{Family, FamilyPair, GroundSet, IntSet, SubsetMask};

/// Default cap on graph vertices.
pub const VERTEX_BUDGET: usize = 1 << 16;

/// Time allowed for the exact maximum in [`verify_fw_bound`] when the config sets none.
pub const FW_EXACT_BUDGET: Duration = Duration::from_secs(2);

type Bits = Vec<u64>;

fn words(len: usize) -> usize {
    len.div_ceil(64)
}

fn set_bit(b: &mut [u64], i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn clear_bit(b: &mut [u64], i: usize) {
    b[i / 64] &= !(1 << (i % 64));
}

fn has_bit(b: &[u64], i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

fn count(b: &[u64]) -> usize {
    b.iter().map(|w| w.count_ones() as usize).sum()
}

fn first_bit(b: &[u64]) -> Option<usize> {
    b.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn and(a: &[u64], b: &[u64]) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

/// Subsets as vertices, adjacent when their intersection size is allowed.
#[derive(Clone, Debug)]
pub struct CompatGraph {
    n: usize,
    m: IntSet,
    include_diagonal: bool,
    vertices: Vec<SubsetMask>,
    adj: Vec<Bits>,
}

impl CompatGraph {
    /// All subsets of `{0..n-1}`, restricted to sizes in `M` when the diagonal is required.
    pub fn build(n: usize, m: &IntSet, include_diagonal: bool) -> Result<Self> {
        Self::build_with_budget(n, m, include_diagonal, VERTEX_BUDGET)
    }

    pub fn build_with_budget(n: usize, m: &IntSet, include_diagonal: bool, budget: usize) -> Result<Self> {
        if n > 16 || 1usize << n > budget {
            return Err(Error::BudgetExceeded { vertices: 1usize.checked_shl(n as u32).unwrap_or(usize::MAX), budget });
        }
        let vertices = (0..1u64 << n)
            .map(SubsetMask)
            .filter(|s| !include_diagonal || m.contains(s.len()))
            .collect();
        Self::from_vertices(n, m, include_diagonal, vertices)
    }

    /// `k`-subsets only.
    pub fn build_uniform(n: usize, k: usize, m: &IntSet) -> Result<Self> {
        if n > 16 {
            return Err(Error::BudgetExceeded { vertices: usize::MAX, budget: VERTEX_BUDGET });
        }
        let vertices = (0..1u64 << n).map(SubsetMask).filter(|s| s.len() == k).collect();
        Self::from_vertices(n, m, true, vertices)
    }

    /// Uses the given vertices in the given order.
    pub fn from_vertices(n: usize, m: &IntSet, include_diagonal: bool, vertices: Vec<SubsetMask>) -> Result<Self> {
        if m.bound() != n {
            return Err(Error::IntSetBoundMismatch { expected: n, got: m.bound() });
        }
        if vertices.len() > VERTEX_BUDGET {
            return Err(Error::BudgetExceeded { vertices: vertices.len(), budget: VERTEX_BUDGET });
        }
        let ground = GroundSet::new(n)?;
        if let Some(bad) = vertices.iter().find(|v| !ground.contains_mask(**v)) {
            return Err(Error::ElementOutOfRange { element: 63 - bad.0.leading_zeros() as usize, n });
        }
        let w = words(vertices.len());
        let adj = vertices
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let mut row = vec![0u64; w];
                for (j, &b) in vertices.iter().enumerate() {
                    if i != j && m.contains(a.intersection_size(b)) {
                        set_bit(&mut row, j);
                    }
                }
                row
            })
            .collect();
        Ok(CompatGraph { n, m: m.clone(), include_diagonal, vertices, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> &IntSet {
        &self.m
    }

    pub fn include_diagonal(&self) -> bool {
        self.include_diagonal
    }

    pub fn vertices(&self) -> &[SubsetMask] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        has_bit(&self.adj[i], j)
    }

    pub fn degree(&self, i: usize) -> usize {
        count(&self.adj[i])
    }

    pub fn edge_count(&self) -> usize {
        (0..self.len()).map(|i| self.degree(i)).sum::<usize>() / 2
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub time_limit: Option<Duration>,
    /// Worker threads; `1` runs serially, `0` uses the rayon default.
    pub threads: usize,
    /// Split on the smallest member size and fix a representative of that size.
    pub orbit_pruning: bool,
    /// Search only for families larger than this. Completing without finding
    /// one proves that the maximum is at most this value.
    pub bound_hint: Option<usize>,
    pub seed: u64,
    /// Restarts of the pair heuristic.
    pub restarts: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { time_limit: None, threads: 0, orbit_pruning: false, bound_hint: None, seed: 0, restarts: 64 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub best_size: usize,
    pub witness: Family,
    /// The search finished and `best_size` is the maximum.
    pub optimal: bool,
    /// Proven upper bound on the maximum, when the search finished.
    pub upper_bound: Option<usize>,
    pub nodes: u64,
    pub wall_time: Duration,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairSearchResult {
    /// `|A| · |B|`
    pub best_product: u64,
    pub witness: FamilyPair,
    pub optimal: bool,
    pub nodes: u64,
    pub wall_time: Duration,
}

struct Solver<'a> {
    adj: &'a [Bits],
    w: usize,
    best: AtomicUsize,
    best_clique: Mutex<Vec<usize>>,
    deadline: Option<Instant>,
    timed_out: AtomicBool,
    nodes: AtomicU64,
}

impl Solver<'_> {
    fn out_of_time(&self) -> bool {
        if self.timed_out.load(Ordering::Relaxed) {
            return true;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed);
        if n.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out.store(true, Ordering::Relaxed);
        }
        self.timed_out.load(Ordering::Relaxed)
    }

    /// Greedy sequential colouring of `p`; returns vertices in colour order with their colours.
    fn colour(&self, p: &[u64]) -> (Vec<usize>, Vec<usize>) {
        let mut uncoloured = p.to_vec();
        let mut order = Vec::with_capacity(count(p));
        let mut colours = Vec::with_capacity(order.capacity());
        let mut k = 0;
        while first_bit(&uncoloured).is_some() {
            k += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = first_bit(&q) {
                clear_bit(&mut q, v);
                clear_bit(&mut uncoloured, v);
                for (qw, aw) in q.iter_mut().zip(&self.adj[v]) {
                    *qw &= !aw;
                }
                order.push(v);
                colours.push(k);
            }
        }
        (order, colours)
    }

    fn record(&self, clique: &[usize]) {
        if clique.len() > self.best.load(Ordering::Relaxed) {
            let mut guard = self.best_clique.lock().unwrap();
            if clique.len() > self.best.load(Ordering::Relaxed) {
                self.best.store(clique.len(), Ordering::Relaxed);
                *guard = clique.to_vec();
            }
        }
    }

    fn expand(&self, clique: &mut Vec<usize>, mut p: Bits) {
        if self.out_of_time() {
            return;
        }
        let (order, colours) = self.colour(&p);
        for idx in (0..order.len()).rev() {
            if clique.len() + colours[idx] <= self.best.load(Ordering::Relaxed) {
                return;
            }
            let v = order[idx];
            clique.push(v);
            let next = and(&p, &self.adj[v]);
            if first_bit(&next).is_none() {
                self.record(clique);
            } else {
                self.expand(clique, next);
            }
            clique.pop();
            clear_bit(&mut p, v);
        }
    }

    /// Root branching, fanned out over the pool when `parallel` is set.
    fn root(&self, prefix: &[usize], p: Bits, parallel: bool) {
        if first_bit(&p).is_none() {
            self.record(prefix);
            return;
        }
        let (order, colours) = self.colour(&p);
        let branch = |idx: usize| {
            if prefix.len() + colours[idx] <= self.best.load(Ordering::Relaxed) {
                return;
            }
            let v = order[idx];
            // candidates that come earlier in the colour order
            let mut allowed = vec![0u64; self.w];
            for &u in &order[..idx] {
                set_bit(&mut allowed, u);
            }
            let next = and(&allowed, &self.adj[v]);
            let mut clique = prefix.to_vec();
            clique.push(v);
            if first_bit(&next).is_none() {
                self.record(&clique);
            } else {
                self.expand(&mut clique, next);
            }
        };
        if parallel {
            (0..order.len()).into_par_iter().rev().for_each(branch);
        } else {
            (0..order.len()).rev().for_each(branch);
        }
    }
}

/// Order that puts the densest core first: reverse of repeated minimum-degree removal.
fn degeneracy_order(g: &CompatGraph) -> Vec<usize> {
    let n = g.len();
    let mut deg: Vec<usize> = (0..n).map(|i| g.degree(i)).collect();
    let mut removed = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n).filter(|&v| !removed[v]).min_by_key(|&v| (deg[v], v)).unwrap();
        removed[v] = true;
        out.push(v);
        for u in 0..n {
            if !removed[u] && g.adjacent(v, u) {
                deg[u] -= 1;
            }
        }
    }
    out.reverse();
    out
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

/// Maximum clique of the compatibility graph, i.e. the largest M-intersecting family.
pub fn max_clique(g: &CompatGraph, config: &SearchConfig) -> Result<SearchResult> {
    let start = Instant::now();
    let order = degeneracy_order(g);
    // renumber so that bit i is order[i]
    let w = words(g.len());
    let mut position = vec![0; g.len()];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let adj: Vec<Bits> = order
        .iter()
        .map(|&v| {
            let mut row = vec![0u64; w];
            for (j, &u) in order.iter().enumerate() {
                if g.adjacent(v, u) {
                    set_bit(&mut row, j);
                }
            }
            row
        })
        .collect();
    let hint = config.bound_hint.unwrap_or(0);
    let solver = Solver {
        adj: &adj,
        w,
        best: AtomicUsize::new(hint),
        best_clique: Mutex::new(Vec::new()),
        deadline: config.time_limit.map(|d| start + d),
        timed_out: AtomicBool::new(false),
        nodes: AtomicU64::new(0),
    };
    let parallel = config.threads != 1;
    let run = || {
        if config.orbit_pruning {
            // case s: the smallest member has size s and, up to relabelling, is {0..s-1}
            let mut sizes: Vec<usize> = g.vertices.iter().map(|v| v.len()).collect();
            sizes.sort_unstable();
            sizes.dedup();
            for &s in &sizes {
                let rep = SubsetMask((1u64 << s) - 1);
                let Some(r) = g.vertices.iter().position(|&v| v == rep) else {
                    continue;
                };
                let r = position[r];
                let mut p = adj[r].clone();
                for (i, &v) in order.iter().enumerate() {
                    if g.vertices[v].len() < s {
                        clear_bit(&mut p, i);
                    }
                }
                solver.root(&[r], p, parallel);
            }
        } else {
            let mut p = vec![0u64; w];
            for i in 0..g.len() {
                set_bit(&mut p, i);
            }
            solver.root(&[], p, parallel);
        }
    };
    if parallel {
        pool(config.threads)?.install(run);
    } else {
        run();
    }
    let clique = solver.best_clique.into_inner().unwrap();
    let witness = Family::new(GroundSet::new(g.n)?, clique.iter().map(|&i| g.vertices[order[i]]))?;
    let completed = !solver.timed_out.load(Ordering::Relaxed);
    let best_size = witness.len();
    let upper_bound = completed.then_some(best_size.max(hint));
    Ok(SearchResult {
        best_size,
        optimal: completed && upper_bound == Some(best_size),
        upper_bound,
        witness,
        nodes: solver.nodes.load(Ordering::Relaxed),
        wall_time: start.elapsed(),
    })
}

/// Largest M-intersecting family on `n` points.
pub fn max_family(n: usize, m: &IntSet, include_diagonal: bool, config: &SearchConfig) -> Result<SearchResult> {
    max_clique(&CompatGraph::build(n, m, include_diagonal)?, config)
}

/// Rows of the cross-compatibility relation on `2^V` as bitsets.
fn relation(n: usize, m: &IntSet) -> Vec<Bits> {
    let size = 1usize << n;
    let w = words(size);
    (0..size)
        .map(|a| {
            let mut row = vec![0u64; w];
            for b in 0..size {
                if m.contains((a & b).count_ones() as usize) {
                    set_bit(&mut row, b);
                }
            }
            row
        })
        .collect()
}

fn derive(rel: &[Bits], set: &[u64], universe: usize) -> Bits {
    let mut out = vec![u64::MAX; words(universe)];
    if !universe.is_multiple_of(64) {
        *out.last_mut().unwrap() = (1u64 << (universe % 64)) - 1;
    }
    for (i, row) in rel.iter().enumerate() {
        if has_bit(set, i) {
            for (o, r) in out.iter_mut().zip(row) {
                *o &= r;
            }
        }
    }
    out
}

fn bits_to_family(n: usize, set: &[u64]) -> Result<Family> {
    let members: Vec<SubsetMask> = (0..1u64 << n).filter(|&i| has_bit(set, i as usize)).map(SubsetMask).collect();
    Family::new(GroundSet::new(n)?, members)
}

struct Cbo<'a> {
    rel: &'a [Bits],
    size: usize,
    best: (u64, Bits, Bits),
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl Cbo<'_> {
    fn visit(&mut self, extent: Bits, intent: Bits, from: usize) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        let product = (count(&extent) * count(&intent)) as u64;
        if product > self.best.0 {
            self.best = (product, extent.clone(), intent.clone());
        }
        for j in from..self.size {
            if has_bit(&intent, j) {
                continue;
            }
            // objects compatible with attribute j
            let c = and(&extent, &self.rel[j]);
            let d = derive(self.rel, &c, self.size);
            let canonical = (0..j).all(|i| has_bit(&d, i) == has_bit(&intent, i));
            if canonical {
                self.visit(c, d, j + 1);
            }
        }
    }
}

/// Exact maximum of `|A| |B|` over closed pairs by close-by-one enumeration.
fn pair_exact(n: usize, m: &IntSet, config: &SearchConfig) -> Result<PairSearchResult> {
    let start = Instant::now();
    let rel = relation(n, m);
    let size = 1usize << n;
    let mut all = vec![0u64; words(size)];
    for i in 0..size {
        set_bit(&mut all, i);
    }
    let intent = derive(&rel, &all, size);
    let mut cbo = Cbo {
        rel: &rel,
        size,
        best: ((count(&all) * count(&intent)) as u64, all.clone(), intent.clone()),
        nodes: 0,
        deadline: config.time_limit.map(|d| start + d),
        timed_out: false,
    };
    cbo.visit(all, intent, 0);
    let (best_product, a, b) = cbo.best;
    Ok(PairSearchResult {
        best_product,
        witness: FamilyPair::new(bits_to_family(n, &a)?, bits_to_family(n, &b)?)?,
        optimal: !cbo.timed_out,
        nodes: cbo.nodes,
        wall_time: start.elapsed(),
    })
}

/// Seeded hill climbing over closed pairs; a lower bound only.
fn pair_heuristic(n: usize, m: &IntSet, config: &SearchConfig) -> Result<PairSearchResult> {
    let start = Instant::now();
    let rel = relation(n, m);
    let size = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let deadline = config.time_limit.map(|d| start + d);
    let mut nodes = 0u64;
    let close = |seed: &[u64]| {
        let b = derive(&rel, seed, size);
        let a = derive(&rel, &b, size);
        let b = derive(&rel, &a, size);
        let p = (count(&a) * count(&b)) as u64;
        (p, a, b)
    };
    let mut best = close(&vec![0u64; words(size)]);
    for _ in 0..config.restarts.max(1) {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let mut seed = vec![0u64; words(size)];
        set_bit(&mut seed, rng.gen_range(0..size));
        let mut cur = close(&seed);
        loop {
            nodes += 1;
            // try adding each outside object to the extent, keep the best improvement
            let mut improved: Option<(u64, Bits, Bits)> = None;
            for j in 0..size {
                if has_bit(&cur.1, j) {
                    continue;
                }
                let mut ext = cur.1.clone();
                set_bit(&mut ext, j);
                let cand = close(&ext);
                if cand.0 > improved.as_ref().map_or(cur.0, |x| x.0) {
                    improved = Some(cand);
                }
            }
            match improved {
                Some(next) => cur = next,
                None => break,
            }
        }
        if cur.0 > best.0 {
            best = cur;
        }
    }
    let (best_product, a, b) = best;
    Ok(PairSearchResult {
        best_product,
        witness: FamilyPair::new(bits_to_family(n, &a)?, bits_to_family(n, &b)?)?,
        optimal: false,
        nodes,
        wall_time: start.elapsed(),
    })
}

/// Largest cross-M-intersecting product: exact for `n <= 5`, heuristic up to `n = 10`.
pub fn max_pair_product(n: usize, m: &IntSet, config: &SearchConfig) -> Result<PairSearchResult> {
    if m.bound() != n {
        return Err(Error::IntSetBoundMismatch { expected: n, got: m.bound() });
    }
    match n {
        0..=5 => pair_exact(n, m, config),
        6..=10 => pair_heuristic(n, m, config),
        _ => Err(Error::LimitExceeded { size: n, limit: 10 }),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KatonaCheck {
    pub n: usize,
    pub t: usize,
    pub oracle: usize,
    pub construction: usize,
    pub equal: bool,
}

fn exact_max(result: SearchResult) -> Result<usize> {
    if !result.optimal {
        return Err(Error::InvalidParameter("search did not finish".into()));
    }
    Ok(result.best_size)
}

/// Maximum family with all intersections above `t` against `|A(n, t)|`.
pub fn verify_katona(n: usize, t: usize, config: &SearchConfig) -> Result<KatonaCheck> {
    if n > 7 {
        return Err(Error::LimitExceeded { size: n, limit: 7 });
    }
    let construction = katona_family(n, t)?.len();
    let oracle = exact_max(max_family(n, &above(n, t), true, config)?)?;
    Ok(KatonaCheck { n, t, oracle, construction, equal: oracle == construction })
}

#[derive(Clone, Debug, Serialize)]
pub struct FranklFurediCheck {
    pub n: usize,
    pub t: usize,
    pub oracle: usize,
    pub construction: usize,
    /// The oracle never falls below the construction.
    pub at_least_construction: bool,
    /// Equality; only expected for large `n`.
    pub equal: bool,
}

pub fn verify_frankl_furedi(n: usize, t: usize, config: &SearchConfig) -> Result<FranklFurediCheck> {
    if n > 7 {
        return Err(Error::LimitExceeded { size: n, limit: 7 });
    }
    let construction = frankl_family(n, t)?.len();
    let oracle = exact_max(max_family(n, &avoid_one(n, t)?, true, config)?)?;
    Ok(FranklFurediCheck {
        n,
        t,
        oracle,
        construction,
        at_least_construction: oracle >= construction,
        equal: oracle == construction,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FwCheck {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    /// `C(n, k-t-1)`
    pub bound: usize,
    /// Exact maximum, when the unrestricted search finished within its budget.
    pub maximum: Option<usize>,
    /// No `t`-avoiding `k`-uniform family exceeds the bound.
    pub holds: bool,
    /// A family above the bound, if one was found.
    pub counterexample: Option<Family>,
    pub nodes: u64,
}

/// Proves `max <= C(n, k-t-1)` for `t`-avoiding `k`-uniform families under the gcd condition.
pub fn verify_fw_bound(n: usize, k: usize, t: usize, config: &SearchConfig) -> Result<FwCheck> {
    if k >= n {
        return Err(Error::InvalidParameter(format!("need n > k, got n={n}, k={k}")));
    }
    let cond = fw_gcd_condition(k as u64, t as u64)?;
    if !cond.holds {
        return Err(Error::InvalidParameter(format!("gcd condition fails for k={k}, t={t}")));
    }
    let vertices = binomial(n as u64, k as u64);
    if vertices > BigUint::from(1000u32) {
        return Err(Error::LimitExceeded { size: usize::try_from(vertices).unwrap_or(usize::MAX), limit: 1000 });
    }
    let bound = usize::try_from(binomial(n as u64, (k - t - 1) as u64)).expect("small");
    let graph = CompatGraph::build_uniform(n, k, &avoid_one(n, t)?)?;
    // proving the bound is cheap; the exact maximum can take much longer
    let proof = max_clique(&graph, &SearchConfig { bound_hint: Some(bound), time_limit: None, ..config.clone() })?;
    let budget = config.time_limit.unwrap_or(FW_EXACT_BUDGET);
    let full = max_clique(&graph, &SearchConfig { time_limit: Some(budget), ..config.clone() })?;
    let maximum = full.optimal.then_some(full.best_size);
    let nodes = proof.nodes + full.nodes;
    let found = if proof.witness.len() > full.witness.len() { proof.witness } else { full.witness };
    let counterexample = (found.len() > bound).then_some(found);
    Ok(FwCheck { n, k, t, bound, maximum, holds: counterexample.is_none(), counterexample, nodes })
}
