//! Exact common induced subgraph search.
//!
//! A common induced subgraph of size `k` is a pair of `k`-tuples `(I, J)`
//! with `g1[I] = g2[J]`, i.e. a set of `k` vertex pairs `(i, j)` such that
//! every d-subset of pairs is a hyperedge on both sides or on neither. The
//! search enumerates such pairings as sets, so each one is visited once;
//! ordered tuple pairs are recovered by multiplying by `k!`.
//!
//! All entry points take a [`Budget`]. When it runs out the outcome is
//! undecided, never a guess.

mod rows;
mod search;

use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize};
use core::time::Duration;

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, VertexTuple};
use crate::theory;

pub use rows::ROW_TABLE_LIMIT;
use search::{Engine, Prepared};

/// Source of elapsed time for wall-clock budgets.
pub trait Clock: Sync {
    fn elapsed(&self) -> Duration;
}

/// A clock that never advances; wall-time limits never fire.
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed(&self) -> Duration {
        Duration::ZERO
    }
}

/// Search limits. Node counts are deterministic; wall time is not.
#[derive(Clone, Copy)]
pub struct Budget<'c> {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
    pub clock: &'c dyn Clock,
}

impl Budget<'static> {
    pub fn unlimited() -> Self {
        Budget {
            max_nodes: None,
            max_time: None,
            clock: &NoClock,
        }
    }

    pub fn nodes(max_nodes: u64) -> Self {
        Budget {
            max_nodes: Some(max_nodes),
            ..Self::unlimited()
        }
    }
}

impl<'c> Budget<'c> {
    fn minus_nodes(&self, used: u64) -> Budget<'c> {
        Budget {
            max_nodes: self.max_nodes.map(|m| m.saturating_sub(used)),
            ..*self
        }
    }
}

/// Counters from one search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    /// Largest pairing size reached.
    pub max_depth: usize,
    /// Nodes cut by the size bound.
    pub prunes: u64,
    pub elapsed: Duration,
}

impl SearchStats {
    fn absorb(&mut self, other: &SearchStats) {
        self.nodes += other.nodes;
        self.max_depth = self.max_depth.max(other.max_depth);
        self.prunes += other.prunes;
        self.elapsed = self.elapsed.max(other.elapsed);
    }
}

/// Equal-length tuples `I` into `g1` and `J` into `g2` with `g1[I] = g2[J]`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MatchWitness {
    pub i_tuple: VertexTuple,
    pub j_tuple: VertexTuple,
    pub size: usize,
}

impl MatchWitness {
    /// Re-extracts both induced subgraphs and compares them.
    pub fn verify(&self, g1: &Hypergraph, g2: &Hypergraph) -> bool {
        self.i_tuple.len() == self.size
            && self.j_tuple.len() == self.size
            && match (g1.induced(&self.i_tuple), g2.induced(&self.j_tuple)) {
                (Ok(a), Ok(b)) => a == b,
                _ => false,
            }
    }
}

/// What the search is after.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Any common induced subgraph of this size.
    Decide(usize),
    /// The largest one.
    Maximize,
    /// Every pairing of this size.
    Count(usize),
}

/// One branching decision: pair pattern vertex with target vertex, or leave
/// the pattern vertex unmatched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Match(usize, usize),
    Skip(usize),
}

/// State shared by concurrent sub-searches: the best size found anywhere
/// (updated by commutative max), a stop flag for decision searches, and the
/// nodes spent so far, against which a node budget is charged as a whole.
#[derive(Debug, Default)]
pub struct SharedBound {
    pub best: AtomicUsize,
    pub stop: AtomicBool,
    pub nodes: AtomicU64,
}

impl SharedBound {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Result of a decision search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Existence {
    Found(MatchWitness),
    Absent,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExistsOutcome {
    pub result: Existence,
    pub stats: SearchStats,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LcisOutcome {
    /// `None` when the budget ran out before optimality was proved.
    pub size: Option<usize>,
    /// Largest witness found; optimal when `size` is set.
    pub witness: MatchWitness,
    pub stats: SearchStats,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountOutcome {
    /// Ordered tuple pairs `(I, J)`; `None` when the budget ran out.
    pub count: Option<u128>,
    pub stats: SearchStats,
}

/// How [`lcis_size`] looks for the maximum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LcisStrategy {
    /// One maximizing search pruned by the incumbent.
    #[default]
    BranchAndBound,
    /// Decision searches from `min(n1, n2)` down to the first success.
    Descending,
    /// Decision searches from the theory window upward (or downward after
    /// an initial failure).
    Upward,
}

/// Largest arity the search supports.
pub const MAX_ARITY: usize = 31;

/// The two graphs in search orientation: the smaller order is the pattern.
pub struct Instance<'g> {
    g1: &'g Hypergraph,
    g2: &'g Hypergraph,
    swapped: bool,
    prep: Prepared<'g>,
}

impl<'g> Instance<'g> {
    pub fn new(g1: &'g Hypergraph, g2: &'g Hypergraph) -> Result<Self> {
        if g1.arity() != g2.arity() {
            return Err(Error::ArityMismatch {
                left: g1.arity(),
                right: g2.arity(),
            });
        }
        if g1.arity() > MAX_ARITY {
            return Err(Error::TooLarge("arity above 31"));
        }
        let swapped = g1.order() < g2.order();
        let prep = if swapped {
            Prepared::new(g1, g2)
        } else {
            Prepared::new(g2, g1)
        };
        Ok(Instance {
            g1,
            g2,
            swapped,
            prep,
        })
    }

    pub fn max_size(&self) -> usize {
        self.g1.order().min(self.g2.order())
    }

    fn witness(&self, pairs: &[(usize, usize)]) -> MatchWitness {
        let mut ij: Vec<(usize, usize)> = pairs
            .iter()
            .map(|&(p, t)| if self.swapped { (p, t) } else { (t, p) })
            .collect();
        ij.sort_unstable();
        let (i, j): (Vec<usize>, Vec<usize>) = ij.into_iter().unzip();
        MatchWitness {
            size: i.len(),
            i_tuple: VertexTuple::new(i).expect("pairing is injective"),
            j_tuple: VertexTuple::new(j).expect("pairing is injective"),
        }
    }

    fn engine<'a>(
        &'a self,
        mode: SearchMode,
        budget: &'a Budget<'a>,
        shared: Option<&'a SharedBound>,
    ) -> Engine<'a> {
        Engine::new(&self.prep, mode, budget, shared)
    }

    /// Runs the search down to `depth` decisions and returns the open
    /// subproblems below it, plus whatever was settled above it.
    pub fn split(&self, mode: SearchMode, depth: usize) -> Frontier {
        let budget = Budget::unlimited();
        let mut e = self.engine(mode, &budget, None);
        e.emit_at(depth);
        e.run(&[]);
        Frontier {
            subproblems: core::mem::take(&mut e.emitted),
            settled: SubOutcome {
                witness: e
                    .found
                    .as_deref()
                    .or((!e.best.is_empty()).then_some(e.best.as_slice()))
                    .map(|p| self.witness(p)),
                pairings: e.count,
                complete: true,
                stats: e.stats,
            },
        }
    }

    /// Searches below one frontier prefix.
    pub fn solve(
        &self,
        mode: SearchMode,
        prefix: &[Step],
        budget: &Budget<'_>,
        shared: Option<&SharedBound>,
    ) -> SubOutcome {
        let mut e = self.engine(mode, budget, shared);
        e.run(prefix);
        let pairs = match mode {
            SearchMode::Decide(_) => e.found.as_deref(),
            SearchMode::Maximize => Some(e.best.as_slice()),
            SearchMode::Count(_) => None,
        };
        SubOutcome {
            witness: pairs.map(|p| self.witness(p)),
            pairings: e.count,
            complete: !e.aborted,
            stats: e.stats,
        }
    }
}

/// Subproblems left below a split depth.
#[derive(Clone, Debug)]
pub struct Frontier {
    pub subproblems: Vec<Vec<Step>>,
    /// Results found above the split depth.
    pub settled: SubOutcome,
}

/// Result of searching one subproblem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubOutcome {
    /// Decide: the witness if found. Maximize: best found (possibly empty).
    pub witness: Option<MatchWitness>,
    /// Count: unordered pairings of the requested size.
    pub pairings: u128,
    /// False when the budget ran out.
    pub complete: bool,
    pub stats: SearchStats,
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Ordered tuple pairs corresponding to `pairings` unordered pairings of
/// size `ell`.
pub fn ordered_count(pairings: u128, ell: usize) -> u128 {
    pairings
        .checked_mul(factorial(ell))
        .expect("W overflows u128")
}

/// Is there a common induced subgraph on `k` vertices?
pub fn exists_common(
    g1: &Hypergraph,
    g2: &Hypergraph,
    k: usize,
    budget: &Budget<'_>,
) -> Result<ExistsOutcome> {
    let inst = Instance::new(g1, g2)?;
    if k > inst.max_size() {
        return Err(Error::OutOfDomain("k exceeds the smaller graph's order"));
    }
    let out = inst.solve(SearchMode::Decide(k), &[], budget, None);
    Ok(ExistsOutcome {
        result: match (out.witness, out.complete) {
            (Some(w), _) => Existence::Found(w),
            (None, true) => Existence::Absent,
            (None, false) => Existence::Undecided,
        },
        stats: out.stats,
    })
}

/// `W`: the number of ordered pairs `(I, J)` of `ell`-tuples with
/// `g1[I] = g2[J]`. Zero when `ell` exceeds either order.
pub fn count_w(
    g1: &Hypergraph,
    g2: &Hypergraph,
    ell: usize,
    budget: &Budget<'_>,
) -> Result<CountOutcome> {
    let inst = Instance::new(g1, g2)?;
    if ell > inst.max_size() {
        return Ok(CountOutcome {
            count: Some(0),
            stats: SearchStats::default(),
        });
    }
    let out = inst.solve(SearchMode::Count(ell), &[], budget, None);
    Ok(CountOutcome {
        count: out.complete.then(|| ordered_count(out.pairings, ell)),
        stats: out.stats,
    })
}

/// Size of the largest common induced subgraph.
pub fn lcis_size(
    g1: &Hypergraph,
    g2: &Hypergraph,
    strategy: LcisStrategy,
    budget: &Budget<'_>,
) -> Result<LcisOutcome> {
    let inst = Instance::new(g1, g2)?;
    match strategy {
        LcisStrategy::BranchAndBound => {
            let out = inst.solve(SearchMode::Maximize, &[], budget, None);
            let witness = out.witness.unwrap_or_default();
            Ok(LcisOutcome {
                size: out.complete.then_some(witness.size),
                witness,
                stats: out.stats,
            })
        }
        LcisStrategy::Descending => {
            let top = inst.max_size();
            decide_walk(&inst, budget, top, false)
        }
        LcisStrategy::Upward => {
            let start = upward_start(g1, g2).min(inst.max_size());
            decide_walk(&inst, budget, start, true)
        }
    }
}

/// `floor(x - 1/2)` clamped below by `d - 1`, or `d - 1` when the theory
/// does not apply (`d < 3`).
fn upward_start(g1: &Hypergraph, g2: &Hypergraph) -> usize {
    let d = g1.arity();
    let floor = d - 1;
    let (n1, n2) = (g1.order() as u64, g2.order() as u64);
    match theory::predict_x(d, n1.max(1), n2.max(1)) {
        Ok(x) if x.is_finite() => (libm::floor(x - 0.5).max(0.0) as usize).max(floor),
        _ => floor,
    }
}

/// Walks decision searches from `start`. Upward: climb while found, or
/// descend to the first success if `start` fails. Otherwise descend only.
fn decide_walk(
    inst: &Instance<'_>,
    budget: &Budget<'_>,
    start: usize,
    upward: bool,
) -> Result<LcisOutcome> {
    let mut stats = SearchStats::default();
    let mut best = MatchWitness::default();
    let mut k = start;
    let mut climbing: Option<bool> = None;
    loop {
        let b = budget.minus_nodes(stats.nodes);
        let out = inst.solve(SearchMode::Decide(k), &[], &b, None);
        stats.absorb(&out.stats);
        if !out.complete {
            return Ok(LcisOutcome {
                size: None,
                witness: best,
                stats,
            });
        }
        let found = out.witness;
        match (found, upward, climbing) {
            (Some(w), true, None | Some(true)) => {
                best = w;
                if k == inst.max_size() {
                    break;
                }
                climbing = Some(true);
                k += 1;
            }
            (None, true, Some(true)) => break,
            (Some(w), _, _) => {
                best = w;
                break;
            }
            (None, _, _) => {
                climbing = Some(false);
                // k = 0 always succeeds, so this cannot underflow.
                k -= 1;
            }
        }
    }
    Ok(LcisOutcome {
        size: Some(best.size),
        witness: best,
        stats,
    })
}

#[cfg(test)]
mod tests;
