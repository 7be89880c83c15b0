//! Multi-threaded search: the first decision levels are expanded once, and
//! the open subproblems below them run on a rayon pool.
//!
//! Workers share only the input graphs and a [`SharedBound`]. Answers are
//! identical to the single-threaded ones; witnesses and node counts may
//! differ from run to run. Node and wall-time budgets apply to the search
//! as a whole; nodes are charged to the shared counter in blocks of 1024,
//! so the total can overshoot by that much per worker.

use std::time::{Duration, Instant};

use hyperlcis_core::matcher::{
    ordered_count, Budget, Clock, CountOutcome, Existence, ExistsOutcome, Instance, LcisOutcome,
    MatchWitness, SearchMode, SearchStats, SharedBound,
};
use hyperlcis_core::{Error, Hypergraph, Result};
use rayon::prelude::*;

/// Decision depth at which the root is split.
pub const SPLIT_DEPTH: usize = 2;

/// Monotonic wall clock started at construction.
pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        WallClock(Instant::now())
    }
}

impl Clock for WallClock {
    fn elapsed(&self) -> Duration {
        self.0.elapsed()
    }
}

/// Solver limits in std terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Limits {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Limits {
    pub fn budget<'c>(&self, clock: &'c WallClock) -> Budget<'c> {
        Budget {
            max_nodes: self.max_nodes,
            max_time: self.max_time,
            clock,
        }
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|_| Error::OutOfDomain("could not start worker pool"))
}

fn add_stats(total: &mut SearchStats, s: &SearchStats) {
    total.nodes += s.nodes;
    total.max_depth = total.max_depth.max(s.max_depth);
    total.prunes += s.prunes;
}

pub fn exists_common(
    g1: &Hypergraph,
    g2: &Hypergraph,
    k: usize,
    limits: Limits,
    jobs: usize,
) -> Result<ExistsOutcome> {
    let inst = Instance::new(g1, g2)?;
    if k > inst.max_size() {
        return Err(Error::OutOfDomain("k exceeds the smaller graph's order"));
    }
    let clock = WallClock::start();
    let budget = limits.budget(&clock);
    let mode = SearchMode::Decide(k);
    let frontier = inst.split(mode, SPLIT_DEPTH);
    let mut stats = frontier.settled.stats;
    if let Some(w) = frontier.settled.witness {
        return Ok(ExistsOutcome {
            result: Existence::Found(w),
            stats,
        });
    }
    let shared = SharedBound::new();
    let outs: Vec<_> = pool(jobs)?.install(|| {
        frontier
            .subproblems
            .par_iter()
            .map(|p| inst.solve(mode, p, &budget, Some(&shared)))
            .collect()
    });
    let mut complete = true;
    let mut found = None;
    for o in outs {
        add_stats(&mut stats, &o.stats);
        complete &= o.complete;
        if found.is_none() {
            found = o.witness;
        }
    }
    stats.elapsed = clock.elapsed();
    let result = match (found, complete) {
        (Some(w), _) => Existence::Found(w),
        (None, true) => Existence::Absent,
        (None, false) => Existence::Undecided,
    };
    Ok(ExistsOutcome { result, stats })
}

pub fn lcis_size(
    g1: &Hypergraph,
    g2: &Hypergraph,
    limits: Limits,
    jobs: usize,
) -> Result<LcisOutcome> {
    let inst = Instance::new(g1, g2)?;
    let clock = WallClock::start();
    let budget = limits.budget(&clock);
    let mode = SearchMode::Maximize;
    let frontier = inst.split(mode, SPLIT_DEPTH);
    let mut stats = frontier.settled.stats;
    let mut best = frontier.settled.witness.unwrap_or_default();
    let shared = SharedBound::new();
    shared
        .best
        .store(best.size, std::sync::atomic::Ordering::Relaxed);
    let outs: Vec<_> = pool(jobs)?.install(|| {
        frontier
            .subproblems
            .par_iter()
            .map(|p| inst.solve(mode, p, &budget, Some(&shared)))
            .collect()
    });
    let mut complete = true;
    for o in outs {
        add_stats(&mut stats, &o.stats);
        complete &= o.complete;
        if let Some(w) = o.witness {
            if w.size > best.size {
                best = w;
            }
        }
    }
    stats.elapsed = clock.elapsed();
    Ok(LcisOutcome {
        size: complete.then_some(best.size),
        witness: best,
        stats,
    })
}

pub fn count_w(
    g1: &Hypergraph,
    g2: &Hypergraph,
    ell: usize,
    limits: Limits,
    jobs: usize,
) -> Result<CountOutcome> {
    let inst = Instance::new(g1, g2)?;
    if ell > inst.max_size() {
        return Ok(CountOutcome {
            count: Some(0),
            stats: SearchStats::default(),
        });
    }
    let clock = WallClock::start();
    let budget = limits.budget(&clock);
    let mode = SearchMode::Count(ell);
    let frontier = inst.split(mode, SPLIT_DEPTH);
    let mut stats = frontier.settled.stats;
    let shared = SharedBound::new();
    let outs: Vec<_> = pool(jobs)?.install(|| {
        frontier
            .subproblems
            .par_iter()
            .map(|p| inst.solve(mode, p, &budget, Some(&shared)))
            .collect()
    });
    let mut pairings = frontier.settled.pairings;
    let mut complete = true;
    for o in outs {
        add_stats(&mut stats, &o.stats);
        complete &= o.complete;
        pairings += o.pairings;
    }
    stats.elapsed = clock.elapsed();
    Ok(CountOutcome {
        count: complete.then(|| ordered_count(pairings, ell)),
        stats,
    })
}

/// Witness as the two JSON arrays of vertex labels.
pub fn witness_json(w: &MatchWitness) -> serde_json::Value {
    serde_json::json!({
        "size": w.size,
        "i": w.i_tuple.as_slice(),
        "j": w.j_tuple.as_slice(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use hyperlcis_core::LcisStrategy;

    #[test]
    fn matches_single_threaded_answers() {
        for seed in 0..4 {
            let a = Hypergraph::random(3, 9, seed).unwrap();
            let b = Hypergraph::random(3, 8, seed + 50).unwrap();
            let serial = hyperlcis_core::lcis_size(
                &a,
                &b,
                LcisStrategy::BranchAndBound,
                &Budget::unlimited(),
            )
            .unwrap();
            for jobs in [1, 3] {
                let par = lcis_size(&a, &b, Limits::default(), jobs).unwrap();
                assert_eq!(par.size, serial.size);
                assert!(par.witness.verify(&a, &b));
                let k = serial.size.unwrap();
                for (kk, want) in [(k, true), (k + 1, false)] {
                    let e = exists_common(&a, &b, kk, Limits::default(), jobs).unwrap();
                    assert_eq!(matches!(e.result, Existence::Found(_)), want);
                }
                let c = count_w(&a, &b, 4, Limits::default(), jobs).unwrap();
                let s = hyperlcis_core::count_w(&a, &b, 4, &Budget::unlimited()).unwrap();
                assert_eq!(c.count, s.count);
            }
        }
    }

    #[test]
    fn node_limit_yields_undecided() {
        let a = Hypergraph::random(3, 24, 1).unwrap();
        let b = Hypergraph::random(3, 24, 2).unwrap();
        let limits = Limits {
            max_nodes: Some(5),
            max_time: None,
        };
        let e = exists_common(&a, &b, 16, limits, 2).unwrap();
        assert_eq!(e.result, Existence::Undecided);
        assert_eq!(lcis_size(&a, &b, limits, 2).unwrap().size, None);
    }
}
