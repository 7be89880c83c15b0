//! Depth-first search over partial injective pairings with forward checking.
//!
//! The smaller graph is the pattern. Each node picks one open pattern vertex
//! and branches on every target vertex still in its domain, then on leaving
//! it unmatched. Domains hold exactly the target vertices that extend the
//! current pairing consistently: adding a pair re-checks, for each
//! (d-2)-subset `T` of earlier pairs, the hyperedges `T + new + v` against
//! `T' + new' + x` for every open `v` and candidate `x`.

use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::Ordering;

use super::rows::Side;
use super::{Budget, SearchMode, SearchStats, SharedBound, Step};
use crate::hypergraph::Hypergraph;
use crate::subset;

const OPEN: u8 = 0;
const MATCHED: u8 = 1;
const SKIPPED: u8 = 2;

/// Nodes between wall-clock checks.
const CLOCK_STRIDE: u64 = 1024;

/// Per-instance tables shared by every search over the same two graphs.
pub(crate) struct Prepared<'g> {
    pat: Side<'g>,
    tgt: Side<'g>,
    pat_sig: Vec<f64>,
    tgt_sig: Vec<f64>,
}

impl<'g> Prepared<'g> {
    pub(crate) fn new(pattern: &'g Hypergraph, target: &'g Hypergraph) -> Self {
        Prepared {
            pat: Side::new(pattern),
            tgt: Side::new(target),
            pat_sig: signature(pattern),
            tgt_sig: signature(target),
        }
    }
}

pub(crate) struct Engine<'a> {
    prep: &'a Prepared<'a>,
    d: usize,
    np: usize,
    words: usize,
    mode: SearchMode,
    budget: &'a Budget<'a>,
    shared: Option<&'a SharedBound>,

    status: Vec<u8>,
    pub(crate) pairs: Vec<(usize, usize)>,
    domains: Vec<Vec<u64>>,
    cands: Vec<Vec<usize>>,
    steps: Vec<Step>,
    /// Scratch: (representative, domain size, members) per domain class.
    classes: Vec<(usize, usize, usize)>,
    open: Vec<usize>,

    pub(crate) best: Vec<(usize, usize)>,
    pub(crate) found: Option<Vec<(usize, usize)>>,
    pub(crate) count: u128,
    pub(crate) stats: SearchStats,
    pub(crate) aborted: bool,
    /// Nodes already added to the shared counter.
    charged: u64,
    emit_depth: Option<usize>,
    pub(crate) emitted: Vec<Vec<Step>>,
}

/// Degree as a fraction of the possible `C(n-1, d-1)`.
fn signature(g: &Hypergraph) -> Vec<f64> {
    let n = g.order();
    let possible = subset::binomial(n.saturating_sub(1) as u64, g.arity() as u64 - 1).max(1) as f64;
    g.degrees()
        .into_iter()
        .map(|x| x as f64 / possible)
        .collect()
}

impl<'a> Engine<'a> {
    pub(crate) fn new(
        prep: &'a Prepared<'a>,
        mode: SearchMode,
        budget: &'a Budget<'a>,
        shared: Option<&'a SharedBound>,
    ) -> Self {
        let np = prep.pat.graph().order();
        let nt = prep.tgt.graph().order();
        let words = nt.div_ceil(64).max(1);
        let mut root = vec![0u64; np * words];
        for v in 0..np {
            let dom = &mut root[v * words..(v + 1) * words];
            for x in 0..nt {
                dom[x / 64] |= 1 << (x % 64);
            }
        }
        Engine {
            prep,
            d: prep.pat.graph().arity(),
            np,
            words,
            mode,
            budget,
            shared,
            status: vec![OPEN; np],
            pairs: Vec::new(),
            domains: vec![root],
            cands: Vec::new(),
            steps: Vec::new(),
            classes: Vec::new(),
            open: Vec::new(),
            best: Vec::new(),
            found: None,
            count: 0,
            stats: SearchStats::default(),
            aborted: false,
            charged: 0,
            emit_depth: None,
            emitted: Vec::new(),
        }
    }

    /// Stop expanding at `depth` decisions and record the prefixes instead.
    pub(crate) fn emit_at(&mut self, depth: usize) {
        self.emit_depth = Some(depth);
    }

    /// Replays a prefix of decisions, then searches below it.
    pub(crate) fn run(&mut self, prefix: &[Step]) {
        let mut buf = 0;
        for &step in prefix {
            match step {
                Step::Match(w, x) => {
                    self.filter(buf, w, x);
                    buf += 1;
                    self.status[w] = MATCHED;
                    self.pairs.push((w, x));
                }
                Step::Skip(w) => self.status[w] = SKIPPED,
            }
            self.steps.push(step);
        }
        if self.charge_shared() {
            self.aborted = true;
        } else {
            self.dfs(buf, prefix.len());
            self.charge_shared();
        }
        self.stats.elapsed = self.budget.clock.elapsed();
    }

    fn stopped(&self) -> bool {
        self.aborted
            || self.found.is_some()
            || self.shared.is_some_and(|s| s.stop.load(Ordering::Relaxed))
    }

    fn over_budget(&mut self) -> bool {
        if let Some(max) = self.budget.max_nodes {
            if self.stats.nodes > max {
                return true;
            }
        }
        if !self.stats.nodes.is_multiple_of(CLOCK_STRIDE) {
            return false;
        }
        if self.charge_shared() {
            return true;
        }
        if let Some(limit) = self.budget.max_time {
            if self.budget.clock.elapsed() > limit {
                return true;
            }
        }
        false
    }

    /// Adds uncharged nodes to the shared counter; true once the shared
    /// total exceeds the node budget.
    fn charge_shared(&mut self) -> bool {
        let (Some(max), Some(s)) = (self.budget.max_nodes, self.shared) else {
            return false;
        };
        let fresh = self.stats.nodes - self.charged;
        self.charged = self.stats.nodes;
        s.nodes.fetch_add(fresh, Ordering::Relaxed) + fresh > max
    }

    fn incumbent(&self) -> usize {
        let shared = self.shared.map_or(0, |s| s.best.load(Ordering::Relaxed));
        self.best.len().max(shared)
    }

    fn dfs(&mut self, buf: usize, decisions: usize) {
        if self.stopped() {
            return;
        }
        self.stats.nodes += 1;
        let size = self.pairs.len();
        self.stats.max_depth = self.stats.max_depth.max(size);
        if self.over_budget() {
            self.aborted = true;
            return;
        }
        match self.mode {
            SearchMode::Decide(k) if size == k => {
                self.found = Some(self.pairs.clone());
                if let Some(s) = self.shared {
                    s.stop.store(true, Ordering::Relaxed);
                }
                return;
            }
            SearchMode::Count(l) if size == l => {
                self.count += 1;
                return;
            }
            SearchMode::Maximize if size > self.best.len() => {
                self.best = self.pairs.clone();
                if let Some(s) = self.shared {
                    s.best.fetch_max(size, Ordering::Relaxed);
                }
            }
            _ => {}
        }

        // An open vertex's domain is the set of target vertices whose edge
        // pattern against the matched pairs equals its own, so any two
        // domains are equal or disjoint. Each class of equal domains adds
        // at most min(class size, domain size) pairs.
        // Branch on the smallest domain, then largest degree signature,
        // then smallest label.
        let words = self.words;
        let mut bound = size;
        let mut pick: Option<(usize, usize)> = None;
        {
            let dom = &self.domains[buf];
            let classes = &mut self.classes;
            classes.clear();
            for v in 0..self.np {
                if self.status[v] != OPEN {
                    continue;
                }
                let dv = &dom[v * words..(v + 1) * words];
                let pc: usize = dv.iter().map(|w| w.count_ones() as usize).sum();
                if pc == 0 {
                    continue;
                }
                match classes
                    .iter_mut()
                    .find(|c| c.1 == pc && dom[c.0 * words..(c.0 + 1) * words] == *dv)
                {
                    Some(c) => c.2 += 1,
                    None => classes.push((v, pc, 1)),
                }
                let better = match pick {
                    None => true,
                    Some((bv, bpc)) => {
                        pc < bpc || (pc == bpc && self.prep.pat_sig[v] > self.prep.pat_sig[bv])
                    }
                };
                if better {
                    pick = Some((v, pc));
                }
            }
            bound += classes.iter().map(|&(_, pc, k)| pc.min(k)).sum::<usize>();
        }
        let need = match self.mode {
            SearchMode::Decide(k) | SearchMode::Count(k) => k,
            SearchMode::Maximize => self.incumbent() + 1,
        };
        if bound < need {
            self.stats.prunes += 1;
            return;
        }
        let Some((w, _)) = pick else { return };
        if self.emit_depth == Some(decisions) {
            self.emitted.push(self.steps.clone());
            return;
        }

        if self.cands.len() <= decisions {
            self.cands.resize_with(decisions + 1, Vec::new);
        }
        let mut cands = core::mem::take(&mut self.cands[decisions]);
        cands.clear();
        {
            let dw = &self.domains[buf][w * words..(w + 1) * words];
            for (wi, &word) in dw.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    cands.push(wi * 64 + bits.trailing_zeros() as usize);
                    bits &= bits - 1;
                }
            }
        }
        let sig = self.prep.pat_sig[w];
        let tgt_sig = &self.prep.tgt_sig;
        cands.sort_by(|&a, &b| {
            let da = (tgt_sig[a] - sig).abs();
            let db = (tgt_sig[b] - sig).abs();
            da.total_cmp(&db).then(a.cmp(&b))
        });

        for &x in &cands {
            self.filter(buf, w, x);
            self.status[w] = MATCHED;
            self.pairs.push((w, x));
            self.steps.push(Step::Match(w, x));
            self.dfs(buf + 1, decisions + 1);
            self.steps.pop();
            self.pairs.pop();
            self.status[w] = OPEN;
            if self.stopped() {
                self.cands[decisions] = cands;
                return;
            }
        }
        self.cands[decisions] = cands;

        self.status[w] = SKIPPED;
        self.steps.push(Step::Skip(w));
        self.dfs(buf, decisions + 1);
        self.steps.pop();
        self.status[w] = OPEN;
    }

    /// Writes into `domains[buf + 1]` the domains after pairing `w` with `x`.
    fn filter(&mut self, buf: usize, w: usize, x: usize) {
        let words = self.words;
        if self.domains.len() <= buf + 1 {
            let len = self.np * words;
            self.domains.resize_with(buf + 2, || vec![0; len]);
        }
        let (lo, hi) = self.domains.split_at_mut(buf + 1);
        let src = &lo[buf];
        let dst = &mut hi[0];
        dst.copy_from_slice(src);

        let mut open = core::mem::take(&mut self.open);
        open.clear();
        open.extend((0..self.np).filter(|&v| {
            v != w
                && self.status[v] == OPEN
                && dst[v * words..(v + 1) * words].iter().any(|&b| b != 0)
        }));
        for &v in &open {
            dst[v * words + x / 64] &= !(1 << (x % 64));
        }

        let s = self.pairs.len();
        let t = self.d - 2;
        if s < t || open.is_empty() {
            self.open = open;
            return;
        }
        let mut pos: Vec<usize> = (0..t).collect();
        let mut sp = Vec::with_capacity(t + 1);
        let mut st = Vec::with_capacity(t + 1);
        loop {
            sp.clear();
            st.clear();
            for &p in &pos {
                let (a, b) = self.pairs[p];
                sp.push(a);
                st.push(b);
            }
            sp.push(w);
            st.push(x);
            sp.sort_unstable();
            st.sort_unstable();
            for &v in &open {
                let want = self.prep.pat.has(&sp, v);
                self.prep
                    .tgt
                    .restrict(&st, want, &mut dst[v * words..(v + 1) * words]);
            }
            if !subset::next_colex(&mut pos, s) {
                break;
            }
        }
        self.open = open;
    }
}
