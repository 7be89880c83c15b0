//! Brute-force references.
//!
//! Nothing here reuses the search, the subset ranking or the moment
//! arithmetic it is meant to check. Edges are held as vertex bitmasks and
//! every enumeration is written out directly.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

/// Largest total number of edge slots `oracle_moments` will exhaust.
pub const MOMENT_SLOT_CAP: usize = 22;

/// Largest order the oracle accepts.
pub const MAX_ORDER: usize = 63;

/// Edge membership keyed by vertex bitmask.
struct MaskSet {
    dense: Option<Vec<bool>>,
    sparse: BTreeSet<u64>,
}

impl MaskSet {
    fn new(order: usize, masks: impl Iterator<Item = u64>) -> Self {
        let mut sparse = BTreeSet::new();
        let mut dense = (order <= 20).then(|| vec![false; 1 << order]);
        for m in masks {
            match dense.as_mut() {
                Some(t) => t[m as usize] = true,
                None => {
                    sparse.insert(m);
                }
            }
        }
        MaskSet { dense, sparse }
    }

    fn from_graph(g: &Hypergraph) -> Self {
        let masks = g
            .edges()
            .map(|e| e.iter().fold(0u64, |m, &v| m | 1 << v))
            .collect::<Vec<_>>();
        Self::new(g.order(), masks.into_iter())
    }

    fn contains(&self, mask: u64) -> bool {
        match &self.dense {
            Some(t) => t[mask as usize],
            None => self.sparse.contains(&mask),
        }
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            if n - v < k - cur.len() {
                break;
            }
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// All ordered `k`-tuples of distinct elements of `0..n`.
fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, used: u64, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if used >> v & 1 == 0 {
                cur.push(v);
                go(n, k, used | 1 << v, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(n, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Checks the two tuples induce the same labelled subgraph, trying every
/// `d`-subset of positions.
fn same_induced(
    a: &MaskSet,
    i: &[usize],
    b: &MaskSet,
    j: &[usize],
    positions: &[Vec<usize>],
) -> bool {
    positions.iter().all(|p| {
        let mi = p.iter().fold(0u64, |m, &q| m | 1 << i[q]);
        let mj = p.iter().fold(0u64, |m, &q| m | 1 << j[q]);
        a.contains(mi) == b.contains(mj)
    })
}

fn check(g1: &Hypergraph, g2: &Hypergraph) -> Result<()> {
    if g1.arity() != g2.arity() {
        return Err(Error::ArityMismatch {
            left: g1.arity(),
            right: g2.arity(),
        });
    }
    if g1.order() > MAX_ORDER || g2.order() > MAX_ORDER {
        return Err(Error::TooLarge("oracle order above 63"));
    }
    Ok(())
}

/// Largest `k` with a common induced subgraph, by trying every `k`-subset
/// of `g1` against every ordered `k`-tuple of `g2`, from the top down.
pub fn oracle_lcis(g1: &Hypergraph, g2: &Hypergraph) -> Result<usize> {
    check(g1, g2)?;
    let (a, b) = (MaskSet::from_graph(g1), MaskSet::from_graph(g2));
    let d = g1.arity();
    for k in (0..=g1.order().min(g2.order())).rev() {
        let positions = subsets(k, d);
        let js = tuples(g2.order(), k);
        for i in subsets(g1.order(), k) {
            if js.iter().any(|j| same_induced(&a, &i, &b, j, &positions)) {
                return Ok(k);
            }
        }
    }
    Ok(0)
}

/// `W`: ordered tuple pairs of length `ell` with equal induced subgraphs.
pub fn oracle_count_w(g1: &Hypergraph, g2: &Hypergraph, ell: usize) -> Result<u128> {
    check(g1, g2)?;
    let (a, b) = (MaskSet::from_graph(g1), MaskSet::from_graph(g2));
    Ok(count_between(
        &a,
        g1.order(),
        &b,
        g2.order(),
        ell,
        g1.arity(),
    ))
}

fn count_between(a: &MaskSet, n1: usize, b: &MaskSet, n2: usize, ell: usize, d: usize) -> u128 {
    let positions = subsets(ell, d);
    let js = tuples(n2, ell);
    let mut w = 0u128;
    for i in tuples(n1, ell) {
        for j in &js {
            if same_induced(a, &i, b, j, &positions) {
                w += 1;
            }
        }
    }
    w
}

/// Exhaustive moments of `W` over all `2^(slots1 + slots2)` graph pairs.
///
/// Each moment is `sum / 2^total_slots`; the sums are returned as integers
/// so callers compare them exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleMoments {
    pub total_slots: u32,
    /// Sum of `W` over all graph pairs.
    pub sum_w: u128,
    /// Sum of `W^2` over all graph pairs.
    pub sum_w_sq: u128,
    /// Graph pairs with `W > 0`.
    pub nonzero: u128,
}

impl OracleMoments {
    pub fn pairs(&self) -> u128 {
        1u128 << self.total_slots
    }

    pub fn expected_w(&self) -> f64 {
        self.sum_w as f64 / self.pairs() as f64
    }

    pub fn expected_w_sq(&self) -> f64 {
        self.sum_w_sq as f64 / self.pairs() as f64
    }

    pub fn prob_positive(&self) -> f64 {
        self.nonzero as f64 / self.pairs() as f64
    }
}

/// Enumerates every pair of `d`-graphs on `n1` and `n2` vertices.
pub fn oracle_moments(d: usize, n1: usize, n2: usize, ell: usize) -> Result<OracleMoments> {
    if d < 2 {
        return Err(Error::ArityTooSmall { arity: d, min: 2 });
    }
    let slots1 = subsets(n1, d);
    let slots2 = subsets(n2, d);
    let total = slots1.len() + slots2.len();
    if total > MOMENT_SLOT_CAP || n1 > 20 || n2 > 20 {
        return Err(Error::TooLarge("more than 22 edge slots to exhaust"));
    }
    let masks = |slots: &[Vec<usize>]| -> Vec<u64> {
        slots
            .iter()
            .map(|s| s.iter().fold(0u64, |m, &v| m | 1 << v))
            .collect()
    };
    let (m1, m2) = (masks(&slots1), masks(&slots2));
    let graphs = |n: usize, m: &[u64]| -> Vec<MaskSet> {
        (0u64..1 << m.len())
            .map(|bits| {
                let chosen = m
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| bits >> k & 1 == 1)
                    .map(|(_, &x)| x);
                MaskSet::new(n, chosen)
            })
            .collect()
    };
    let (gs1, gs2) = (graphs(n1, &m1), graphs(n2, &m2));
    let mut out = OracleMoments {
        total_slots: total as u32,
        sum_w: 0,
        sum_w_sq: 0,
        nonzero: 0,
    };
    for a in &gs1 {
        for b in &gs2 {
            let w = count_between(a, n1, b, n2, ell, d);
            out.sum_w += w;
            out.sum_w_sq += w * w;
            out.nonzero += (w > 0) as u128;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(d: usize, n: usize, edges: &[&[usize]]) -> Hypergraph {
        Hypergraph::from_edges(d, n, edges).unwrap()
    }

    #[test]
    fn enumerations_have_the_right_sizes() {
        assert_eq!(subsets(6, 3).len(), 20);
        assert_eq!(subsets(3, 4).len(), 0);
        assert_eq!(subsets(4, 0), vec![Vec::<usize>::new()]);
        assert_eq!(tuples(5, 3).len(), 60);
        assert_eq!(tuples(3, 0).len(), 1);
    }

    #[test]
    fn count_w_small_cases() {
        let e = g(3, 3, &[]);
        assert_eq!(oracle_count_w(&e, &e, 2).unwrap(), 36);
        let full = g(3, 3, &[&[0, 1, 2]]);
        assert_eq!(oracle_count_w(&full, &full, 3).unwrap(), 36);
        assert_eq!(oracle_count_w(&full, &e, 3).unwrap(), 0);
    }

    #[test]
    fn lcis_small_cases() {
        let a = g(3, 4, &[&[0, 1, 2]]);
        let b = g(3, 4, &[&[0, 1, 2], &[0, 1, 3]]);
        assert_eq!(oracle_lcis(&a, &b).unwrap(), 3);
        assert_eq!(oracle_lcis(&b, &a).unwrap(), 3);
        assert_eq!(oracle_lcis(&b, &b).unwrap(), 4);
    }

    #[test]
    fn moments_small_cases() {
        let m = oracle_moments(3, 3, 3, 3).unwrap();
        assert_eq!(m.pairs(), 4);
        assert_eq!(m.sum_w, 72);
        assert_eq!(m.expected_w(), 18.0);
        let m = oracle_moments(3, 4, 4, 3).unwrap();
        assert_eq!(m.pairs(), 256);
        assert_eq!(m.expected_w(), 288.0);
        let m = oracle_moments(3, 4, 2, 3).unwrap();
        assert_eq!((m.sum_w, m.sum_w_sq, m.nonzero), (0, 0, 0));
        assert!(oracle_moments(3, 6, 5, 3).is_err());
    }
}
