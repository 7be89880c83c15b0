//! Edge-membership lookups used by constraint propagation.
//!
//! For a (d-1)-subset `S` of one graph, the incidence row of `S` is the
//! bitset of vertices `v` such that `S + v` is a hyperedge. Rows are
//! tabulated when the table fits in [`ROW_TABLE_LIMIT`] bytes; otherwise
//! each query falls back to a colex rank lookup.

use alloc::vec;
use alloc::vec::Vec;

use crate::hypergraph::Hypergraph;
use crate::subset;

/// Per-graph memory cap for tabulated incidence rows.
pub const ROW_TABLE_LIMIT: usize = 64 << 20;

pub(crate) struct Side<'g> {
    graph: &'g Hypergraph,
    rows: Option<Vec<u64>>,
    words: usize,
}

/// Inserts `v` into the sorted slice `s`, writing into `out`.
#[inline]
fn merged<'b>(s: &[usize], v: usize, out: &'b mut [usize; 32]) -> &'b [usize] {
    let mut k = 0;
    let mut placed = false;
    for &a in s {
        if !placed && v < a {
            out[k] = v;
            k += 1;
            placed = true;
        }
        out[k] = a;
        k += 1;
    }
    if !placed {
        out[k] = v;
        k += 1;
    }
    &out[..k]
}

impl<'g> Side<'g> {
    pub(crate) fn new(graph: &'g Hypergraph) -> Self {
        let n = graph.order();
        let d = graph.arity();
        let words = n.div_ceil(64).max(1);
        let row_count = subset::binomial_usize(n, d - 1);
        let rows = row_count
            .and_then(|r| r.checked_mul(words * 8))
            .filter(|&bytes| bytes <= ROW_TABLE_LIMIT && d <= 32)
            .map(|_| Self::tabulate(graph, words));
        Side { graph, rows, words }
    }

    fn tabulate(graph: &Hypergraph, words: usize) -> Vec<u64> {
        let n = graph.order();
        let d = graph.arity();
        let rows = subset::binomial_usize(n, d - 1).unwrap_or(0);
        let mut table = vec![0u64; rows * words];
        let mut minus = vec![0usize; d - 1];
        for r in graph.edge_ranks() {
            let e = subset::unrank(r, d);
            for skip in 0..d {
                let mut k = 0;
                for (i, &v) in e.iter().enumerate() {
                    if i != skip {
                        minus[k] = v;
                        k += 1;
                    }
                }
                let row = subset::rank(&minus);
                table[row * words + e[skip] / 64] |= 1 << (e[skip] % 64);
            }
        }
        table
    }

    pub(crate) fn graph(&self) -> &'g Hypergraph {
        self.graph
    }

    #[cfg(test)]
    pub(crate) fn is_tabulated(&self) -> bool {
        self.rows.is_some()
    }

    /// Whether `s + v` is a hyperedge; `s` sorted, `v` not in `s`.
    #[inline]
    pub(crate) fn has(&self, s: &[usize], v: usize) -> bool {
        match &self.rows {
            Some(t) => {
                let row = subset::rank(s) * self.words;
                (t[row + v / 64] >> (v % 64)) & 1 == 1
            }
            None => {
                let mut buf = [0usize; 32];
                self.graph.has_edge_sorted(merged(s, v, &mut buf))
            }
        }
    }

    /// Keeps the bits `v` of `dom` for which `s + v` is an edge exactly
    /// when `want_edge` holds.
    #[inline]
    pub(crate) fn restrict(&self, s: &[usize], want_edge: bool, dom: &mut [u64]) {
        match &self.rows {
            Some(t) => {
                let start = subset::rank(s) * self.words;
                let row = &t[start..start + self.words];
                if want_edge {
                    for (a, &b) in dom.iter_mut().zip(row) {
                        *a &= b;
                    }
                } else {
                    for (a, &b) in dom.iter_mut().zip(row) {
                        *a &= !b;
                    }
                }
            }
            None => {
                let mut buf = [0usize; 32];
                for (wi, word) in dom.iter_mut().enumerate() {
                    let mut bits = *word;
                    while bits != 0 {
                        let b = bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        let v = wi * 64 + b;
                        if self.graph.has_edge_sorted(merged(s, v, &mut buf)) != want_edge {
                            *word &= !(1 << b);
                        }
                    }
                }
            }
        }
    }
}
