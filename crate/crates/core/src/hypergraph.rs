//! d-uniform hypergraphs stored as a bit vector over colex-ranked d-subsets.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng;
use crate::subset;

/// Stream tag used by [`Hypergraph::random`].
pub const DEFAULT_STREAM: u64 = 0;

/// A d-uniform hypergraph on vertices `0..n`.
///
/// Bit `r` of the edge vector records whether the d-subset of colex rank `r`
/// is a hyperedge. Values are immutable once built.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    arity: usize,
    order: usize,
    slots: usize,
    words: Vec<u64>,
}

impl core::fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Hypergraph")
            .field("arity", &self.arity)
            .field("order", &self.order)
            .field("edges", &self.edge_count())
            .finish()
    }
}

/// An ordered tuple of distinct vertex labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct VertexTuple(Vec<usize>);

impl VertexTuple {
    pub fn new(items: Vec<usize>) -> Result<Self> {
        let t = VertexTuple(items);
        t.check_distinct()?;
        Ok(t)
    }

    /// `(0, 1, ..., k-1)`.
    pub fn identity(k: usize) -> Self {
        VertexTuple((0..k).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    fn check_distinct(&self) -> Result<()> {
        let mut seen: Vec<usize> = self.0.clone();
        seen.sort_unstable();
        for w in seen.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateVertex { vertex: w[0] });
            }
        }
        Ok(())
    }

    /// Checks the tuple against a host graph on `order` vertices.
    pub fn validate(&self, order: usize) -> Result<()> {
        if let Some(&v) = self.0.iter().find(|&&v| v >= order) {
            return Err(Error::VertexOutOfRange { vertex: v, order });
        }
        self.check_distinct()
    }
}

impl From<VertexTuple> for Vec<usize> {
    fn from(t: VertexTuple) -> Self {
        t.0
    }
}

fn slot_count(arity: usize, order: usize) -> Result<usize> {
    subset::binomial_usize(order, arity).ok_or(Error::TooLarge("edge slot count exceeds usize"))
}

impl Hypergraph {
    /// The edgeless graph.
    pub fn empty(arity: usize, order: usize) -> Result<Self> {
        if arity < 2 {
            return Err(Error::ArityTooSmall { arity, min: 2 });
        }
        let slots = slot_count(arity, order)?;
        Ok(Hypergraph {
            arity,
            order,
            slots,
            words: vec![0; slots.div_ceil(64)],
        })
    }

    /// Builds a graph from explicit hyperedges (any vertex order per edge).
    pub fn from_edges<E: AsRef<[usize]>>(
        arity: usize,
        order: usize,
        edges: impl IntoIterator<Item = E>,
    ) -> Result<Self> {
        let mut g = Self::empty(arity, order)?;
        let mut buf = Vec::with_capacity(arity);
        for e in edges {
            let e = e.as_ref();
            if e.len() != arity {
                return Err(Error::ArityMismatch {
                    left: arity,
                    right: e.len(),
                });
            }
            buf.clear();
            buf.extend_from_slice(e);
            buf.sort_unstable();
            for w in buf.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::DuplicateVertex { vertex: w[0] });
                }
            }
            if let Some(&v) = buf.last().filter(|&&v| v >= order) {
                return Err(Error::VertexOutOfRange { vertex: v, order });
            }
            g.set(subset::rank(&buf));
        }
        Ok(g)
    }

    /// Uniform random d-hypergraph: every d-subset is an edge with
    /// probability 1/2, independently.
    pub fn random(arity: usize, order: usize, seed: u64) -> Result<Self> {
        Self::random_tagged(arity, order, seed, DEFAULT_STREAM)
    }

    /// As [`Hypergraph::random`], drawing from stream `tag` of `seed`.
    ///
    /// Edge bits depend only on (seed, tag, colex rank), so the graph on
    /// `n + 1` vertices restricted to `0..n` is the graph on `n` vertices.
    pub fn random_tagged(arity: usize, order: usize, seed: u64, tag: u64) -> Result<Self> {
        let mut g = Self::empty(arity, order)?;
        let mut stream = rng::keyed_stream(seed, tag);
        rng::fill_bits(&mut stream, &mut g.words);
        g.mask_tail();
        Ok(g)
    }

    /// Edge probability other than 1/2, for tests of the generator only.
    #[doc(hidden)]
    pub fn random_with_density(
        arity: usize,
        order: usize,
        seed: u64,
        tag: u64,
        p: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfDomain("edge probability must lie in [0, 1]"));
        }
        let mut g = Self::empty(arity, order)?;
        let mut stream = rng::keyed_stream(seed, tag);
        for r in 0..g.slots {
            let u = (rand_core::RngCore::next_u64(&mut stream) >> 11) as f64
                * (1.0 / (1u64 << 53) as f64);
            if u < p {
                g.set(r);
            }
        }
        Ok(g)
    }

    fn mask_tail(&mut self) {
        let rem = self.slots % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    fn set(&mut self, r: usize) {
        self.words[r / 64] |= 1 << (r % 64);
    }

    /// Hyperedge size d.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of vertices n.
    pub fn order(&self) -> usize {
        self.order
    }

    /// `C(n, d)`.
    pub fn slot_count(&self) -> usize {
        self.slots
    }

    pub fn edge_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Raw edge bits, `slot_count()` of them, least significant first.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn has_edge_rank(&self, r: usize) -> bool {
        (self.words[r / 64] >> (r % 64)) & 1 == 1
    }

    /// Membership test for a strictly increasing d-subset.
    #[inline]
    pub fn has_edge_sorted(&self, sorted: &[usize]) -> bool {
        debug_assert_eq!(sorted.len(), self.arity);
        self.has_edge_rank(subset::rank(sorted))
    }

    /// Membership test for a d-subset given in any order.
    pub fn has_edge(&self, vertices: &[usize]) -> bool {
        let mut buf = vertices.to_vec();
        buf.sort_unstable();
        buf.len() == self.arity
            && buf.windows(2).all(|w| w[0] < w[1])
            && buf.last().is_none_or(|&v| v < self.order)
            && self.has_edge_sorted(&buf)
    }

    /// Colex ranks of the hyperedges, ascending.
    pub fn edge_ranks(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut bits = w;
            core::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i * 64 + b)
            })
        })
    }

    /// Hyperedges as ascending vertex lists, in colex order.
    pub fn edges(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let d = self.arity;
        self.edge_ranks().map(move |r| subset::unrank(r, d))
    }

    /// Flips every edge bit.
    pub fn complement(&self) -> Self {
        let mut g = self.clone();
        for w in &mut g.words {
            *w = !*w;
        }
        g.mask_tail();
        g
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.order {
            return Err(Error::NotAPermutation);
        }
        let mut seen = vec![false; self.order];
        for &p in perm {
            if p >= self.order || seen[p] {
                return Err(Error::NotAPermutation);
            }
            seen[p] = true;
        }
        let mut g = Self::empty(self.arity, self.order)?;
        let mut buf = vec![0; self.arity];
        for e in self.edges() {
            for (slot, &v) in buf.iter_mut().zip(&e) {
                *slot = perm[v];
            }
            buf.sort_unstable();
            g.set(subset::rank(&buf));
        }
        Ok(g)
    }

    /// Subgraph induced by a tuple: vertex `j` of the result is `t[j]`.
    pub fn induced(&self, t: &VertexTuple) -> Result<Self> {
        t.validate(self.order)?;
        let t = t.as_slice();
        let k = t.len();
        let mut g = Self::empty(self.arity, k)?;
        if g.slots == 0 {
            return Ok(g);
        }
        let d = self.arity;
        let mut pos: Vec<usize> = (0..d).collect();
        let mut image = vec![0; d];
        let mut r = 0;
        loop {
            for (slot, &p) in image.iter_mut().zip(&pos) {
                *slot = t[p];
            }
            image.sort_unstable();
            if self.has_edge_sorted(&image) {
                g.set(r);
            }
            r += 1;
            if !subset::next_colex(&mut pos, k) {
                break;
            }
        }
        debug_assert_eq!(r, g.slots);
        Ok(g)
    }

    /// The graph on `0..k` induced by the first `k` vertices.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        if k > self.order {
            return Err(Error::VertexOutOfRange {
                vertex: k,
                order: self.order,
            });
        }
        let mut g = Self::empty(self.arity, k)?;
        let full = g.slots / 64;
        g.words[..full].copy_from_slice(&self.words[..full]);
        if g.slots % 64 != 0 {
            g.words[full] = self.words[full];
            g.mask_tail();
        }
        Ok(g)
    }

    /// Number of hyperedges containing each vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.order];
        for e in self.edges() {
            for v in e {
                deg[v] += 1;
            }
        }
        deg
    }
}
