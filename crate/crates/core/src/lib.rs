//! Largest common induced subgraphs of random d-uniform hypergraphs.
//!
//! This crate holds everything that needs no operating system: the
//! hypergraph type and its seeded generator, the closed-form predictions,
//! exact and log-domain moment bounds, the exact search, and brute-force
//! references for testing. It builds with `no_std` and `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod exact;
pub mod hypergraph;
pub mod matcher;
pub mod moments;
pub mod oracle;
pub mod rng;
pub mod subset;
pub mod theory;
pub mod xprec;

pub use error::{Error, Result};
pub use exact::{Dyadic, LogValue};
pub use hypergraph::{Hypergraph, VertexTuple};
pub use matcher::{
    count_w, exists_common, lcis_size, Budget, CountOutcome, Existence, ExistsOutcome, LcisOutcome,
    LcisStrategy, MatchWitness, SearchStats,
};
pub use moments::MomentReport;
pub use theory::{PredictionReport, RegimeHint};
