//! File formats, a multi-threaded search driver, the experiment harness
//! and the command-line tool built on [`hyperlcis_core`].

pub mod cli;
pub mod hug;
pub mod lab;
pub mod parallel;

pub use hyperlcis_core as core;
