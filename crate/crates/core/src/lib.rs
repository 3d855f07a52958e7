//! Inference of minimum-state probabilistic finite-state automata from a
//! single observed symbol sequence.
//!
//! Three routes produce a machine from the same window counts:
//!
//! - [`cssr`]: greedy causal-state splitting followed by determinizing
//!   reconstruction. Fast, but can overshoot the minimum on finite data.
//! - [`exact`]: exhaustive branch-and-bound for the minimum number of states,
//!   with or without the determinism requirement.
//! - [`clique`]: maximal-clique enumeration and minimum clique cover of the
//!   compatibility graph, then determinizing reconstruction of every minimum
//!   exact cover.

pub mod error;
pub mod sequence;
pub mod machine;
pub mod stats;
pub mod cssr;
pub mod exact;
pub mod clique;
pub mod infer;

pub use error::{Error, Result};
pub use infer::{infer, infer_counts, Inference, Method};
