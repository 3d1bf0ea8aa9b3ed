//! Graph planar algebra path model.
//!
//! A finite bipartite graph with a positive eigenvector μ of its adjacency
//! matrix carries the even path algebra generated by letters `X_{e,f°}`
//! (pairs of edges with a common odd endpoint) and vertex projections. This
//! crate evaluates the operator-valued circular (Wick) expectation of closed
//! loop words exactly, and samples the same words with complex Gaussian
//! block matrices for a finite-dimensional cross-check.

pub mod graph;
pub mod mc;
pub mod wick;
pub mod word;

pub use graph::BipartiteGraph;
pub use mc::{mc_estimate, MCConfig, MCEstimate};
pub use wick::{lf_parameter, loop_vs_diagram, wick_expectation, wick_expectation_exact, LoopValue};
pub use word::{Letter, LoopWord};
