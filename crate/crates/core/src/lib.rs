//! Shared mesh protection with pre-cross-connected trails (PXTs).
//!
//! Working and protection paths are routed online, one demand at a time,
//! such that no node ever becomes a branch point: every protection edge is
//! statically cross-connected to at most one other protection edge at each of
//! its endnodes, so after a single failure only the endnodes of the affected
//! demands switch.
//!
//! Modules:
//! - [`graph`]: multigraph model, walks, shortest paths, benchmark topologies.
//! - [`plan`]: allocation plans, the four plan conditions, PXT extraction.
//! - [`cdijkstra`]: shortest paths under rival-arc exclusion.
//! - [`router`]: the online PXT routing algorithm.
//! - [`baselines`]: 1+1 and simple shared-path protection.
//! - [`traffic`]: uniform, nearest-neighbor and unbalanced demand lists.
//! - [`failsim`]: single-failure restoration and plan audit.
//! - [`experiment`]: reproducible bandwidth experiments and reports.

pub mod baselines;
pub mod cdijkstra;
pub mod experiment;
pub mod failsim;
pub mod graph;
pub mod plan;
pub mod router;
pub mod traffic;

// Lets the oracle suites name the crate the way integration tests do.
#[cfg(test)]
extern crate self as pxt_core;

#[cfg(test)]
mod oracle_tests;
