//! Exhaustive-search oracles for the constrained search and the router.
//!
//! These live in the unit-test binary so they run ahead of the acceptance
//! target; the helpers are shared with it.

#[path = "../../tests/common/mod.rs"]
mod common;

mod cdijkstra;
mod router;
