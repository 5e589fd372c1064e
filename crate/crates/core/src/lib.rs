//! Correspondence (DP) coloring toolkit.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: bit-row adjacency graphs, G(n, q) generation, Turán's bound.
//! * [`iscount`]: exact independent-set profiles, uniform sampling, median size.
//! * [`richness`]: binomial prefix sums, b-largeness, exact IS-richness checks and
//!   the analytic verifier for growth profiles.
//! * [`correspondence`]: correspondence assignments, cover graphs, partial colorings.
//! * [`solver`]: exact backtracking, the neighbourhood resampling kernel and the
//!   resampling driver.
//! * [`concentration`]: expected independent-set counts, Suen/Chernoff-type bounds
//!   and the Monte Carlo experiments that check them.
//!
//! Random-graph conventions: every API in this crate takes the **edge**
//! probability `q`. Where a formula is stated for non-edge probability `p`,
//! the call site says so and uses `q = 1 - p`.

pub mod concentration;
pub mod correspondence;
pub mod error;
pub mod graph;
pub mod iscount;
pub mod richness;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use graph::Graph;
pub use rng::Seed;
