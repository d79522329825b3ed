//! Partition functions of edge-coloring models and tensor networks on
//! bounded-degree multigraphs.
//!
//! The crate provides
//!
//! * [`graph`]: multigraphs, generators, induced-subgraph machinery and the
//!   edge-list file format;
//! * [`models`]: edge-coloring models, tensor assignments, vertex models and
//!   the complex orthogonal group action;
//! * [`exact`]: brute-force contraction, restricted sums and polynomial
//!   interpolation, used as the ground truth everywhere else;
//! * [`poly`]: complex polynomials and a simultaneous root finder;
//! * [`approx`]: zero-free constants and the Taylor-series approximation of
//!   `ln q(1)` with a certified error bound;
//! * [`exptype`]: exponential-type graph polynomials, in particular the
//!   random-cluster Tutte polynomial;
//! * [`limits`]: normalized partition functions along graph families;
//! * [`selftest`]: independent brute-force oracles and a quick
//!   oracle-equivalence suite.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod approx;
pub mod complex_json;
pub mod error;
pub mod exact;
pub mod exptype;
pub mod graph;
pub mod limits;
pub mod models;
pub mod multiset;
pub mod partitions;
pub mod poly;
pub mod selftest;

pub use error::{HolantError, Result};
pub use num_complex::Complex64;

/// Cap on the number of term evaluations an enumeration may perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Budget {
    pub const DEFAULT: Budget = Budget(100_000_000);

    /// Returns an error if `needed` exceeds the budget.
    pub fn check(self, needed: f64) -> Result<()> {
        if needed > self.0 as f64 {
            Err(HolantError::BudgetExceeded {
                needed,
                budget: self.0,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}
