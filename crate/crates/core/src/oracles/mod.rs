//! Brute-force references for small instances.
//!
//! Each oracle re-derives its rules from the raw records instead of calling
//! the production modules, so a shared bug cannot hide behind agreement.
//! Sizes are checked against an [`OracleBudget`] up front; oversized inputs
//! are refused rather than enumerated slowly.

mod assignments;
mod packings;
mod routes;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use assignments::{enumerate_assignments, AssignmentCensus, OracleAssignment};
pub use packings::{enumerate_packings, PackingOptimum};
pub use routes::{enumerate_routes, FlowOptimum, RouteCensus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBudget {
    pub max_parts: usize,
    pub max_units: usize,
    pub max_routes_per_flow: usize,
    pub max_packed_items: usize,
    /// Cap on complete candidates in the nominal assignment space.
    pub max_candidates: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_parts: 6,
            max_units: 6,
            max_routes_per_flow: 20,
            max_packed_items: 5,
            max_candidates: 50_000_000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what}: {actual} exceeds the oracle budget of {limit}")]
    Budget {
        what: &'static str,
        actual: u64,
        limit: u64,
    },
    #[error("criterion is not supported by the oracle: {0}")]
    Criterion(String),
}

fn check(what: &'static str, actual: u64, limit: u64) -> Result<(), OracleError> {
    if actual > limit {
        Err(OracleError::Budget { what, actual, limit })
    } else {
        Ok(())
    }
}

/// Whether `bbox` fits `container` after some permutation of its sides.
fn fits_any(bbox: [u64; 3], container: [u64; 3]) -> bool {
    permutations(bbox).iter().any(|d| (0..3).all(|k| d[k] <= container[k]))
}

fn permutations(d: [u64; 3]) -> [[u64; 3]; 6] {
    let [a, b, c] = d;
    [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]
}
