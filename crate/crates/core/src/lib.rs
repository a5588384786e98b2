//! Belief-function evidence fusion with distance-based imprecise decisions.
//!
//! The crate covers the full pipeline from mass functions to decisions:
//!
//! - [`frame`]: frames of discernment and bitmask-encoded subsets;
//! - [`massfn`]: mass functions with credibility, plausibility and the
//!   pignistic transform;
//! - [`fusion`]: conjunctive, Dempster, disjunctive and mixed combination;
//! - [`metric`]: Jaccard weights and the Jousselme distance;
//! - [`decision`]: pignistic, expected-loss, Appriou and distance-based rules;
//! - [`bbagen`]: seeded random mass functions for Monte Carlo comparisons;
//! - [`eknn`]: an evidential k-nearest-neighbour classifier;
//! - [`bench`]: datasets, splits, confusion matrices and table reproduction.

pub mod bbagen;
pub mod bench;
pub mod decision;
pub mod eknn;
pub mod error;
pub mod frame;
pub mod fusion;
pub mod massfn;
pub mod metric;

pub use decision::{Decision, DecisionRule, DecisionSpec, DistanceOptions, Reference};
pub use error::{Error, Result};
pub use frame::{Frame, Subset};
pub use fusion::{Combination, MixedStrategy, Rule};
pub use massfn::MassFunction;

/// Crate version, embedded in every harness report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One compact JSON document (no trailing newline).
pub(crate) fn json_line<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string(value).map_err(|e| Error::Io(e.to_string()))
}
