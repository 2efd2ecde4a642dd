//! Best-arm identification in stochastic multi-armed bandits.
//!
//! The crate provides lil'UCB, an upper-confidence-bound sampler whose
//! confidence radii follow a finite-time law of the iterated logarithm, along
//! with the baselines it is usually benchmarked against (successive
//! elimination, exponential-gap elimination, UCB1, uniform sampling) and a
//! deterministic, trial-parallel Monte-Carlo harness for stopping-time and
//! anytime-error studies.
//!
//! Module map:
//!
//! - [`scenario`]: arm models, problem scenarios, hardness measures.
//! - [`confidence`]: confidence radii, parameter maps and validity checks.
//! - [`algorithms`]: the sampler contract and all sampling policies.
//! - [`harness`]: seeded trials, experiment runners, CSV/JSON output and the
//!   empirical LIL verifier.

pub mod algorithms;
pub mod confidence;
pub mod error;
pub mod harness;
pub mod scenario;

pub use error::{Error, Result};
