//! Voting with values hidden behind a query budget.
//!
//! Agents rank alternatives; the numeric values behind those rankings can
//! only be inspected through a metered oracle. This crate provides:
//!
//! - electorate sampling from i.i.d. value distributions, with rankings
//!   drawn uniformly among the orders each value row admits
//!   ([`sampling::sample_electorate`]);
//! - budgeted value oracles that cache, count, and consistency-check every
//!   reveal, whether values come from a fixed matrix or from an adversary
//!   answering on the fly ([`query::QueryOracle`]);
//! - the query-limited mechanisms themselves: threshold-approval rules, a
//!   randomized-threshold variant, a randomized binary-search rule, and
//!   query-free positional baselines ([`mechanism`]);
//! - Monte Carlo estimation of average distortion (ratio of expected optimal
//!   to expected realized welfare) with bootstrap confidence intervals,
//!   density-regime tagging, and exact small-instance enumeration
//!   ([`distortion`]);
//! - adversarial electorates that certify distortion lower bounds against a
//!   given mechanism run ([`adversary`]);
//! - a thin command-line front end over all of the above ([`cli`], shipped
//!   as the `vdist` binary).
//!
//! Every randomized entry point takes an explicit seed and yields identical
//! results for identical seeds, independent of thread count. Welfare ratios
//! use the conventions 0/0 = 1 and x/0 = infinity.
//!
//! The `examples/` directory walks through each capability end to end.

pub mod adversary;
pub mod cli;
pub mod distortion;
pub mod distribution;
pub mod election;
pub mod mechanism;
pub mod query;
pub mod sampling;

pub use adversary::{run_bucket_adversary, run_cohort_adversary, sparse_approval_family};
pub use distortion::{
    binary_regime, estimate_average_distortion, exhaustive_worst_case, scan_average_distortion,
    worst_case_ratio, DistortionEstimate, Regime,
};
pub use distribution::ValueDistribution;
pub use election::{Electorate, Profile, Ranking, ValuationMatrix};
pub use mechanism::{MechanismError, MechanismSpec};
pub use query::{QueryError, QueryOracle};
pub use sampling::{sample_electorate, SeededRng};
