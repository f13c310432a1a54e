//! Group fairness auditing on the distribution of utility among relevant
//! groups.
//!
//! A decision system assigns each subject a binary decision `d`; together with
//! the binary outcome `y`, the subject realises one of four utility values
//! `w_dy`. Subjects with equal claims (same value of a claims differentiator
//! `J`) are split by the sensitive attribute `A` into relevant groups, and a
//! pattern of justice judges the distribution of expected utility across them.
//!
//! The crate covers:
//!
//! - [`data`]: records, datasets, CSV I/O, synthetic populations, and the
//!   relevant-group partition.
//! - [`utility`]: individual and expected group utility.
//! - [`patterns`]: egalitarian, maximin, prioritarian and sufficientarian
//!   metrics.
//! - [`classical`]: the eight classical parity criteria as gap metrics.
//! - [`equivalence`]: which weight settings reduce egalitarianism to which
//!   classical criterion, verified numerically.
//! - [`optimizer`]: rule spaces, analytic rule evaluation, pattern-optimal
//!   rule search and the total-utility/gap frontier.
//! - [`interface`]: audit reports, config files, the CLI and the HTTP service.
//!
//! Runnable walkthroughs live in `examples/`.

pub mod classical;
pub mod data;
pub mod equivalence;
pub mod error;
pub mod interface;
pub mod optimizer;
pub mod patterns;
pub mod utility;

pub use error::{Error, Result};
