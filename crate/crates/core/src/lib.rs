//! Exact runtime analysis and optimal static mutation-strength
//! distributions for the (1+λ) evolutionary algorithm on OneMax.
//!
//! The algorithm keeps one parent, creates λ offspring per generation by
//! flipping `k` distinct bits with `k` drawn from a fixed distribution,
//! and replaces the parent by the best offspring if it is not worse.
//!
//! * [`dp`] computes the expected number of generations exactly.
//! * [`operators`] builds the distributions of the usual mutation operators.
//! * [`sepcmaes`] searches for the distribution minimizing the runtime.
//! * [`simulate`] runs the algorithm on bit strings as an independent check.
//! * [`experiments`] runs seeded optimizer grids, robustness statistics and
//!   regret tables, and persists them as JSON and CSV.
//! * [`cli`] is the command-line front end used by the `uusd` binary.
//!
//! ```
//! use uusd_ea::dp::{expected_runtime, StrengthDistribution};
//!
//! let rls = StrengthDistribution::one_point(3, 1).unwrap();
//! let t = expected_runtime(3, 1, &rls).unwrap();
//! assert!((t - 3.5).abs() < 1e-12);
//! ```

pub mod cli;
pub mod dp;
pub mod error;
pub mod experiments;
pub mod operators;
pub mod sepcmaes;
pub mod simulate;

pub use error::{Error, Result};
