//! Exact expected runtime of the (1+λ) EA on OneMax for a static
//! mutation-strength distribution.
//!
//! The state of the algorithm is the parent's fitness. For each parent
//! fitness `f` (from `n - 1` down to `0`) we build the transition kernel,
//! derive the single-offspring and best-of-λ level distributions, and
//! solve for the expected remaining time `T_f` from the already known
//! `T_g`, `g > f`. The whole evaluation is `O(n^3)` time and `O(n^2)`
//! memory, and the per-level kernel is shared by every candidate in a batch.

mod binomial;
mod kernel;
mod level;
mod runtime;
mod strength;

pub use binomial::{binomial_pmf, LnFactorials};
pub use kernel::{build_kernel, TransitionKernel};
pub use level::{generation_distribution, offspring_distribution, LevelDistribution};
pub use runtime::{
    batch_expected_runtime, batch_runtime_profiles, expected_runtime, runtime_profile,
    RuntimeProfile, ABSORBING_THRESHOLD,
};
pub use strength::{DistributionFile, StrengthDistribution, FILE_MASS_TOLERANCE, MASS_TOLERANCE};
