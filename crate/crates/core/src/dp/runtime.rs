use super::binomial::LnFactorials;
use super::kernel::TransitionKernel;
use super::level::{generation_distribution, offspring_distribution};
use super::strength::StrengthDistribution;
use crate::error::{Error, Result};

/// Escape probabilities below this are rounding noise; the level is absorbing.
pub const ABSORBING_THRESHOLD: f64 = 1e-15;

/// Expected remaining generations from every fitness level.
#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeProfile {
    pub n: usize,
    pub lambda: u32,
    /// `t[f]`: expected generations until the optimum is evaluated, starting at fitness `f`.
    pub t: Vec<f64>,
    /// `t` averaged over a uniformly random initial string.
    pub expected: f64,
}

impl RuntimeProfile {
    pub fn is_finite(&self) -> bool {
        self.expected.is_finite()
    }
}

/// Computes `T_f` for all `f`, walking down from the optimum.
pub fn runtime_profile(n: usize, lambda: u32, d: &StrengthDistribution) -> Result<RuntimeProfile> {
    let mut profiles = batch_runtime_profiles(n, lambda, std::slice::from_ref(d))?;
    Ok(profiles.pop().expect("one profile per candidate"))
}

/// Expected runtime (in generations) from a uniformly random start.
pub fn expected_runtime(n: usize, lambda: u32, d: &StrengthDistribution) -> Result<f64> {
    runtime_profile(n, lambda, d).map(|p| p.expected)
}

/// Expected runtimes for several candidates, building each level's kernel once.
///
/// Values are identical to calling [`expected_runtime`] on each candidate.
pub fn batch_expected_runtime(
    n: usize,
    lambda: u32,
    ds: &[StrengthDistribution],
) -> Result<Vec<f64>> {
    Ok(batch_runtime_profiles(n, lambda, ds)?
        .into_iter()
        .map(|p| p.expected)
        .collect())
}

/// Runtime profiles for several candidates sharing `n` and `lambda`.
pub fn batch_runtime_profiles(
    n: usize,
    lambda: u32,
    ds: &[StrengthDistribution],
) -> Result<Vec<RuntimeProfile>> {
    if n == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if lambda == 0 {
        return Err(Error::invalid("population size must be at least 1"));
    }
    if let Some(bad) = ds.iter().find(|d| d.n() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.n(),
        });
    }

    let table = LnFactorials::new(n);
    let mut ts = vec![vec![0.0; n + 1]; ds.len()];
    for f in (0..n).rev() {
        let kernel = TransitionKernel::with_table(&table, n, f);
        for (d, t) in ds.iter().zip(ts.iter_mut()) {
            t[f] = level_time(&kernel, d, lambda, t)?;
        }
        // kernel dropped here, before the next level is built
    }

    let ln_half_n = n as f64 * std::f64::consts::LN_2;
    let init: Vec<f64> = (0..=n)
        .map(|f| (table.ln_choose(n, f) - ln_half_n).exp())
        .collect();
    Ok(ts
        .into_iter()
        .map(|t| {
            let expected = init
                .iter()
                .zip(&t)
                .map(|(w, tf)| if tf.is_infinite() { f64::INFINITY } else { w * tf })
                .sum();
            RuntimeProfile {
                n,
                lambda,
                t,
                expected,
            }
        })
        .collect())
}

/// `T_f = (1 + sum_{g > f} Q_g T_g) / (1 - Q_f)` given `t[g]` for `g > f`.
fn level_time(
    kernel: &TransitionKernel,
    d: &StrengthDistribution,
    lambda: u32,
    t: &[f64],
) -> Result<f64> {
    let f = kernel.parent_fitness();
    let q1 = offspring_distribution(kernel, d)?;
    let q = generation_distribution(&q1, lambda)?;
    let escape = q.improvement_mass();
    if escape < ABSORBING_THRESHOLD {
        return Ok(f64::INFINITY);
    }
    let mut acc = 1.0;
    for (g, &p) in q.probs().iter().enumerate().skip(1) {
        if p > 0.0 {
            acc += p * t[f + g];
        }
    }
    Ok(acc / escape)
}
