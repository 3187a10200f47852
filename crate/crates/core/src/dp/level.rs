use super::kernel::TransitionKernel;
use super::strength::StrengthDistribution;
use crate::error::{Error, Result};

/// Distribution over fitness levels `f..=n` reached from a parent of fitness `f`.
///
/// Produced either for a single offspring ([`offspring_distribution`]) or
/// for the best of a whole generation ([`generation_distribution`]).
/// Non-improving outcomes are folded into level `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelDistribution {
    f: usize,
    // q[g - f]
    q: Vec<f64>,
    // sum over g > f, kept separately to avoid 1 - q[f] cancellation
    improvement: f64,
}

impl LevelDistribution {
    pub fn reference_fitness(&self) -> usize {
        self.f
    }

    /// Highest level (the dimension `n`).
    pub fn top(&self) -> usize {
        self.f + self.q.len() - 1
    }

    /// Probability of level `g`, zero outside `f..=n`.
    pub fn prob(&self, g: usize) -> f64 {
        if g < self.f {
            return 0.0;
        }
        self.q.get(g - self.f).copied().unwrap_or(0.0)
    }

    /// Probabilities for `g = f..=n`.
    pub fn probs(&self) -> &[f64] {
        &self.q
    }

    /// Total probability of ending strictly above `f`.
    pub fn improvement_mass(&self) -> f64 {
        self.improvement
    }
}

/// Fitness distribution of one offspring produced by `d` from a parent of
/// the kernel's fitness.
pub fn offspring_distribution(
    kernel: &TransitionKernel,
    d: &StrengthDistribution,
) -> Result<LevelDistribution> {
    let n = kernel.n();
    if d.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: d.n(),
        });
    }
    let f = kernel.parent_fitness();
    let mut q = vec![0.0; n - f + 1];
    let weights = d.weights();
    for (k, &w) in weights.iter().enumerate().skip(1) {
        if w == 0.0 {
            continue;
        }
        let row = kernel.row(k);
        for g in f + 1..=n {
            q[g - f] += w * row[g];
        }
    }
    let improvement: f64 = q[1..].iter().rev().sum();
    q[0] = (1.0 - improvement).max(0.0);
    Ok(LevelDistribution { f, q, improvement })
}

/// Distribution of the best of `lambda` independent offspring, where the
/// parent's level absorbs everything that is not an improvement.
pub fn generation_distribution(q1: &LevelDistribution, lambda: u32) -> Result<LevelDistribution> {
    if lambda == 0 {
        return Err(Error::invalid("population size must be at least 1"));
    }
    if lambda == 1 {
        return Ok(q1.clone());
    }
    let lam = f64::from(lambda);
    let len = q1.q.len();
    // ln_cum[i] = lambda * ln P(single offspring lands at level <= f + i),
    // computed from the upper tail to keep precision when the tail is small.
    let mut ln_cum = vec![0.0; len];
    let mut tail = 0.0f64;
    for i in (0..len).rev() {
        ln_cum[i] = lam * (-tail.clamp(0.0, 1.0)).ln_1p();
        if i > 0 {
            tail += q1.q[i];
        }
    }
    let mut q = vec![0.0; len];
    q[0] = ln_cum[0].exp();
    for i in 1..len {
        let hi = ln_cum[i];
        if hi == f64::NEG_INFINITY {
            continue;
        }
        // c_i^lambda - c_{i-1}^lambda
        q[i] = hi.exp() * -(ln_cum[i - 1] - hi).exp_m1();
    }
    let improvement = -ln_cum[0].exp_m1();
    Ok(LevelDistribution {
        f: q1.f,
        q,
        improvement,
    })
}
