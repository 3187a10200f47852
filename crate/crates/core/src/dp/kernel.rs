use super::binomial::LnFactorials;
use crate::error::{Error, Result};

/// Offspring-fitness probabilities for a parent of fitness `f`.
///
/// `prob(k, g)` is the probability that flipping `k` distinct, uniformly
/// chosen bits of a parent with `f` one-bits yields an offspring with `g`
/// one-bits. Flipping `j` zero-bits and `i = k - j` one-bits gives
/// `g = f + j - i`, so the entry is the hypergeometric mass
/// `C(n - f, j) C(f, i) / C(n, k)`.
#[derive(Debug, Clone)]
pub struct TransitionKernel {
    n: usize,
    f: usize,
    // row-major, (n + 1) x (n + 1), indexed [k][g]
    s: Vec<f64>,
}

/// Builds the kernel for dimension `n` and parent fitness `f`.
pub fn build_kernel(n: usize, f: usize) -> Result<TransitionKernel> {
    if n == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if f > n {
        return Err(Error::invalid(format!("fitness {f} exceeds n = {n}")));
    }
    Ok(TransitionKernel::with_table(&LnFactorials::new(n), n, f))
}

impl TransitionKernel {
    /// Builds the kernel reusing a precomputed factorial table (`table.max() >= n`).
    pub(crate) fn with_table(table: &LnFactorials, n: usize, f: usize) -> Self {
        debug_assert!(table.max() >= n && f <= n);
        let width = n + 1;
        let zeros = n - f;
        let mut s = vec![0.0; width * width];
        for k in 0..=n {
            let ln_total = table.ln_choose(n, k);
            let row = &mut s[k * width..(k + 1) * width];
            // j zero-bits flipped; needs j <= n - f and i = k - j <= f
            let j_lo = k.saturating_sub(f);
            let j_hi = k.min(zeros);
            for j in j_lo..=j_hi {
                let i = k - j;
                let g = f + j - i;
                row[g] = (table.ln_choose(zeros, j) + table.ln_choose(f, i) - ln_total).exp();
            }
        }
        TransitionKernel { n, f, s }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parent_fitness(&self) -> usize {
        self.f
    }

    /// Probability of offspring fitness `g` when flipping `k` bits.
    pub fn prob(&self, k: usize, g: usize) -> f64 {
        if k > self.n || g > self.n {
            return 0.0;
        }
        self.s[k * (self.n + 1) + g]
    }

    /// Row `k`, indexed by offspring fitness.
    pub fn row(&self, k: usize) -> &[f64] {
        let w = self.n + 1;
        &self.s[k * w..(k + 1) * w]
    }
}
