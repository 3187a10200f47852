use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a validated distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Tolerance accepted when reading weights back from text.
pub const FILE_MASS_TOLERANCE: f64 = 1e-9;

/// Probability distribution over mutation strengths `0..=n`.
///
/// `weights()[k]` is the probability that an offspring is created by
/// flipping exactly `k` distinct, uniformly chosen bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionFile", into = "DistributionFile")]
pub struct StrengthDistribution {
    weights: Vec<f64>,
}

/// On-disk form: `{"n": 3, "weights": [w0, w1, w2, w3]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionFile {
    pub n: usize,
    pub weights: Vec<f64>,
}

impl StrengthDistribution {
    /// Validates `weights` (length `n + 1`, non-negative, total mass 1).
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::check_shape(&weights)?;
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::invalid(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(StrengthDistribution { weights })
    }

    /// Divides non-negative `weights` by their sum.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        Self::check_shape(&weights)?;
        let total: f64 = weights.iter().sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::invalid("weights have no positive mass"));
        }
        for w in &mut weights {
            *w /= total;
        }
        Ok(StrengthDistribution { weights })
    }

    /// Accepts weights whose mass is 1 within `tolerance`, then renormalizes them.
    pub fn with_tolerance(weights: Vec<f64>, tolerance: f64) -> Result<Self> {
        Self::check_shape(&weights)?;
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tolerance {
            return Err(Error::invalid(format!(
                "weights sum to {total}, expected 1 within {tolerance:e}"
            )));
        }
        Self::normalized(weights)
    }

    /// All mass on strength `k`.
    pub fn one_point(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if k > n {
            return Err(Error::invalid(format!("strength {k} exceeds n = {n}")));
        }
        let mut weights = vec![0.0; n + 1];
        weights[k] = 1.0;
        Ok(StrengthDistribution { weights })
    }

    fn check_shape(weights: &[f64]) -> Result<()> {
        if weights.len() < 2 {
            return Err(Error::invalid(
                "a strength distribution needs weights for k = 0..=n with n >= 1",
            ));
        }
        if let Some((k, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
        {
            return Err(Error::invalid(format!("weight[{k}] = {w} is not a probability")));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights.get(k).copied().unwrap_or(0.0)
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    /// Mean strength.
    pub fn mean(&self) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(k, w)| k as f64 * w)
            .sum()
    }
}

impl TryFrom<DistributionFile> for StrengthDistribution {
    type Error = Error;

    fn try_from(file: DistributionFile) -> Result<Self> {
        if file.weights.len() != file.n + 1 {
            return Err(Error::invalid(format!(
                "n = {} needs {} weights, found {}",
                file.n,
                file.n + 1,
                file.weights.len()
            )));
        }
        StrengthDistribution::with_tolerance(file.weights, FILE_MASS_TOLERANCE)
    }
}

impl From<StrengthDistribution> for DistributionFile {
    fn from(d: StrengthDistribution) -> Self {
        DistributionFile {
            n: d.n(),
            weights: d.weights,
        }
    }
}
