//! Monte Carlo execution of the (1+λ) EA on explicit bit strings.
//!
//! Each trial draws its own random stream from `(seed, trial index)`, so
//! estimates do not depend on how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dp::StrengthDistribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationEstimate {
    pub trials: u64,
    /// Mean number of generations.
    pub mean: f64,
    pub std_error: f64,
    /// Trials whose initial string was already optimal.
    pub hits_at_init: u64,
}

impl SimulationEstimate {
    /// Whether `value` lies within `z` standard errors of the mean.
    pub fn agrees_with(&self, value: f64, z: f64) -> bool {
        (self.mean - value).abs() <= z * self.std_error
    }
}

/// How the best offspring is picked among several with equal fitness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Earliest created offspring.
    #[default]
    First,
    /// Uniformly random among the tied offspring.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    /// Generations allowed per trial; `None` means `10^7 n`.
    pub generation_cap: Option<u64>,
    pub tie_break: TieBreak,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions {
            generation_cap: None,
            tie_break: TieBreak::First,
        }
    }
}

/// Estimates the expected runtime of `d` by running `trials` independent runs.
pub fn simulate_runtime(
    n: usize,
    lambda: u32,
    d: &StrengthDistribution,
    trials: u64,
    seed: u64,
) -> Result<SimulationEstimate> {
    simulate_runtime_with(n, lambda, d, trials, seed, &SimulationOptions::default())
}

pub fn simulate_runtime_with(
    n: usize,
    lambda: u32,
    d: &StrengthDistribution,
    trials: u64,
    seed: u64,
    options: &SimulationOptions,
) -> Result<SimulationEstimate> {
    if d.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: d.n(),
        });
    }
    if lambda == 0 {
        return Err(Error::invalid("population size must be at least 1"));
    }
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    let cap = options.generation_cap.unwrap_or(10_000_000 * n as u64);
    let sampler = StrengthSampler::new(d);

    let outcomes: Vec<Option<u64>> = (0..trials)
        .into_par_iter()
        .map(|trial| run_trial(n, lambda, &sampler, seed, trial, cap, options.tie_break))
        .collect();

    let mut sum = 0.0;
    let mut hits = 0;
    for (trial, out) in outcomes.iter().enumerate() {
        match out {
            None => {
                return Err(Error::CappedRun {
                    trial: trial as u64,
                    cap,
                })
            }
            Some(0) => hits += 1,
            Some(g) => sum += *g as f64,
        }
    }
    let count = trials as f64;
    let mean = sum / count;
    let std_error = if trials > 1 {
        let ss: f64 = outcomes
            .iter()
            .map(|g| {
                let dev = g.unwrap_or(0) as f64 - mean;
                dev * dev
            })
            .sum();
        (ss / (count - 1.0) / count).sqrt()
    } else {
        0.0
    };
    Ok(SimulationEstimate {
        trials,
        mean,
        std_error,
        hits_at_init: hits,
    })
}

/// Inverse-CDF sampler over strengths.
#[derive(Debug, Clone)]
struct StrengthSampler {
    cdf: Vec<f64>,
    last: usize,
}

impl StrengthSampler {
    fn new(d: &StrengthDistribution) -> Self {
        let mut acc = 0.0;
        let cdf: Vec<f64> = d
            .weights()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        let last = d
            .weights()
            .iter()
            .rposition(|w| *w > 0.0)
            .unwrap_or(0);
        StrengthSampler { cdf, last }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.cdf[self.cdf.len() - 1];
        self.cdf.partition_point(|c| *c <= u).min(self.last)
    }
}

/// Generations until an optimal string is evaluated, or `None` past `cap`.
fn run_trial(
    n: usize,
    lambda: u32,
    sampler: &StrengthSampler,
    seed: u64,
    trial: u64,
    cap: u64,
    tie_break: TieBreak,
) -> Option<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);

    let mut x: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
    let mut fitness = x.iter().filter(|b| **b).count();
    if fitness == n {
        return Some(0);
    }

    let mut positions: Vec<usize> = (0..n).collect();
    let mut best_flips: Vec<usize> = Vec::with_capacity(n);
    let mut generation = 0u64;
    loop {
        generation += 1;
        if generation > cap {
            return None;
        }
        let mut best: Option<usize> = None;
        let mut ties = 0u32;
        for _ in 0..lambda {
            let k = sampler.sample(&mut rng);
            // partial Fisher-Yates: positions[..k] is a uniform k-subset
            for t in 0..k {
                let j = rng.random_range(t..n);
                positions.swap(t, j);
            }
            let flipped = &positions[..k];
            let gained = flipped.iter().filter(|&&p| !x[p]).count();
            let child = fitness + gained - (k - gained);
            if child == n {
                return Some(generation);
            }
            let take = match best {
                None => {
                    ties = 1;
                    true
                }
                Some(b) if child > b => {
                    ties = 1;
                    true
                }
                Some(b) if child == b => {
                    ties += 1;
                    tie_break == TieBreak::Random && rng.random_range(0..ties) == 0
                }
                _ => false,
            };
            if take {
                best = Some(child);
                best_flips.clear();
                best_flips.extend_from_slice(flipped);
            }
        }
        if let Some(b) = best {
            if b >= fitness {
                for &p in &best_flips {
                    x[p] = !x[p];
                }
                fitness = b;
            }
        }
    }
}
