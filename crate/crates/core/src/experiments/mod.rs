//! Seeded optimizer grids, robustness statistics, support counting and
//! baseline regret tables.

mod persist;
mod reference;

pub use persist::{
    cell_file_name, read_cell_json, read_runtimes_csv, write_cell_json, write_grid,
    write_regret_csv, write_runtimes_csv, write_support_csv, CellDocument, RunRecord,
    RuntimeRow,
};
pub use reference::{
    reference_optimal_runtime, REFERENCE_LAMBDAS, REFERENCE_NS, REFERENCE_RUNTIMES,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dp::{expected_runtime, StrengthDistribution};
use crate::error::{Error, Result};
use crate::operators::{make_baseline, BaselineSpec};
use crate::sepcmaes::{optimize, CmaConfig, OptimizationRun};

/// A run is "good" if its runtime is at most `best * (1 + GOOD_RUN_TOLERANCE)`.
pub const GOOD_RUN_TOLERANCE: f64 = 1e-9;

/// Default cutoff below which a probability counts as zero.
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub ns: Vec<usize>,
    pub lambdas: Vec<u32>,
    pub runs_per_cell: usize,
    pub base_seed: u64,
}

impl GridSpec {
    pub fn new(ns: Vec<usize>, lambdas: Vec<u32>, runs_per_cell: usize, base_seed: u64) -> Self {
        GridSpec {
            ns,
            lambdas,
            runs_per_cell,
            base_seed,
        }
    }

    /// The full published grid: 11 dimensions, 15 population sizes, 50 runs each.
    pub fn full(base_seed: u64) -> Self {
        GridSpec::new(
            REFERENCE_NS.to_vec(),
            REFERENCE_LAMBDAS.to_vec(),
            50,
            base_seed,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() || self.lambdas.is_empty() {
            return Err(Error::invalid("grid needs at least one n and one lambda"));
        }
        if self.runs_per_cell == 0 {
            return Err(Error::invalid("runs per cell must be at least 1"));
        }
        if self.ns.contains(&0) || self.lambdas.contains(&0) {
            return Err(Error::invalid("n and lambda must be positive"));
        }
        Ok(())
    }
}

/// Aggregated optimizer runs for one `(n, lambda)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub n: usize,
    pub lambda: u32,
    pub base_seed: u64,
    pub runs: Vec<OptimizationRun>,
    pub best_runtime: f64,
    pub good_runs: Vec<usize>,
    /// Mean of `P(k)` over good runs, `k = 1..=n`.
    pub per_k_mean: Vec<f64>,
    /// Population standard deviation of `P(k)` over good runs, `k = 1..=n`.
    pub per_k_std: Vec<f64>,
    pub max_std: f64,
}

impl CellResult {
    /// The mean distribution of the good runs.
    pub fn mean_distribution(&self) -> Result<StrengthDistribution> {
        mean_distribution(&self.per_k_mean)
    }

    pub fn best_run(&self) -> &OptimizationRun {
        self.runs
            .iter()
            .min_by(|a, b| a.best_runtime.total_cmp(&b.best_runtime))
            .expect("a cell has at least one run")
    }
}

pub(crate) fn mean_distribution(per_k_mean: &[f64]) -> Result<StrengthDistribution> {
    let mut w = Vec::with_capacity(per_k_mean.len() + 1);
    w.push(0.0);
    w.extend_from_slice(per_k_mean);
    StrengthDistribution::normalized(w)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of run `run` in cell `(n, lambda)`.
pub fn derive_seed(base_seed: u64, n: usize, lambda: u32, run: usize) -> u64 {
    let mut h = splitmix64(base_seed);
    for part in [n as u64, u64::from(lambda), run as u64] {
        h = splitmix64(h ^ part);
    }
    h
}

/// Summarizes the runs of one cell.
pub fn aggregate_cell(
    n: usize,
    lambda: u32,
    base_seed: u64,
    runs: Vec<OptimizationRun>,
) -> Result<CellResult> {
    if runs.is_empty() {
        return Err(Error::invalid("a cell needs at least one run"));
    }
    // re-evaluated through the DP, never the optimizer's cached value
    let runtimes = runs
        .iter()
        .map(|r| expected_runtime(n, lambda, &r.best_distribution))
        .collect::<Result<Vec<f64>>>()?;
    let best_runtime = runtimes.iter().copied().fold(f64::INFINITY, f64::min);
    let cutoff = best_runtime * (1.0 + GOOD_RUN_TOLERANCE);
    let good_runs: Vec<usize> = runtimes
        .iter()
        .enumerate()
        .filter(|(_, t)| **t <= cutoff)
        .map(|(i, _)| i)
        .collect();

    let count = good_runs.len() as f64;
    let mut per_k_mean = vec![0.0; n];
    let mut per_k_std = vec![0.0; n];
    for k in 1..=n {
        let vals = good_runs.iter().map(|&i| runs[i].best_distribution.weight(k));
        let mean = vals.clone().sum::<f64>() / count;
        let var = vals.map(|v| (v - mean) * (v - mean)).sum::<f64>() / count;
        per_k_mean[k - 1] = mean;
        per_k_std[k - 1] = var.sqrt();
    }
    let max_std = per_k_std.iter().copied().fold(0.0, f64::max);
    Ok(CellResult {
        n,
        lambda,
        base_seed,
        runs,
        best_runtime,
        good_runs,
        per_k_mean,
        per_k_std,
        max_std,
    })
}

/// Runs `runs` seeded optimizations for one cell.
pub fn run_cell(
    n: usize,
    lambda: u32,
    runs: usize,
    base_seed: u64,
    template: &CmaConfig,
) -> Result<CellResult> {
    let grid = GridSpec::new(vec![n], vec![lambda], runs, base_seed);
    Ok(run_grid(&grid, template)?.remove(0))
}

/// Runs every cell of `grid`; cells come back in `ns`-major order.
///
/// `template.seed` is ignored: each run's seed is derived from
/// `(grid.base_seed, n, lambda, run index)`.
pub fn run_grid(grid: &GridSpec, template: &CmaConfig) -> Result<Vec<CellResult>> {
    grid.validate()?;
    let cells: Vec<(usize, u32)> = grid
        .ns
        .iter()
        .flat_map(|&n| grid.lambdas.iter().map(move |&l| (n, l)))
        .collect();
    let jobs: Vec<(usize, u32, usize)> = cells
        .iter()
        .flat_map(|&(n, l)| (0..grid.runs_per_cell).map(move |r| (n, l, r)))
        .collect();

    let results: Vec<Result<OptimizationRun>> = jobs
        .par_iter()
        .map(|&(n, lambda, run)| {
            let config = CmaConfig {
                seed: derive_seed(grid.base_seed, n, lambda, run),
                ..template.clone()
            };
            optimize(n, lambda, &config)
        })
        .collect();

    let mut results = results.into_iter();
    cells
        .into_iter()
        .map(|(n, lambda)| {
            let runs = results
                .by_ref()
                .take(grid.runs_per_cell)
                .collect::<Result<Vec<_>>>()?;
            aggregate_cell(n, lambda, grid.base_seed, runs)
        })
        .collect()
}

/// Number of strengths `k >= 1` with probability above `threshold`.
pub fn count_support(d: &StrengthDistribution, threshold: f64) -> usize {
    d.weights()[1..].iter().filter(|w| **w > threshold).count()
}

/// Expected runtime of a baseline relative to the optimum at the same `(n, lambda)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretRecord {
    pub n: usize,
    pub lambda: u32,
    pub baseline: BaselineSpec,
    pub baseline_runtime: f64,
    pub optimal_runtime: f64,
    pub regret: f64,
}

/// Evaluates every baseline at every `lambda`; `optimal[i]` belongs to `lambdas[i]`.
///
/// Records are grouped by baseline, in the order of `specs`.
pub fn compare_baselines(
    n: usize,
    lambdas: &[u32],
    specs: &[BaselineSpec],
    optimal: &[f64],
) -> Result<Vec<RegretRecord>> {
    if lambdas.len() != optimal.len() {
        return Err(Error::invalid(format!(
            "{} population sizes but {} optimal runtimes",
            lambdas.len(),
            optimal.len()
        )));
    }
    let mut out = Vec::with_capacity(specs.len() * lambdas.len());
    for spec in specs {
        let d = make_baseline(spec, n)?;
        for (&lambda, &opt) in lambdas.iter().zip(optimal) {
            let runtime = expected_runtime(n, lambda, &d)?;
            let regret = if runtime.is_finite() {
                runtime / opt
            } else {
                f64::INFINITY
            };
            out.push(RegretRecord {
                n,
                lambda,
                baseline: *spec,
                baseline_runtime: runtime,
                optimal_runtime: opt,
                regret,
            });
        }
    }
    Ok(out)
}
