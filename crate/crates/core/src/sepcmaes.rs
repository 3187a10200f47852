//! Separable CMA-ES over the simplex of strength distributions.
//!
//! The search space is `[0, 1]^n`, one coordinate per strength `k = 1..=n`
//! (strength 0 never helps on a noiseless problem and is fixed at zero).
//! A genotype is clamped to the box and normalized to a distribution
//! before evaluation, but the genotype itself is left untouched.
//! Candidates outside the box are ranked with an additional penalty
//! proportional to their distance from it, scaled by the spread of the
//! generation's objective values.
//!
//! The covariance is diagonal. Learning rates follow the usual separable
//! CMA-ES defaults: the full-covariance rates scaled by `(n + 1.5) / 3`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dp::{batch_expected_runtime, expected_runtime, StrengthDistribution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmaConfig {
    pub population_size: usize,
    pub initial_step: f64,
    /// Evaluation cap; `None` means `100 n^2`.
    pub budget: Option<u64>,
    pub seed: u64,
    pub tol_fun: f64,
    pub tol_x: f64,
    pub tol_sigma: f64,
}

impl Default for CmaConfig {
    fn default() -> Self {
        CmaConfig {
            population_size: 10,
            initial_step: 1.0,
            budget: None,
            seed: 0,
            tol_fun: 1e-15,
            tol_x: 1e-14,
            tol_sigma: 1e-14,
        }
    }
}

impl CmaConfig {
    pub fn with_seed(seed: u64) -> Self {
        CmaConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn budget_for(&self, n: usize) -> u64 {
        self.budget.unwrap_or(100 * (n as u64) * (n as u64))
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.population_size < 4 {
            return Err(Error::invalid("population size must be at least 4"));
        }
        if self.budget_for(n) < self.population_size as u64 {
            return Err(Error::invalid("budget is smaller than one generation"));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(Error::invalid("initial step size must be positive"));
        }
        if !(self.tol_fun > 0.0 && self.tol_x > 0.0 && self.tol_sigma > 0.0) {
            return Err(Error::invalid("tolerances must be positive"));
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    FlatFitness,
    TinyStep,
    TinyMove,
    Budget,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::FlatFitness => "flat_fitness",
            Termination::TinyStep => "tiny_step",
            Termination::TinyMove => "tiny_move",
            Termination::Budget => "budget",
        })
    }
}

/// Internal optimizer state.
#[derive(Debug, Clone, PartialEq)]
pub struct CmaState {
    pub mean: Vec<f64>,
    pub diag_var: Vec<f64>,
    pub sigma: f64,
    pub path_sigma: Vec<f64>,
    pub path_c: Vec<f64>,
    pub generation: u64,
    pub evals: u64,
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationRun {
    pub n: usize,
    pub lambda: u32,
    pub seed: u64,
    pub best_genotype: Vec<f64>,
    pub best_distribution: StrengthDistribution,
    pub best_runtime: f64,
    pub evals_used: u64,
    pub termination: Termination,
}

/// Maps a genotype (strengths `1..=n`) to a distribution over `0..=n`.
///
/// Returns `None` when every coordinate clamps to zero.
pub fn normalize_candidate(x: &[f64]) -> Option<StrengthDistribution> {
    let mut w = Vec::with_capacity(x.len() + 1);
    w.push(0.0);
    w.extend(x.iter().map(|v| v.clamp(0.0, 1.0)));
    let total: f64 = w.iter().sum();
    if total > 0.0 && !x.is_empty() {
        StrengthDistribution::normalized(w).ok()
    } else {
        None
    }
}

/// Objective value assigned to degenerate or never-finishing candidates.
pub fn degenerate_penalty(n: usize) -> f64 {
    10.0 * n as f64 * 2f64.powi(n as i32)
}

fn box_distance(x: &[f64]) -> f64 {
    x.iter().map(|v| (v - v.clamp(0.0, 1.0)).abs()).sum()
}

#[derive(Debug, Clone)]
struct Params {
    mu: usize,
    weights: Vec<f64>,
    mueff: f64,
    cs: f64,
    damps: f64,
    cc: f64,
    c1: f64,
    cmu: f64,
    chi_n: f64,
    flat_window: u64,
}

impl Params {
    fn new(dim: usize, pop: usize) -> Self {
        let nf = dim as f64;
        let mu = pop / 2;
        let raw: Vec<f64> = (0..mu)
            .map(|i| (mu as f64 + 0.5).ln() - ((i + 1) as f64).ln())
            .collect();
        let sum: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / sum).collect();
        let mueff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

        let cs = (mueff + 2.0) / (nf + mueff + 3.0);
        let damps = 1.0 + 2.0 * (((mueff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + cs;
        let cc = (4.0 + mueff / nf) / (nf + 4.0 + 2.0 * mueff / nf);
        let c1_full = 2.0 / ((nf + 1.3).powi(2) + mueff);
        let cmu_full =
            (1.0 - c1_full).min(2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nf + 2.0).powi(2) + mueff));
        let c1 = (c1_full * (nf + 1.5) / 3.0).min(1.0);
        let cmu = (cmu_full * (nf + 1.5) / 3.0).min(1.0 - c1);
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));
        let flat_window = 10 + (30 * dim).div_ceil(pop) as u64;
        Params {
            mu,
            weights,
            mueff,
            cs,
            damps,
            cc,
            c1,
            cmu,
            chi_n,
            flat_window,
        }
    }
}

#[derive(Debug, Clone)]
struct Best {
    genotype: Vec<f64>,
    distribution: StrengthDistribution,
    runtime: f64,
}

/// Step-wise separable CMA-ES minimizing the expected runtime for fixed `(n, lambda)`.
#[derive(Debug, Clone)]
pub struct SepCmaEs {
    n: usize,
    lambda: u32,
    config: CmaConfig,
    budget: u64,
    params: Params,
    state: CmaState,
    rng: ChaCha8Rng,
    best: Option<Best>,
    flat_generations: u64,
    last_move: f64,
    done: Option<Termination>,
}

impl SepCmaEs {
    pub fn new(n: usize, lambda: u32, config: CmaConfig) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if lambda == 0 {
            return Err(Error::invalid("population size must be at least 1"));
        }
        config.validate(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mean: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let state = CmaState {
            mean,
            diag_var: vec![1.0; n],
            sigma: config.initial_step,
            path_sigma: vec![0.0; n],
            path_c: vec![0.0; n],
            generation: 0,
            evals: 0,
        };
        Ok(SepCmaEs {
            n,
            lambda,
            budget: config.budget_for(n),
            params: Params::new(n, config.population_size),
            config,
            state,
            rng,
            best: None,
            flat_generations: 0,
            last_move: f64::INFINITY,
            done: None,
        })
    }

    pub fn state(&self) -> &CmaState {
        &self.state
    }

    /// Best expected runtime seen so far (`+inf` before any finite candidate).
    pub fn best_runtime(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.runtime)
    }

    pub fn termination(&self) -> Option<Termination> {
        self.done
    }

    /// Runs one generation. Returns the termination reason once the run is over.
    pub fn step(&mut self) -> Result<Option<Termination>> {
        if self.done.is_some() {
            return Ok(self.done);
        }
        let pop = self.config.population_size;
        if self.state.evals + pop as u64 > self.budget {
            self.done = Some(Termination::Budget);
            return Ok(self.done);
        }
        let dim = self.n;

        let std_dev: Vec<f64> = self.state.diag_var.iter().map(|v| v.sqrt()).collect();
        let mut zs = Vec::with_capacity(pop);
        let mut xs = Vec::with_capacity(pop);
        for _ in 0..pop {
            let z: Vec<f64> = (0..dim).map(|_| self.rng.sample(StandardNormal)).collect();
            let x: Vec<f64> = (0..dim)
                .map(|i| self.state.mean[i] + self.state.sigma * std_dev[i] * z[i])
                .collect();
            zs.push(z);
            xs.push(x);
        }

        let raw = self.evaluate(&xs)?;
        self.state.evals += pop as u64;

        let (lo, hi) = raw
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
        let spread = hi - lo;
        let fitness: Vec<f64> = raw
            .iter()
            .zip(&xs)
            .map(|(v, x)| v + spread * box_distance(x))
            .collect();

        let mut order: Vec<usize> = (0..pop).collect();
        order.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]));

        self.update(&order, &xs, &zs);

        if spread < self.config.tol_fun * (1.0 + lo.abs()) {
            self.flat_generations += 1;
        } else {
            self.flat_generations = 0;
        }
        Ok(self.check_stop())
    }

    fn evaluate(&mut self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        let penalty = degenerate_penalty(self.n);
        let candidates: Vec<Option<StrengthDistribution>> =
            xs.iter().map(|x| normalize_candidate(x)).collect();
        let valid: Vec<StrengthDistribution> = candidates.iter().flatten().cloned().collect();
        let runtimes = batch_expected_runtime(self.n, self.lambda, &valid)?;
        let mut runtimes = runtimes.into_iter();
        let mut raw = Vec::with_capacity(xs.len());
        for (x, cand) in xs.iter().zip(candidates) {
            let value = match cand {
                None => penalty,
                Some(d) => {
                    let t = runtimes.next().expect("one runtime per valid candidate");
                    if !t.is_finite() {
                        penalty
                    } else {
                        if t < self.best_runtime() {
                            self.best = Some(Best {
                                genotype: x.clone(),
                                distribution: d,
                                runtime: t,
                            });
                        }
                        t
                    }
                }
            };
            raw.push(value);
        }
        Ok(raw)
    }

    fn update(&mut self, order: &[usize], xs: &[Vec<f64>], zs: &[Vec<f64>]) {
        let p = &self.params;
        let s = &mut self.state;
        let dim = self.n;
        let old_mean = s.mean.clone();

        let mut zmean = vec![0.0; dim];
        let mut new_mean = vec![0.0; dim];
        let mut zsq = vec![0.0; dim];
        for (w, &idx) in p.weights.iter().zip(&order[..p.mu]) {
            for i in 0..dim {
                new_mean[i] += w * xs[idx][i];
                zmean[i] += w * zs[idx][i];
                zsq[i] += w * zs[idx][i] * zs[idx][i];
            }
        }
        s.mean = new_mean;
        s.generation += 1;

        let cs_fac = (p.cs * (2.0 - p.cs) * p.mueff).sqrt();
        for i in 0..dim {
            s.path_sigma[i] = (1.0 - p.cs) * s.path_sigma[i] + cs_fac * zmean[i];
        }
        let ps_norm = s.path_sigma.iter().map(|v| v * v).sum::<f64>().sqrt();
        let decay = 1.0 - (1.0 - p.cs).powf(2.0 * s.generation as f64);
        let hsig = ps_norm / decay.sqrt() / p.chi_n < 1.4 + 2.0 / (dim as f64 + 1.0);

        let cc_fac = if hsig {
            (p.cc * (2.0 - p.cc) * p.mueff).sqrt()
        } else {
            0.0
        };
        for i in 0..dim {
            s.path_c[i] =
                (1.0 - p.cc) * s.path_c[i] + cc_fac * (s.mean[i] - old_mean[i]) / s.sigma;
        }

        let keep = 1.0 - p.c1 - p.cmu
            + if hsig {
                0.0
            } else {
                p.c1 * p.cc * (2.0 - p.cc)
            };
        for i in 0..dim {
            let v = s.diag_var[i];
            let next = keep * v + p.c1 * s.path_c[i] * s.path_c[i] + p.cmu * v * zsq[i];
            s.diag_var[i] = next.max(f64::MIN_POSITIVE);
        }

        s.sigma *= ((p.cs / p.damps) * (ps_norm / p.chi_n - 1.0)).min(1.0).exp();

        let moved = s
            .mean
            .iter()
            .zip(&old_mean)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        self.last_move = moved;
    }

    fn check_stop(&mut self) -> Option<Termination> {
        let s = &self.state;
        let max_sd = s.diag_var.iter().map(|v| v.sqrt()).fold(0.0, f64::max);
        let reason = if self.flat_generations >= self.params.flat_window {
            Some(Termination::FlatFitness)
        } else if s.sigma * max_sd < self.config.tol_sigma {
            Some(Termination::TinyStep)
        } else if self.last_move < self.config.tol_x {
            Some(Termination::TinyMove)
        } else if s.evals + self.config.population_size as u64 > self.budget {
            Some(Termination::Budget)
        } else {
            None
        };
        self.done = reason;
        reason
    }

    /// Runs to termination and reports the best candidate.
    pub fn run(mut self) -> Result<OptimizationRun> {
        let termination = loop {
            if let Some(t) = self.step()? {
                break t;
            }
        };
        self.into_run(termination)
    }

    fn into_run(self, termination: Termination) -> Result<OptimizationRun> {
        let best = match self.best {
            Some(b) => b,
            None => {
                // every candidate was degenerate; report the uniform genotype
                let genotype = vec![1.0; self.n];
                let distribution =
                    normalize_candidate(&genotype).expect("uniform genotype is valid");
                Best {
                    runtime: f64::INFINITY,
                    genotype,
                    distribution,
                }
            }
        };
        let best_runtime = expected_runtime(self.n, self.lambda, &best.distribution)?;
        Ok(OptimizationRun {
            n: self.n,
            lambda: self.lambda,
            seed: self.config.seed,
            best_genotype: best.genotype,
            best_distribution: best.distribution,
            best_runtime,
            evals_used: self.state.evals,
            termination,
        })
    }
}

/// Minimizes the expected runtime over strength distributions for `(n, lambda)`.
pub fn optimize(n: usize, lambda: u32, config: &CmaConfig) -> Result<OptimizationRun> {
    SepCmaEs::new(n, lambda, config.clone())?.run()
}
