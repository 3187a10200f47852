//! Command-line front end.
//!
//! ```text
//! uusd evaluate --n 3 --lambda 1 --dist onepoint:1
//! uusd optimize --n 11 --lambda 8 --runs 10 --seed 1 --out run.json
//! uusd grid --ns 3,5,8 --lambdas 1,2,4,8 --runs 50 --seed 1 --out results/
//! uusd simulate --n 8 --lambda 8 --dist fastga:1.5 --trials 100000 --seed 1
//! uusd compare --n 3 --lambdas 1,2,4,8 --optimal paper --out regret.csv
//! uusd support --cell results/cell_n11_lambda8.json --threshold 1e-4
//! ```
//!
//! Exit status: 0 on success, 2 on argument errors, 1 on runtime errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::dp::{expected_runtime, StrengthDistribution};
use crate::error::{Error, Result};
use crate::experiments::{
    self, compare_baselines, count_support, read_cell_json, read_runtimes_csv,
    reference_optimal_runtime, run_grid, write_grid, write_regret_csv, GridSpec, RegretRecord,
    RunRecord, DEFAULT_SUPPORT_THRESHOLD,
};
use crate::operators::{make_baseline, BaselineSpec};
use crate::sepcmaes::CmaConfig;
use crate::simulate::{simulate_runtime_with, SimulationOptions, TieBreak};

#[derive(Debug, Parser)]
#[command(
    name = "uusd",
    version,
    about = "Expected runtimes and optimal mutation-strength distributions of the (1+lambda) EA on OneMax"
)]
pub struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact expected runtime of a distribution.
    Evaluate(EvaluateArgs),
    /// Search for the optimal distribution with seeded separable CMA-ES runs.
    Optimize(OptimizeArgs),
    /// Optimize every (n, lambda) cell of a grid and write JSON/CSV results.
    Grid(GridArgs),
    /// Monte Carlo estimate of the expected runtime.
    Simulate(SimulateArgs),
    /// Regret of baseline operators against optimal runtimes.
    Compare(CompareArgs),
    /// Count the strengths with non-negligible probability in a result file.
    Support(SupportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DistSource {
    /// Operator spec: rls, onepoint:K, sbm:P, sbm>0:P, sbm0to1:P, fastga:B, pow:B, binpos:P (P may be `auto` = 1/n).
    #[arg(long)]
    pub dist: Option<String>,
    /// JSON file with {"n": N, "weights": [w0, ..., wN]}.
    #[arg(long)]
    pub dist_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub lambda: u32,
    #[command(flatten)]
    pub source: DistSource,
    /// Decimal places; full precision when omitted.
    #[arg(long)]
    pub precision: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args, Clone)]
pub struct OptimizerArgs {
    /// Evaluation budget per run (default 100 n^2).
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long, default_value_t = 10)]
    pub popsize: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma0: f64,
}

impl OptimizerArgs {
    fn template(&self) -> CmaConfig {
        CmaConfig {
            population_size: self.popsize,
            initial_step: self.sigma0,
            budget: self.budget,
            ..CmaConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub lambda: u32,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub ns: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub lambdas: Vec<u32>,
    #[arg(long, default_value_t = 50)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Probability cutoff for support.csv.
    #[arg(long, default_value_t = DEFAULT_SUPPORT_THRESHOLD)]
    pub threshold: f64,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TieBreakArg {
    First,
    Random,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub lambda: u32,
    #[command(flatten)]
    pub source: DistSource,
    #[arg(long)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = TieBreakArg::First)]
    pub tie_break: TieBreakArg,
    /// Generations allowed per trial (default 10^7 n).
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimalSource {
    /// Optimize the grid (or read it from --grid-dir).
    Grid,
    /// Published reference table.
    Paper,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub lambdas: Vec<u32>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "rls,sbm:auto,sbm>0:auto,sbm0to1:auto,fastga:1.3,fastga:1.5,fastga:1.7,pow:1.3,pow:1.5,pow:1.7"
    )]
    pub baselines: Vec<String>,
    #[arg(long, value_enum, default_value_t = OptimalSource::Grid)]
    pub optimal: OptimalSource,
    /// Directory written by `grid`; its runtimes.csv supplies the optima.
    #[arg(long)]
    pub grid_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Args)]
pub struct SupportArgs {
    /// Cell document from `grid` or run document from `optimize`.
    #[arg(long)]
    pub cell: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SUPPORT_THRESHOLD)]
    pub threshold: f64,
}

/// Document written by `optimize --out`; also readable as a distribution file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeDocument {
    pub n: usize,
    pub lambda: u32,
    pub base_seed: u64,
    pub runtime: f64,
    pub weights: Vec<f64>,
    pub runs: Vec<RunRecord>,
}

/// Entry point used by the binary; returns the process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    match run(&cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_argument_error() {
                2
            } else {
                1
            }
        }
    }
}

/// Executes a parsed command, writing human-readable output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::invalid("--threads must be positive"));
        }
        // a second call in the same process keeps the existing pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match &cli.command {
        Command::Evaluate(a) => evaluate(a, out),
        Command::Optimize(a) => optimize_cmd(a, out),
        Command::Grid(a) => grid_cmd(a, out),
        Command::Simulate(a) => simulate_cmd(a, out),
        Command::Compare(a) => compare_cmd(a, out),
        Command::Support(a) => support_cmd(a, out),
    }
}

fn w(out: &mut dyn Write, text: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(text)
        .map_err(|e| Error::io("<stdout>", e))
}

fn check_n_lambda(n: usize, lambda: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("--n must be at least 1"));
    }
    if lambda == 0 {
        return Err(Error::invalid("--lambda must be at least 1"));
    }
    Ok(())
}

/// Reads a `{"n", "weights"}` document; other fields are ignored.
pub fn load_distribution_file(path: &Path) -> Result<StrengthDistribution> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        if e.is_data() {
            Error::invalid(format!("{}: {e}", path.display()))
        } else {
            Error::Json(e)
        }
    })
}

fn resolve_distribution(n: usize, source: &DistSource) -> Result<StrengthDistribution> {
    let d = match (&source.dist, &source.dist_file) {
        (Some(spec), _) => make_baseline(&spec.parse()?, n)?,
        (None, Some(path)) => load_distribution_file(path)?,
        (None, None) => return Err(Error::invalid("one of --dist or --dist-file is required")),
    };
    if d.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: d.n(),
        });
    }
    Ok(d)
}

fn format_value(v: f64, precision: Option<usize>) -> String {
    match precision {
        Some(p) => format!("{v:.p$}"),
        None => format!("{v}"),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn evaluate(a: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    check_n_lambda(a.n, a.lambda)?;
    let d = resolve_distribution(a.n, &a.source)?;
    let t = expected_runtime(a.n, a.lambda, &d)?;
    match a.format {
        Format::Csv => w(out, format_args!("{}\n", format_value(t, a.precision))),
        Format::Json => w(
            out,
            format_args!(
                "{}\n",
                serde_json::json!({"n": a.n, "lambda": a.lambda, "runtime": t})
            ),
        ),
    }
}

fn optimize_cmd(a: &OptimizeArgs, out: &mut dyn Write) -> Result<()> {
    check_n_lambda(a.n, a.lambda)?;
    if a.runs == 0 {
        return Err(Error::invalid("--runs must be at least 1"));
    }
    let template = a.optimizer.template();
    w(out, format_args!("seed: {}\n", a.seed))?;
    let cell = experiments::run_cell(a.n, a.lambda, a.runs, a.seed, &template)?;
    for (i, r) in cell.runs.iter().enumerate() {
        w(
            out,
            format_args!(
                "run {i}: seed={} runtime={} evals={} termination={}\n",
                r.seed, r.best_runtime, r.evals_used, r.termination
            ),
        )?;
    }
    let best = cell.best_run();
    w(out, format_args!("best runtime: {}\n", best.best_runtime))?;
    w(out, format_args!("weights:"))?;
    for (k, p) in best.best_distribution.weights().iter().enumerate().skip(1) {
        if *p > 0.0 {
            w(out, format_args!(" {k}:{p:.6}"))?;
        }
    }
    w(out, format_args!("\n"))?;

    if let Some(path) = &a.out {
        let doc = OptimizeDocument {
            n: a.n,
            lambda: a.lambda,
            base_seed: a.seed,
            runtime: best.best_runtime,
            weights: best.best_distribution.weights().to_vec(),
            runs: experiments::CellDocument::from(&cell).runs,
        };
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        write_text(path, &text)?;
    }
    Ok(())
}

fn grid_cmd(a: &GridArgs, out: &mut dyn Write) -> Result<()> {
    if a.threshold.is_nan() || a.threshold <= 0.0 {
        return Err(Error::invalid("--threshold must be positive"));
    }
    let grid = GridSpec::new(a.ns.clone(), a.lambdas.clone(), a.runs, a.seed);
    grid.validate()?;
    w(out, format_args!("seed: {}\n", a.seed))?;
    let cells = run_grid(&grid, &a.optimizer.template())?;
    write_grid(&a.out, &cells, a.threshold)?;
    for c in &cells {
        let support = count_support(&c.mean_distribution()?, a.threshold);
        w(
            out,
            format_args!(
                "n={:<4} lambda={:<5} runtime={:.2} good={}/{} max_std={:.2e} support={}\n",
                c.n,
                c.lambda,
                c.best_runtime,
                c.good_runs.len(),
                c.runs.len(),
                c.max_std,
                support
            ),
        )?;
    }
    Ok(())
}

fn simulate_cmd(a: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    check_n_lambda(a.n, a.lambda)?;
    let d = resolve_distribution(a.n, &a.source)?;
    let options = SimulationOptions {
        generation_cap: a.cap,
        tie_break: match a.tie_break {
            TieBreakArg::First => TieBreak::First,
            TieBreakArg::Random => TieBreak::Random,
        },
    };
    let est = simulate_runtime_with(a.n, a.lambda, &d, a.trials, a.seed, &options)?;
    match a.format {
        Format::Csv => w(
            out,
            format_args!(
                "seed: {}\nmean: {}\nstd_error: {}\ntrials: {}\nhits_at_init: {}\n",
                a.seed, est.mean, est.std_error, est.trials, est.hits_at_init
            ),
        ),
        Format::Json => w(
            out,
            format_args!(
                "{}\n",
                serde_json::json!({
                    "seed": a.seed,
                    "mean": est.mean,
                    "std_error": est.std_error,
                    "trials": est.trials,
                    "hits_at_init": est.hits_at_init,
                })
            ),
        ),
    }
}

fn optimal_runtimes(a: &CompareArgs, out: &mut dyn Write) -> Result<Vec<f64>> {
    match a.optimal {
        OptimalSource::Paper => a
            .lambdas
            .iter()
            .map(|&l| {
                reference_optimal_runtime(a.n, l).ok_or_else(|| {
                    Error::invalid(format!("no reference runtime for n = {}, lambda = {l}", a.n))
                })
            })
            .collect(),
        OptimalSource::Grid => match &a.grid_dir {
            Some(dir) => {
                let rows = read_runtimes_csv(&dir.join("runtimes.csv"))?;
                a.lambdas
                    .iter()
                    .map(|&l| {
                        rows.iter()
                            .find(|r| r.n == a.n && r.lambda == l)
                            .map(|r| r.best_runtime)
                            .ok_or_else(|| {
                                Error::invalid(format!(
                                    "{} has no cell n = {}, lambda = {l}",
                                    dir.display(),
                                    a.n
                                ))
                            })
                    })
                    .collect()
            }
            None => {
                w(out, format_args!("seed: {}\n", a.seed))?;
                let grid = GridSpec::new(vec![a.n], a.lambdas.clone(), a.runs, a.seed);
                Ok(run_grid(&grid, &a.optimizer.template())?
                    .iter()
                    .map(|c| c.best_runtime)
                    .collect())
            }
        },
    }
}

fn compare_cmd(a: &CompareArgs, out: &mut dyn Write) -> Result<()> {
    if a.n == 0 || a.lambdas.contains(&0) {
        return Err(Error::invalid("n and every lambda must be positive"));
    }
    let specs = a
        .baselines
        .iter()
        .map(|s| s.parse())
        .collect::<Result<Vec<BaselineSpec>>>()?;
    let optimal = optimal_runtimes(a, out)?;
    let records = compare_baselines(a.n, &a.lambdas, &specs, &optimal)?;
    for r in &records {
        w(
            out,
            format_args!(
                "{:<12} lambda={:<5} runtime={:.2} optimal={:.2} regret={:.4}\n",
                r.baseline.to_string(),
                r.lambda,
                r.baseline_runtime,
                r.optimal_runtime,
                r.regret
            ),
        )?;
    }
    if let Some(path) = &a.out {
        match a.format {
            Format::Csv => write_regret_csv(path, &records)?,
            Format::Json => {
                let mut text = serde_json::to_string_pretty::<Vec<RegretRecord>>(&records)?;
                text.push('\n');
                write_text(path, &text)?;
            }
        }
    }
    Ok(())
}

fn support_cmd(a: &SupportArgs, out: &mut dyn Write) -> Result<()> {
    if a.threshold.is_nan() || a.threshold <= 0.0 {
        return Err(Error::invalid("--threshold must be positive"));
    }
    let text = fs::read_to_string(&a.cell).map_err(|e| Error::io(&a.cell, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let d = if value.get("per_k_mean").is_some() {
        read_cell_json(&a.cell)?.mean_distribution()?
    } else {
        load_distribution_file(&a.cell)?
    };
    w(out, format_args!("{}\n", count_support(&d, a.threshold)))
}

