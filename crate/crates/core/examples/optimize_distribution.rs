//! Searches for the best static strength distribution with separable CMA-ES.
//!
//! cargo run --release --example optimize_distribution -- 11 8

use uusd_ea::experiments::run_cell;
use uusd_ea::sepcmaes::CmaConfig;

fn main() -> uusd_ea::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().ok());
    let n = args.next().flatten().unwrap_or(11) as usize;
    let lambda = args.next().flatten().unwrap_or(8) as u32;

    let cell = run_cell(n, lambda, 10, 1, &CmaConfig::default())?;
    for run in &cell.runs {
        println!(
            "seed {:>20}  runtime {:.10}  evals {:>6}  stop {}",
            run.seed, run.best_runtime, run.evals_used, run.termination
        );
    }
    let best = cell.best_run();
    println!("\nbest expected runtime for n = {n}, lambda = {lambda}: {:.6}", best.best_runtime);
    for (k, p) in best.best_distribution.weights().iter().enumerate() {
        if *p > 1e-4 {
            println!("  P(k = {k:3}) = {p:.4}");
        }
    }
    Ok(())
}
