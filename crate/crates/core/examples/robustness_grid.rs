//! Runs a small optimizer grid, writes JSON/CSV results and reports how
//! consistently the replicated runs agree.
//!
//! cargo run --release --example robustness_grid -- results/

use std::path::PathBuf;

use uusd_ea::experiments::{count_support, run_grid, write_grid, GridSpec, DEFAULT_SUPPORT_THRESHOLD};
use uusd_ea::sepcmaes::CmaConfig;

fn main() -> uusd_ea::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("uusd-grid"));
    let grid = GridSpec::new(vec![3, 5, 8], vec![1, 4, 16, 64, 1024], 20, 7);
    let cells = run_grid(&grid, &CmaConfig::default())?;
    write_grid(&out, &cells, DEFAULT_SUPPORT_THRESHOLD)?;

    println!("{:>3} {:>5} {:>10} {:>6} {:>10} {:>8}", "n", "l", "runtime", "good", "max std", "support");
    for c in &cells {
        println!(
            "{:>3} {:>5} {:>10.4} {:>6} {:>10.2e} {:>8}",
            c.n,
            c.lambda,
            c.best_runtime,
            format!("{}/{}", c.good_runs.len(), c.runs.len()),
            c.max_std,
            count_support(&c.mean_distribution()?, DEFAULT_SUPPORT_THRESHOLD)
        );
    }
    println!("\nresults written to {}", out.display());
    Ok(())
}
