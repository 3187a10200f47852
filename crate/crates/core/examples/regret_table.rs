//! Regret of the standard operators against the tabulated optimal runtimes.
//!
//! The tabulated optima are rounded to two decimals, so ratios within a
//! fraction of a percent of 1 are ties rather than wins.
//!
//! cargo run --example regret_table -- 3

use uusd_ea::experiments::{compare_baselines, reference_optimal_runtime, REFERENCE_LAMBDAS};
use uusd_ea::operators::BaselineSpec;
use uusd_ea::Error;

fn main() -> uusd_ea::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3);
    let optimal = REFERENCE_LAMBDAS
        .iter()
        .map(|&l| reference_optimal_runtime(n, l))
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| Error::InvalidArgument(format!("no tabulated optima for n = {n}")))?;
    let specs = BaselineSpec::standard_catalog();
    let records = compare_baselines(n, &REFERENCE_LAMBDAS, &specs, &optimal)?;

    print!("{:<14}", "operator");
    for l in REFERENCE_LAMBDAS {
        print!("{l:>7}");
    }
    println!();
    for chunk in records.chunks(REFERENCE_LAMBDAS.len()) {
        print!("{:<14}", chunk[0].baseline.to_string());
        for r in chunk {
            print!("{:>7.3}", r.regret);
        }
        println!();
    }
    Ok(())
}
