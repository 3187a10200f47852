//! Expected runtimes of the standard mutation operators across population sizes.
//!
//! cargo run --example baseline_catalog -- 16

use uusd_ea::dp::expected_runtime;
use uusd_ea::operators::{make_baseline, BaselineSpec};

fn main() -> uusd_ea::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(16);
    let lambdas = [1u32, 2, 4, 8, 16, 64];

    print!("{:<14}", "operator");
    for l in lambdas {
        print!("{:>10}", format!("l={l}"));
    }
    println!();
    for spec in BaselineSpec::standard_catalog() {
        let d = make_baseline(&spec, n)?;
        print!("{:<14}", spec.to_string());
        for l in lambdas {
            print!("{:>10.2}", expected_runtime(n, l, &d)?);
        }
        println!("   mean strength {:.3}", d.mean());
    }
    Ok(())
}
