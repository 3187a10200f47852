//! Compares exact runtimes with bit-string simulation.
//!
//! cargo run --release --example monte_carlo_check

use uusd_ea::dp::expected_runtime;
use uusd_ea::operators::{make_baseline, BaselineSpec, Rate};
use uusd_ea::simulate::simulate_runtime;

fn main() -> uusd_ea::Result<()> {
    let cases = [
        (10, 1, BaselineSpec::RLS),
        (16, 4, BaselineSpec::FastGa(1.5)),
        (12, 8, BaselineSpec::Sbm(Rate::PerBit)),
        (8, 16, BaselineSpec::CondBinomial(Rate::Fixed(0.5))),
    ];
    for (n, lambda, spec) in cases {
        let d = make_baseline(&spec, n)?;
        let exact = expected_runtime(n, lambda, &d)?;
        let est = simulate_runtime(n, lambda, &d, 100_000, 42)?;
        let z = (est.mean - exact) / est.std_error;
        println!(
            "{:<12} n={n:<3} lambda={lambda:<3} exact {exact:9.4}  simulated {:9.4} +/- {:.4}  z = {z:+.2}",
            spec.to_string(),
            est.mean,
            est.std_error
        );
    }
    Ok(())
}
