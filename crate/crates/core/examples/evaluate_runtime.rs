//! Exact expected runtime of a few distributions, with per-level times.
//!
//! cargo run --example evaluate_runtime

use uusd_ea::dp::{expected_runtime, runtime_profile, StrengthDistribution};

fn main() -> uusd_ea::Result<()> {
    let rls = StrengthDistribution::one_point(3, 1)?;
    println!("RLS, n = 3, lambda = 1: {}", expected_runtime(3, 1, &rls)?);

    // a hand-made distribution over strengths 1..=3
    let mixed = StrengthDistribution::new(vec![0.0, 3.0 / 7.0, 3.0 / 7.0, 1.0 / 7.0])?;
    for lambda in [1, 8, 64, 1024] {
        println!("mixed, n = 3, lambda = {lambda:4}: {:.6}", expected_runtime(3, lambda, &mixed)?);
    }

    let profile = runtime_profile(16, 4, &StrengthDistribution::one_point(16, 1)?)?;
    println!("\nRLS, n = 16, lambda = 4: {:.4} generations", profile.expected);
    for (f, t) in profile.t.iter().enumerate() {
        println!("  from fitness {f:2}: {t:.4}");
    }
    Ok(())
}
