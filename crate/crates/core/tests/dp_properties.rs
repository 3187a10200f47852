use proptest::prelude::*;

use uusd_ea::dp::{
    batch_expected_runtime, build_kernel, expected_runtime, generation_distribution,
    offspring_distribution, runtime_profile, StrengthDistribution,
};
use uusd_ea::experiments::reference_optimal_runtime;

fn rls_closed_form(n: usize) -> f64 {
    let mut ln_fact = vec![0.0f64; n + 1];
    for i in 1..=n {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let mut total = 0.0;
    for f in 0..=n {
        let tail: f64 = (f..n).map(|m| n as f64 / (n - m) as f64).sum();
        let ln_c = ln_fact[n] - ln_fact[f] - ln_fact[n - f];
        total += (ln_c - n as f64 * std::f64::consts::LN_2).exp() * tail;
    }
    total
}

fn simplex(n: usize) -> impl Strategy<Value = StrengthDistribution> {
    prop::collection::vec(0.0f64..1.0, n).prop_filter_map("all zero", |raw| {
        let mut w = vec![0.0];
        w.extend(raw);
        StrengthDistribution::normalized(w).ok()
    })
}

fn case() -> impl Strategy<Value = (usize, usize, StrengthDistribution)> {
    (1usize..=24).prop_flat_map(|n| (Just(n), 0..=n, simplex(n)))
}

#[test]
fn rls_matches_closed_form() {
    for n in [1, 2, 3, 5, 8, 16, 23, 45, 100] {
        let d = StrengthDistribution::one_point(n, 1).unwrap();
        let t = expected_runtime(n, 1, &d).unwrap();
        let want = rls_closed_form(n);
        assert!((t - want).abs() <= 1e-9 * want, "n={n}: {t} vs {want}");
    }
}

#[test]
fn rls_at_one_hundred_bits() {
    let d = StrengthDistribution::one_point(100, 1).unwrap();
    let t = expected_runtime(100, 1, &d).unwrap();
    assert!((t - 449.42).abs() <= 0.01, "{t}");
    assert!((t - reference_optimal_runtime(100, 1).unwrap()).abs() <= 0.01);
}

#[test]
fn tabulated_distribution_reproduces_its_runtime() {
    // published optimum for n = 11, lambda = 8
    let mut w = vec![0.0; 12];
    w[1] = 0.8555;
    w[4] = 0.0530;
    w[10] = 0.0875;
    w[11] = 0.0040;
    let d = StrengthDistribution::normalized(w).unwrap();
    let t = expected_runtime(11, 8, &d).unwrap();
    assert!((t - 6.34).abs() <= 0.005, "{t}");
}

#[test]
fn unreachable_optimum_gives_infinite_runtime() {
    // flipping exactly two bits preserves parity of the distance to the optimum
    let d = StrengthDistribution::one_point(4, 2).unwrap();
    let p = runtime_profile(4, 3, &d).unwrap();
    assert!(p.t[3].is_infinite());
    assert!(p.expected.is_infinite());
    assert_eq!(p.t[4], 0.0);
}

#[test]
fn level_times_decrease_towards_the_optimum() {
    let d = StrengthDistribution::one_point(12, 1).unwrap();
    let p = runtime_profile(12, 4, &d).unwrap();
    assert!(p.t.windows(2).all(|w| w[0] > w[1]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn offspring_distribution_is_normalized((n, f, d) in case()) {
        let q = offspring_distribution(&build_kernel(n, f).unwrap(), &d).unwrap();
        let total: f64 = q.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(q.probs().iter().all(|&p| p >= 0.0));
        prop_assert_eq!(q.reference_fitness(), f);
    }

    #[test]
    fn single_offspring_generation_is_identity((n, f, d) in case()) {
        let q = offspring_distribution(&build_kernel(n, f).unwrap(), &d).unwrap();
        prop_assert_eq!(generation_distribution(&q, 1).unwrap(), q);
    }

    #[test]
    fn more_offspring_dominate((n, f, d) in case(), lambda in 1u32..64) {
        let q = offspring_distribution(&build_kernel(n, f).unwrap(), &d).unwrap();
        let a = generation_distribution(&q, lambda).unwrap();
        let b = generation_distribution(&q, lambda + 1).unwrap();
        let total: f64 = b.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        // upper tails can only grow with lambda
        let mut ta = 0.0;
        let mut tb = 0.0;
        for g in (f..=n).rev() {
            ta += a.prob(g);
            tb += b.prob(g);
            prop_assert!(tb >= ta - 1e-12);
        }
        prop_assert!(b.improvement_mass() >= a.improvement_mass() - 1e-15);
    }

    #[test]
    fn runtime_non_increasing_in_lambda((n, _f, d) in case(), lambda in 1u32..32) {
        let a = expected_runtime(n, lambda, &d).unwrap();
        let b = expected_runtime(n, lambda * 2, &d).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-12) || a.is_infinite());
    }

    #[test]
    fn batch_matches_sequential(ds in prop::collection::vec(simplex(8), 1..10), lambda in 1u32..20) {
        let batch = batch_expected_runtime(8, lambda, &ds).unwrap();
        for (d, b) in ds.iter().zip(&batch) {
            prop_assert_eq!(expected_runtime(8, lambda, d).unwrap().to_bits(), b.to_bits());
        }
    }
}
