//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use uusd_ea::dp::{
    batch_expected_runtime, build_kernel, expected_runtime, generation_distribution,
    offspring_distribution, StrengthDistribution,
};
use uusd_ea::experiments::{
    compare_baselines, reference_optimal_runtime, run_cell, run_grid, write_grid, CellResult,
    GridSpec, DEFAULT_SUPPORT_THRESHOLD,
};
use uusd_ea::operators::{make_baseline, BaselineSpec, Rate};
use uusd_ea::sepcmaes::CmaConfig;
use uusd_ea::simulate::simulate_runtime;

const DESK_NS: [usize; 5] = [3, 5, 8, 11, 16];
const DESK_LAMBDAS: [u32; 5] = [1, 2, 4, 8, 16];
const BASE_SEED: u64 = 20_240_601;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn within(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure(
        (got - want).abs() <= tol,
        format!("{label}: got {got}, want {want} +/- {tol}"),
    )
}

fn rls_closed_form(n: usize) -> f64 {
    // sum over start levels of the coupon-collector tail, weighted by the binomial start
    let mut ln_fact = vec![0.0f64; n + 1];
    for i in 1..=n {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let mut tail = vec![0.0f64; n + 1];
    for f in (0..n).rev() {
        tail[f] = tail[f + 1] + n as f64 / (n - f) as f64;
    }
    (0..=n)
        .map(|f| {
            let ln_c = ln_fact[n] - ln_fact[f] - ln_fact[n - f];
            (ln_c - n as f64 * std::f64::consts::LN_2).exp() * tail[f]
        })
        .sum()
}

fn criterion_1() -> Check {
    let rls3 = StrengthDistribution::one_point(3, 1).map_err(|e| e.to_string())?;
    let t3 = expected_runtime(3, 1, &rls3).map_err(|e| e.to_string())?;
    within("n=3 dp", t3, 3.5, 1e-12)?;
    within("n=3 closed form", rls_closed_form(3), 3.5, 1e-12)?;
    within("n=3 table", t3, reference_optimal_runtime(3, 1).unwrap(), 0.005)?;
    let rls16 = StrengthDistribution::one_point(16, 1).map_err(|e| e.to_string())?;
    let t16 = expected_runtime(16, 1, &rls16).map_err(|e| e.to_string())?;
    within("n=16", t16, 43.00, 0.005)?;
    within("n=16 closed form", t16, rls_closed_form(16), 1e-9)?;
    Ok(format!("T(3,1) = {t3}, T(16,1) = {t16:.6}"))
}

fn criterion_2() -> Check {
    let d = make_baseline(&BaselineSpec::CondBinomial(Rate::Fixed(0.5)), 3).map_err(|e| e.to_string())?;
    let t64 = expected_runtime(3, 64, &d).map_err(|e| e.to_string())?;
    let t1024 = expected_runtime(3, 1024, &d).map_err(|e| e.to_string())?;
    within("lambda=64", t64, 0.88, 0.005)?;
    within("lambda=1024", t1024, 0.875, 1e-3)?;
    Ok(format!("T(3,64) = {t64:.6}, T(3,1024) = {t1024:.6}"))
}

fn criterion_3(cells: &[CellResult]) -> Check {
    let mut worst: f64 = 0.0;
    for c in cells {
        let want = reference_optimal_runtime(c.n, c.lambda).unwrap();
        within(&format!("n={} lambda={}", c.n, c.lambda), c.best_runtime, want, 0.01)?;
        worst = worst.max((c.best_runtime - want).abs());
    }
    Ok(format!("{} cells, max deviation {worst:.4}", cells.len()))
}

fn criterion_4(cells: &[CellResult], config: &CmaConfig) -> Check {
    let find = |n: usize, l: u32| cells.iter().find(|c| c.n == n && c.lambda == l);
    let mut w16 = Vec::new();
    for l in 1..=4u32 {
        let owned;
        let cell = match find(16, l) {
            Some(c) => c,
            None => {
                owned = run_cell(16, l, 10, BASE_SEED, config).map_err(|e| e.to_string())?;
                &owned
            }
        };
        let w1 = cell.best_run().best_distribution.weight(1);
        ensure(w1 >= 0.999, format!("n=16 lambda={l}: weights[1] = {w1}"))?;
        w16.push(w1);
    }
    let c11 = find(11, 4).unwrap().best_run().best_distribution.clone();
    within("n=11 lambda=4 weights[1]", c11.weight(1), 0.9919, 2e-3)?;
    within("n=11 lambda=4 weights[10]", c11.weight(10), 0.0081, 2e-3)?;
    let c3 = run_cell(3, 64, 10, BASE_SEED, config).map_err(|e| e.to_string())?;
    let w3 = c3.best_run().best_distribution.clone();
    for (k, want) in [(1, 3.0 / 7.0), (2, 3.0 / 7.0), (3, 1.0 / 7.0)] {
        within(&format!("n=3 lambda=64 weights[{k}]"), w3.weight(k), want, 1e-3)?;
    }
    Ok(format!(
        "n=16 min weights[1] = {:.6}; n=11 (w1, w10) = ({:.4}, {:.4}); n=3 = ({:.4}, {:.4}, {:.4})",
        w16.iter().cloned().fold(1.0, f64::min),
        c11.weight(1),
        c11.weight(10),
        w3.weight(1),
        w3.weight(2),
        w3.weight(3)
    ))
}

fn criterion_5(config: &CmaConfig) -> Check {
    let c64 = run_cell(3, 64, 50, BASE_SEED, config).map_err(|e| e.to_string())?;
    let c1024 = run_cell(3, 1024, 50, BASE_SEED, config).map_err(|e| e.to_string())?;
    ensure(
        c64.max_std < 1e-4,
        format!("lambda=64 max std {} not below 1e-4", c64.max_std),
    )?;
    ensure(
        c1024.max_std > 0.05,
        format!("lambda=1024 max std {} not above 0.05", c1024.max_std),
    )?;
    for &i in &c1024.good_runs {
        within("lambda=1024 good run", c1024.runs[i].best_runtime, 0.875, 1e-9)?;
    }
    Ok(format!(
        "max std {:.2e} (lambda=64, {} good), {:.3} (lambda=1024, {} good)",
        c64.max_std,
        c64.good_runs.len(),
        c1024.max_std,
        c1024.good_runs.len()
    ))
}

fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> StrengthDistribution {
    let mut w = vec![0.0];
    w.extend((0..n).map(|_| -> f64 { Exp1.sample(rng) }));
    StrengthDistribution::normalized(w).unwrap()
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED);
    let mut agree = 0;
    let mut cases = 0;
    let mut misses = Vec::new();
    while cases < 20 {
        let n = rng.random_range(1..=16usize);
        let lambda = rng.random_range(1..=16u32);
        let d = random_simplex(&mut rng, n);
        let exact = expected_runtime(n, lambda, &d).map_err(|e| e.to_string())?;
        if !exact.is_finite() {
            continue;
        }
        let est = simulate_runtime(n, lambda, &d, 100_000, rng.random())
            .map_err(|e| e.to_string())?;
        cases += 1;
        if est.agrees_with(exact, 3.0) {
            agree += 1;
        } else {
            misses.push(format!("(n={n}, lambda={lambda}) z = {:.2}", (est.mean - exact) / est.std_error));
        }
    }
    ensure(agree >= 19, format!("only {agree}/20 within 3 SE: {misses:?}"))?;
    Ok(format!("{agree}/20 within 3 standard errors"))
}

fn criterion_7(config: &CmaConfig) -> Check {
    let lambdas: Vec<u32> = (1..=8).chain([16, 32, 64, 128, 256, 512, 1024]).collect();
    let grid = GridSpec::new(vec![3], lambdas.clone(), 10, BASE_SEED);
    let cells = run_grid(&grid, config).map_err(|e| e.to_string())?;
    let optimal: Vec<f64> = cells.iter().map(|c| c.best_runtime).collect();
    let records = compare_baselines(3, &lambdas, &BaselineSpec::standard_catalog(), &optimal)
        .map_err(|e| e.to_string())?;
    for r in &records {
        ensure(
            r.regret >= 1.0 - 1e-9,
            format!("{} at lambda={}: regret {}", r.baseline, r.lambda, r.regret),
        )?;
    }
    let rls: Vec<(u32, f64)> = records
        .iter()
        .filter(|r| r.baseline == BaselineSpec::RLS)
        .map(|r| (r.lambda, r.regret))
        .collect();
    let large: Vec<&(u32, f64)> = rls.iter().filter(|(l, _)| *l >= 8).collect();
    let last = rls.last().unwrap().1;
    // once both runtimes saturate in double precision the ratio can only stay put
    for pair in large.windows(2) {
        let saturated = last - pair[0].1 <= 1e-12 * last;
        let ok = if saturated {
            pair[1].1 >= pair[0].1
        } else {
            pair[1].1 > pair[0].1
        };
        ensure(
            ok,
            format!("RLS regret not increasing: {:?} then {:?}", pair[0], pair[1]),
        )?;
    }
    within("RLS regret at 1024", last, 12.0 / 7.0, 0.01 * 12.0 / 7.0)?;
    Ok(format!(
        "{} records, RLS regret at lambda=1024 = {last:.4}",
        records.len()
    ))
}

fn criterion_8(cells: &[CellResult], config: &CmaConfig) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED ^ 8);

    // kernel rows against explicit enumeration of flip sets
    for n in 1..=12usize {
        for f in 0..=n {
            let kernel = build_kernel(n, f).map_err(|e| e.to_string())?;
            let mut counts = vec![vec![0u64; n + 1]; n + 1];
            for mask in 0u32..(1 << n) {
                let k = mask.count_ones() as usize;
                // parent has ones in the lowest f positions
                let flipped_ones = (mask & ((1u32 << f) - 1)).count_ones() as usize;
                let g = f - flipped_ones + (k - flipped_ones);
                counts[k][g] += 1;
            }
            for k in 0..=n {
                let row = kernel.row(k);
                let total: u64 = counts[k].iter().sum();
                within(&format!("row sum n={n} f={f} k={k}"), row.iter().sum(), 1.0, 1e-12)?;
                for g in 0..=n {
                    let want = counts[k][g] as f64 / total as f64;
                    within(&format!("S n={n} f={f} k={k} g={g}"), row[g], want, 1e-12)?;
                }
            }
        }
    }

    // lambda = 1 leaves the offspring distribution untouched
    for _ in 0..50 {
        let n = rng.random_range(1..=20usize);
        let f = rng.random_range(0..=n);
        let d = random_simplex(&mut rng, n);
        let q1 = offspring_distribution(&build_kernel(n, f).unwrap(), &d).map_err(|e| e.to_string())?;
        let same = generation_distribution(&q1, 1).map_err(|e| e.to_string())?;
        ensure(same == q1, format!("lambda=1 changed distribution at n={n} f={f}"))?;
    }

    // batch evaluation matches one-at-a-time evaluation bit for bit
    let ds: Vec<StrengthDistribution> = (0..10).map(|_| random_simplex(&mut rng, 8)).collect();
    let batch = batch_expected_runtime(8, 8, &ds).map_err(|e| e.to_string())?;
    for (d, b) in ds.iter().zip(&batch) {
        let single = expected_runtime(8, 8, d).map_err(|e| e.to_string())?;
        ensure(
            single.to_bits() == b.to_bits(),
            format!("batch {b} vs sequential {single}"),
        )?;
    }

    // optimal runtime non-increasing in lambda
    for n in DESK_NS {
        let row: Vec<&CellResult> = cells.iter().filter(|c| c.n == n).collect();
        for pair in row.windows(2) {
            ensure(
                pair[1].best_runtime <= pair[0].best_runtime + 1e-9,
                format!(
                    "n={n}: T(lambda={}) = {} > T(lambda={}) = {}",
                    pair[1].lambda, pair[1].best_runtime, pair[0].lambda, pair[0].best_runtime
                ),
            )?;
        }
    }

    // grid reruns are byte-identical
    let grid = GridSpec::new(vec![3, 5], vec![2, 4], 3, BASE_SEED);
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let cells = run_grid(&grid, config).map_err(|e| e.to_string())?;
        write_grid(dir.path(), &cells, DEFAULT_SUPPORT_THRESHOLD).map_err(|e| e.to_string())?;
    }
    let mut names: Vec<_> = fs::read_dir(dirs[0].path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    for name in &names {
        let a = fs::read(dirs[0].path().join(name)).unwrap();
        let b = fs::read(dirs[1].path().join(name)).map_err(|e| format!("{name:?}: {e}"))?;
        ensure(a == b, format!("{name:?} differs between reruns"))?;
    }
    Ok(format!(
        "kernels n<=12, lambda=1 identity, batch equality, monotone optima, {} identical files",
        names.len()
    ))
}

fn main() -> ExitCode {
    let config = CmaConfig::default();
    let start = Instant::now();
    let desk = GridSpec::new(DESK_NS.to_vec(), DESK_LAMBDAS.to_vec(), 10, BASE_SEED);
    let desk_cells = run_grid(&desk, &config);

    let mut failed = 0;
    let mut report = |id: u32, title: &str, outcome: Check, t: Instant| {
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {id} PASS [{title}] {msg} ({secs:.1}s)"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id} FAIL [{title}] {msg} ({secs:.1}s)");
            }
        }
    };

    let t = Instant::now();
    report(1, "exact DP value", criterion_1(), t);
    let t = Instant::now();
    report(2, "random-search limit", criterion_2(), t);
    match &desk_cells {
        Ok(cells) => {
            report(3, "desk-scale runtime table", criterion_3(cells), start);
            let t = Instant::now();
            report(4, "optimal distribution shapes", criterion_4(cells, &config), t);
        }
        Err(e) => {
            report(3, "desk-scale runtime table", Err(e.to_string()), start);
            report(4, "optimal distribution shapes", Err(e.to_string()), start);
        }
    }
    let t = Instant::now();
    report(5, "robustness phase change", criterion_5(&config), t);
    let t = Instant::now();
    report(6, "DP vs simulation", criterion_6(), t);
    let t = Instant::now();
    report(7, "regret anchors", criterion_7(&config), t);
    let t = Instant::now();
    let outcome = match &desk_cells {
        Ok(cells) => criterion_8(cells, &config),
        Err(e) => Err(e.to_string()),
    };
    report(8, "property suites", outcome, t);

    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
