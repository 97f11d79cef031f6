//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Criteria that need a dataset which is not present print
//! `FAIL (dataset missing)`; they do not make the run exit non-zero unless
//! `FREQSPEC_STRICT=1` is set. Any other failure does.

mod common;

use std::time::Instant;

use common::*;
use freqspec::isotonic::pava_decreasing;
use freqspec::report::{canonical_json, to_json, EstimateReport, RunKind};
use freqspec::spectrum::{compare_spectra, sigma_grid};
use freqspec::{
    estimate_spectrum, exact_spectrum, path_estimate_lattice, randomize_marginals, SpectrumQuery,
    SpectrumResult, TransactionDatabase, WeightedPoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Missing(String),
}

use Outcome::*;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

fn unbiasedness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for _ in 0..25 {
        let rows = random_rows(&mut rng, 1..=16, 1..=5, 0.6);
        let db = TransactionDatabase::from_rows(rows.clone()).unwrap();
        let exact = exact_spectrum(&db, 1, u64::MAX, true).unwrap();
        for sigma in 1..=rows.len() {
            let expectation: f64 = enumerate_paths(&rows, sigma)
                .iter()
                .map(|(p, d)| p * path_estimate_lattice(d))
                .sum();
            let want = brute_force_count(&rows, sigma);
            if exact.count(sigma as u32) != Some(want) {
                return Fail(format!("enumerator disagrees with brute force at sigma={sigma}"));
            }
            worst = worst.max((expectation - want as f64).abs());
            checked += 1;
        }
    }
    check(worst <= 1e-9, format!("25 databases, {checked} thresholds, max |E[est] - count| = {worst:.2e}"))
}

fn zero_variance() -> Outcome {
    let db = TransactionDatabase::from_rows((0..8).map(|r| if r < 4 { vec![1u64, 2] } else { vec![] })).unwrap();
    let r = estimate_spectrum(&db, &SpectrumQuery::new(2, 2, 1000, 7)).unwrap();
    let all_four = r.points.iter().all(|p| p.estimate == 4.0);
    let flat = r.curve.levels().iter().all(|&v| v == 4.0);
    check(all_four && flat, format!("1000 paths all 4.0: {all_four}, curve constant 4.0: {flat}"))
}

fn pava() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let random_points = |rng: &mut ChaCha8Rng, n: usize| -> Vec<WeightedPoint> {
        (0..n)
            .map(|i| WeightedPoint::new(i as f64, rng.gen_range(0.0..1000.0), rng.gen_range(0.1..10.0)))
            .collect()
    };
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=10);
        let pts = random_points(&mut rng, n);
        let got = pava_decreasing(&pts).unwrap();
        for (a, b) in got.levels().iter().zip(exhaustive_decreasing_fit(&pts)) {
            worst = worst.max((a - b).abs());
        }
    }
    let mut violations = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=60);
        let pts = random_points(&mut rng, n);
        let fit = pava_decreasing(&pts).unwrap();
        let lv = fit.levels();
        let monotone = lv.windows(2).all(|w| w[0] >= w[1]);
        let refit: Vec<WeightedPoint> = pts.iter().zip(lv).map(|(p, &v)| WeightedPoint::new(p.x, v, p.w)).collect();
        let idempotent = pava_decreasing(&refit).unwrap().levels() == lv;
        // weighted mean is preserved inside every block of equal fitted values
        let mut means_ok = true;
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j < n && lv[j] == lv[i] {
                j += 1;
            }
            let w: f64 = pts[i..j].iter().map(|p| p.w).sum();
            let m = pts[i..j].iter().map(|p| p.w * p.y).sum::<f64>() / w;
            means_ok &= (m - lv[i]).abs() <= 1e-9 * m.abs().max(1.0);
            i = j;
        }
        if !(monotone && idempotent && means_ok) {
            violations += 1;
        }
    }
    check(
        worst <= 1e-9 && violations == 0,
        format!("oracle max diff {worst:.2e} over 1000 instances; {violations} property violations in 10000"),
    )
}

fn mushroom_tracking() -> Outcome {
    let db = match load_dataset("mushroom") {
        Ok(db) => db,
        Err(e) => return Missing(e),
    };
    let exact = exact_spectrum(&db, 1000, 50_000_000, true).unwrap();
    let grid = sigma_grid(1000.0, 4000.0, 50);
    let mut medians = Vec::new();
    for seed in 0..5 {
        let r = estimate_spectrum(&db, &SpectrumQuery::new(1000, 4000, 5000, seed)).unwrap();
        medians.push(compare_spectra(&r.curve, &exact, &grid).median().unwrap());
    }
    let good = medians.iter().filter(|&&m| m <= 0.5).count();
    let shown: Vec<String> = medians.iter().map(|m| format!("{m:.3}")).collect();
    check(good >= 4, format!("median log10 error per seed [{}], {good}/5 <= 0.5", shown.join(", ")))
}

fn mammals_curves(seed: u64, db: &TransactionDatabase) -> SpectrumResult {
    estimate_spectrum(db, &SpectrumQuery::new(1, 1000, 5000, seed)).unwrap()
}

fn mammals_magnitudes() -> Outcome {
    let db = match load_dataset("mammals") {
        Ok(db) => db,
        Err(e) => return Missing(e),
    };
    let (mut at1000, mut at500) = (0.0, 0.0);
    for seed in 0..5 {
        let r = mammals_curves(seed, &db);
        at1000 += r.curve.evaluate(1000.0).max(1.0).log10() / 5.0;
        at500 += r.curve.evaluate(500.0).max(1.0).log10() / 5.0;
    }
    check(
        (2.0..=4.0).contains(&at1000) && (5.0..=7.0).contains(&at500),
        format!("mean log10 curve(1000) = {at1000:.2}, curve(500) = {at500:.2}"),
    )
}

fn performance() -> Vec<(&'static str, Outcome)> {
    let mut out = Vec::new();
    for (name, budget) in [("chess", 10.0), ("mammals", 3.0)] {
        let outcome = match load_dataset(name) {
            Err(e) => Missing(e),
            Ok(db) => {
                let q = SpectrumQuery::defaults_for(&db, 0);
                let start = Instant::now();
                single_threaded(|| estimate_spectrum(&db, &q).unwrap());
                let secs = start.elapsed().as_secs_f64();
                check(secs <= budget, format!("{secs:.3} s single-threaded (budget {budget} s)"))
            }
        };
        out.push((name, outcome));
    }
    out
}

fn baseline_separation() -> Outcome {
    let db = match load_dataset("mammals") {
        Ok(db) => db,
        Err(e) => return Missing(e),
    };
    let mut lines = Vec::new();
    let mut all = true;
    for seed in 0..5 {
        let real = mammals_curves(seed, &db).curve.evaluate(500.0);
        let base = mammals_curves(seed, &randomize_marginals(&db, seed)).curve.evaluate(500.0);
        all &= base < real;
        lines.push(format!("{base:.3e}<{real:.3e}"));
    }
    check(all, lines.join(" "))
}

fn determinism() -> Outcome {
    let db = match load_dataset("mushroom") {
        Ok(db) => db,
        Err(e) => return Missing(e),
    };
    let q = SpectrumQuery::new(1000, 4000, 5000, 42);
    let many = std::thread::available_parallelism().map_or(1, |n| n.get()).max(4);
    let json = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let r = pool.install(|| estimate_spectrum(&db, &q).unwrap());
        canonical_json(&to_json(&EstimateReport::new(&r, RunKind::Estimate, None, None)).unwrap()).unwrap()
    };
    let (a, b) = (json(1), json(many));
    check(a == b, format!("1 vs {many} threads, {} bytes, identical: {}", a.len(), a == b))
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = vec![
        ("unbiasedness by exhaustion", unbiasedness()),
        ("zero-variance fixture", zero_variance()),
        ("pava oracle equivalence", pava()),
        ("mushroom estimate tracks exact", mushroom_tracking()),
        ("mammals magnitudes", mammals_magnitudes()),
    ];
    for (name, o) in performance() {
        results.push((if name == "chess" { "performance: chess" } else { "performance: mammals" }, o));
    }
    results.push(("baseline separation (mammals)", baseline_separation()));
    results.push(("determinism across thread counts", determinism()));

    let strict = std::env::var("FREQSPEC_STRICT").is_ok_and(|v| v == "1");
    let mut hard_failures = 0;
    for (name, outcome) in &results {
        match outcome {
            Pass(d) => println!("PASS  {name}: {d}"),
            Fail(d) => {
                hard_failures += 1;
                println!("FAIL  {name}: {d}");
            }
            Missing(d) => {
                if strict {
                    hard_failures += 1;
                }
                println!("FAIL  {name}: {d}");
            }
        }
    }
    let passed = results.iter().filter(|(_, o)| matches!(o, Pass(_))).count();
    println!("{passed}/{} criteria passed", results.len());
    if hard_failures > 0 {
        std::process::exit(1);
    }
}
