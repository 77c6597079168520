//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs with `cargo test --test zz_acceptance`.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use intconv::cf::intermediates;
use intconv::exact::{is_unimodular, RawPair};
use intconv::farey::{
    chi, cumulative_expected_count, enumerate_farey, expected_chi, farey_neighbors, row_sum_exact, row_sum_formula,
    ChiValue,
};
use intconv::harness::{self, run, sample_stream, ExperimentConfig, ExperimentKind, Params, ResultRow, RowIndex, Value};
use intconv::stats::{
    gauss_kuzmin_prob, khinchin_levy_constant, levels_per_log, log_series, mq_growth_constant, ratio_to_f64,
    SeriesStart, WeightFunction,
};

const SEED: u64 = 42;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn config(kind: ExperimentKind, samples: u64, params: Params) -> ExperimentConfig {
    ExperimentConfig::new(kind, samples, SEED)
        .with_params(params)
        .with_threads(threads())
}

fn stat_values(rows: &[ResultRow], param: u64, stat: &str) -> Vec<f64> {
    rows.iter()
        .filter(|r| r.param == param && r.stat == stat && r.index != RowIndex::Pooled)
        .map(|r| r.value.to_f64())
        .collect()
}

fn pooled(rows: &[ResultRow], param: u64, stat: &str) -> f64 {
    rows.iter()
        .find(|r| r.param == param && r.stat == stat && r.index == RowIndex::Pooled)
        .map(|r| r.value.to_f64())
        .expect("pooled row present")
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn median(v: &[f64]) -> f64 {
    harness::summarize(0, String::new(), v).median
}

fn c1_triple_equality() -> Outcome {
    let start = Instant::now();
    let qs = vec![100, 500, 2000];
    let mut cases = 0;
    for g in [WeightFunction::Harmonic, WeightFunction::Unit] {
        let params = Params {
            q: qs.clone(),
            weight: Some(g.clone()),
            ..Params::default()
        };
        match run(&config(ExperimentKind::Mq, 200, params)) {
            Ok(rows) => {
                let agree: Vec<&ResultRow> = rows.iter().filter(|r| r.stat == "methods_agree").collect();
                if agree.len() != 600 || agree.iter().any(|r| r.value != Value::Int(1)) {
                    return outcome(false, format!("methods_agree rows wrong for {g}"));
                }
                cases += agree.len();
            }
            Err(e) => return outcome(false, format!("{g}: {e}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        secs < 300.0,
        format!("{cases} (sample, Q, g) cases agree exactly in {secs:.1}s (target < 300s)"),
    )
}

fn c2_chi_equivalence() -> Outcome {
    let fractions: Vec<_> = enumerate_farey(100).collect();
    let mismatches: usize = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let mut x = sample_stream(SEED, i, 256).expect("valid bits");
            let listed: std::collections::HashSet<_> = intermediates(&mut x, 100)
                .expect("irrational sample")
                .items
                .into_iter()
                .map(|it| it.fraction)
                .collect();
            fractions
                .iter()
                .filter(|b| {
                    let one = chi(b, &mut x).expect("comparison resolves") == ChiValue::One;
                    one != listed.contains(*b)
                })
                .count()
        })
        .sum();
    outcome(
        mismatches == 0,
        format!("{mismatches} mismatches over 1000 samples x {} fractions", fractions.len()),
    )
}

fn c3_farey_exactness() -> Outcome {
    let mut bad = 0;
    let mut total = 0;
    for beta in enumerate_farey(500).skip(1) {
        total += 1;
        let pair = farey_neighbors(&beta).expect("height above 1");
        let b = RawPair::from(&beta);
        let lo = RawPair::from(&pair.lower);
        let hi = RawPair::new(
            BigInt::from(pair.upper.numer().clone()),
            pair.upper.denom().clone(),
        )
        .expect("positive height");
        if !is_unimodular(&lo, &b) || !is_unimodular(&b, &hi) || expected_chi(&beta) != pair.width() {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{bad} failures among {total} fractions of F_500 (zero class has no neighbors)"))
}

fn c4_row_formula() -> Outcome {
    let spot = row_sum_exact(5) == BigRational::new(5.into(), 6.into());
    let worst = (10..=2000u64)
        .into_par_iter()
        .map(|q| (row_sum_formula(q) / ratio_to_f64(&row_sum_exact(q)) - 1.0).abs())
        .reduce(|| 0.0, f64::max);
    outcome(
        spot && worst <= 0.05,
        format!("max |formula/exact - 1| = {worst:.5} over 10..=2000; row(5) = 5/6: {spot}"),
    )
}

fn c5_levy() -> Outcome {
    let rows = run(&config(ExperimentKind::Levy, 500, Params { n: vec![100], ..Params::default() })).expect("levy run");
    let med = median(&stat_values(&rows, 100, "levy_stat"));
    let target = khinchin_levy_constant();
    let rel = (med / target - 1.0).abs();
    outcome(rel <= 0.02, format!("median log q_n / n = {med:.5}, target {target:.6}, rel err {rel:.4}"))
}

fn c6_gauss_kuzmin() -> Outcome {
    let params = Params {
        n: vec![100],
        k: vec![1, 2, 3],
        ..Params::default()
    };
    let rows = run(&config(ExperimentKind::GaussKuzmin, 500, params)).expect("gauss_kuzmin run");
    let trials = 500.0 * 100.0;
    let mut pass = true;
    let mut parts = Vec::new();
    for k in 1..=3u64 {
        let count: f64 = stat_values(&rows, k, "count").iter().sum();
        let freq = count / trials;
        let p = gauss_kuzmin_prob(k);
        let z = (freq - p) / (p * (1.0 - p) / trials).sqrt();
        pass &= z.abs() <= 3.0;
        parts.push(format!("k={k}: {freq:.5} vs {p:.5} (z={z:+.2})"));
    }
    outcome(pass, parts.join("; "))
}

fn c7_levels() -> Outcome {
    let rows = run(&config(ExperimentKind::Nq, 500, Params { q: vec![1_000_000], ..Params::default() })).expect("nq run");
    let m = mean(&stat_values(&rows, 1_000_000, "N_over_logQ"));
    let target = levels_per_log();
    let rel = (m / target - 1.0).abs();
    let n_mean = mean(&stat_values(&rows, 1_000_000, "N"));
    let offset = n_mean - target * 1e6f64.ln();
    outcome(
        rel <= 0.05,
        format!("mean N/log Q = {m:.5}, target {target:.6}, rel err {rel:.4} (mean N - target log Q = {offset:+.3})"),
    )
}

fn c8_mq_headline() -> Outcome {
    let params = Params {
        q: vec![1_000_000],
        weight: Some(WeightFunction::Harmonic),
        ..Params::default()
    };
    let rows = run(&config(ExperimentKind::Mq, 500, params)).expect("mq run");
    let m = mean(&stat_values(&rows, 1_000_000, "M_over_logQ"));
    let series = log_series(&WeightFunction::Harmonic, SeriesStart::One, None).expect("summable");
    let target = 12.0 / (PI * PI) * series;
    let rel = (m / target - 1.0).abs();
    let rate = mq_growth_constant(&WeightFunction::Harmonic).expect("summable");
    outcome(
        rel <= 0.05,
        format!(
            "mean M_Q/log Q = {m:.5}, target {target:.6} (series {series:.10}), rel err {rel:.4}; \
             level-sum rate {rate:.6}, rel err {:.4}",
            (m / rate - 1.0).abs()
        ),
    )
}

fn c9_variance() -> Outcome {
    let params = Params {
        n: vec![100],
        m: vec![2, 5, 10],
        ..Params::default()
    };
    let rows = run(&config(ExperimentKind::Variance, 2000, params)).expect("variance run");
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [2, 5, 10] {
        let r = pooled(&rows, m, "var_over_mean");
        pass &= r <= 10.0;
        parts.push(format!("m={m}: {r:.4}"));
    }
    outcome(pass, format!("Var/Mean {}", parts.join(", ")))
}

fn c10_pairdep() -> Outcome {
    let params = Params {
        n: vec![1],
        k: vec![5, 10],
        ..Params::default()
    };
    let rows = run(&config(ExperimentKind::Pairdep, 100_000, params)).expect("pairdep run");
    let mut worst: f64 = 0.0;
    for k in [5, 10] {
        for r in 1..=2 {
            for s in 1..=2 {
                worst = worst.max(pooled(&rows, k, &format!("diff_{r}_{s}")).abs());
            }
        }
    }
    outcome(worst <= 0.01, format!("max |joint - product| = {worst:.5} over r, s in {{1, 2}}, k in {{5, 10}}"))
}

fn c11_cumulative() -> Outcome {
    let spots = [(2, 1, 1), (3, 2, 1), (4, 8, 3)]
        .iter()
        .all(|&(q, p, d)| cumulative_expected_count(q).0 == BigRational::new(p.into(), d.into()));
    let (exact, scale) = cumulative_expected_count(2000);
    let ratio = ratio_to_f64(&exact) / scale;
    outcome(
        spots && (0.8..=1.2).contains(&ratio),
        format!("ratio at Q=2000 = {ratio:.5}; spot values 1, 2, 8/3: {spots}"),
    )
}

fn c12_count() -> Outcome {
    let params = Params {
        q: vec![1_000_000],
        ..Params::default()
    };
    let rows = run(&config(ExperimentKind::CountIntermediates, 500, params)).expect("count run");
    let norm = stat_values(&rows, 1_000_000, "normalized");
    let med = median(&norm);
    let m = mean(&norm);
    outcome(
        (0.5..=1.5).contains(&med),
        format!("median normalized count = {med:.4} (mean {m:.4}, not asserted)"),
    )
}

fn c13_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_intconv");
    let runs = [
        vec!["--experiment", "mq", "--samples", "40", "--seed", "7", "--Q", "300,2500", "--exact"],
        vec!["--experiment", "pairdep", "--samples", "300", "--seed", "7", "--k", "2,5"],
        vec!["--experiment", "count_intermediates", "--samples", "60", "--seed", "9", "--Q", "100000"],
    ];
    for args in runs {
        let outputs: Vec<Vec<u8>> = ["1", "2", "8"]
            .iter()
            .map(|t| {
                let out = Command::new(bin)
                    .arg("montecarlo")
                    .args(&args)
                    .args(["--threads", t])
                    .output()
                    .expect("binary runs");
                assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
                out.stdout
            })
            .collect();
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            return outcome(false, format!("output differs across threads for {}", args[1]));
        }
    }
    outcome(true, "byte-identical CSV for mq, pairdep, count_intermediates at --threads 1, 2, 8".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("triple-method equality", c1_triple_equality),
        ("chi / intermediate equivalence", c2_chi_equivalence),
        ("Farey exactness", c3_farey_exactness),
        ("row sum formula", c4_row_formula),
        ("Khinchin-Levy median", c5_levy),
        ("Gauss-Kuzmin frequencies", c6_gauss_kuzmin),
        ("level count N(Q,x) mean", c7_levels),
        ("M_Q headline constant", c8_mq_headline),
        ("indicator-sum variance", c9_variance),
        ("weak dependence", c10_pairdep),
        ("cumulative expected count", c11_cumulative),
        ("intermediate count median", c12_count),
        ("determinism across threads", c13_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("{tag} {:>2} {name}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
