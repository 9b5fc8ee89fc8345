//! Acceptance criteria, one line each. Runs without the libtest harness so
//! every line is printed; exits nonzero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use dp_quantiles::baselines::{
    agg_tree, csmooth_params, ddr_delta, smooth_sensitivity, solve_per_call_epsilon, tune_csmooth, AggTreeConfig,
    Algorithm, CsmoothCalibration, DEFAULT_DELTA,
};
use dp_quantiles::bench::{ingest_csv, run_experiment, summarize, DatasetKind, ExperimentConfig, Summary};
use dp_quantiles::jointexp::{add_remove_sensitivity, backward_sample, forward_pass, joint_exp, MechanismParams, NeighborModel};
use dp_quantiles::metrics::{true_quantiles, Metric};
use dp_quantiles::numerics::{log_toeplitz_matvec, racing_sample, ToeplitzOperator};
use dp_quantiles::oracle::{brute_force_alpha, enumerate_distribution, sensitivity_exhaust};
use dp_quantiles::{prepare_dataset, QuantileSpec, RandomSource, SortedDataset};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

type Check = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Check); 11] = [
        ("sampler matches the exact interval-sequence law", sampler_matches_exact_law),
        ("prefix-mass table matches direct summation", prefix_masses_match_direct_sum),
        ("utility sensitivity within bounds by exhaustion", sensitivity_by_exhaustion),
        ("FFT log-space matvec matches the naive oracle", fft_matches_naive),
        ("racing sampler passes chi-square", racing_chi_square),
        ("accuracy ordering across m at desk scale", accuracy_ordering),
        ("runtime scaling", runtime_scaling),
        ("composition budget sanity", composition_sanity),
        ("smooth-sensitivity mechanics", smooth_mechanics),
        ("noiseless tree within one bucket", noiseless_tree),
        ("dpq run is byte-for-byte reproducible", run_is_reproducible),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let out = check();
        let secs = start.elapsed().as_secs_f64();
        println!("[{}] {name}: {} ({secs:.1}s)", if out.passed { "PASS" } else { "FAIL" }, out.detail);
        if !out.passed {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn random_dataset(n: usize, rng: &mut RandomSource) -> SortedDataset {
    let raw: Vec<f64> = (0..n).map(|_| rng.uniform_in(0.0, 10.0)).collect();
    prepare_dataset(&raw, 0.0, 10.0).unwrap()
}

fn sampler_matches_exact_law() -> Outcome {
    let mut rng = RandomSource::new(101);
    let draws = 200_000;
    let mut worst: f64 = 0.0;
    for t in 0..10 {
        let n = [3, 4, 5][t % 3];
        let m = [1, 2, 3][(t / 3) % 3];
        let eps = [0.5, 1.0, 4.0][(t + t / 3) % 3];
        let mut data = random_dataset(n, &mut rng);
        if t == 9 {
            // duplicate point and a point on the upper bound: zero-width intervals
            data = prepare_dataset(&[2.0, 2.0, 5.0, 10.0], 0.0, 10.0).unwrap();
        }
        let spec = QuantileSpec::evenly_spaced(m).unwrap();
        let params = MechanismParams::swap(eps).unwrap();
        let exact = enumerate_distribution(&data, &spec, &params).unwrap();
        let index = exact.index();
        let table = forward_pass(&data, &spec, &params);
        let mut counts = vec![0u64; exact.support.len()];
        for _ in 0..draws {
            let s = backward_sample(&table, &mut rng).unwrap();
            counts[index[s.indices()]] += 1;
        }
        let tv = counts
            .iter()
            .enumerate()
            .map(|(k, &c)| (c as f64 / draws as f64 - exact.probability(k)).abs())
            .sum::<f64>()
            / 2.0;
        worst = worst.max(tv);
    }
    outcome(worst <= 0.02, format!("max TV {worst:.4} <= 0.02 over 10 instances x {draws} draws"))
}

fn prefix_masses_match_direct_sum() -> Outcome {
    let mut rng = RandomSource::new(202);
    let mut worst: f64 = 0.0;
    let mut instances = 0;
    let mut mismatched_zero = 0;
    let mut datasets: Vec<SortedDataset> = (1..=6).map(|n| random_dataset(n, &mut rng)).collect();
    datasets.push(prepare_dataset(&[0.0, 3.0, 3.0, 3.0, 7.5, 10.0], 0.0, 10.0).unwrap());
    datasets.push(prepare_dataset(&[4.0, 4.0], 0.0, 10.0).unwrap());
    for data in &datasets {
        for m in 1..=3 {
            let specs = [
                QuantileSpec::evenly_spaced(m).unwrap(),
                QuantileSpec::new([0.1, 0.15, 0.8][..m].to_vec()).unwrap(),
            ];
            for spec in &specs {
                for eps in [0.5, 1.0, 4.0] {
                    for params in [
                        MechanismParams::swap(eps).unwrap(),
                        MechanismParams::add_remove(eps, spec).unwrap(),
                    ] {
                        instances += 1;
                        let table = forward_pass(data, spec, &params);
                        let brute = brute_force_alpha(data, spec, &params).unwrap();
                        for j in 1..=m {
                            for i in 0..=data.len() {
                                for k in 1..=m {
                                    let (fast, slow) = (table.log_alpha(j, i, k), brute.log_alpha(j, i, k));
                                    match (fast.is_finite(), slow.is_finite()) {
                                        (true, true) => worst = worst.max((fast - slow).exp_m1().abs()),
                                        (false, false) => {}
                                        _ => mismatched_zero += 1,
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    outcome(
        worst <= 1e-9 && mismatched_zero == 0,
        format!("{instances} instances, max relative error {worst:.2e}, zero-pattern mismatches {mismatched_zero}"),
    )
}

fn sensitivity_by_exhaustion() -> Outcome {
    let grid: Vec<f64> = (0..10).map(f64::from).collect();
    let mut specs: Vec<QuantileSpec> = (1..=3).map(|m| QuantileSpec::evenly_spaced(m).unwrap()).collect();
    specs.push(QuantileSpec::new(vec![0.2, 0.3, 0.9]).unwrap());
    specs.push(QuantileSpec::new(vec![0.1, 0.7]).unwrap());
    let mut swap_max: f64 = 0.0;
    let mut swap_ok = true;
    let mut add_ok = true;
    let mut add_detail = Vec::new();
    for spec in &specs {
        for n in 1..=4 {
            let s = sensitivity_exhaust(&grid, n, spec, NeighborModel::Swap).unwrap();
            swap_ok &= s <= 2.0 + 1e-12;
            swap_max = swap_max.max(s);
        }
        // the larger neighbor has n + 1 <= 4 points
        let bound = add_remove_sensitivity(spec);
        let mut worst: f64 = 0.0;
        for n in 1..=3 {
            worst = worst.max(sensitivity_exhaust(&grid, n, spec, NeighborModel::AddRemove).unwrap());
        }
        add_ok &= worst <= bound + 1e-12;
        add_detail.push(format!("{worst:.3}/{bound:.3}"));
    }
    let attained = (swap_max - 2.0).abs() < 1e-12;
    outcome(
        swap_ok && attained && add_ok,
        format!(
            "swap max {swap_max} (bound 2, attained: {attained}); add-remove observed/bound {}",
            add_detail.join(", ")
        ),
    )
}

fn naive_log_matvec(col: &[f64], row: &[f64], v: &[f64]) -> Vec<f64> {
    (0..col.len())
        .map(|i| {
            let terms: Vec<f64> = (0..row.len())
                .map(|j| if i >= j { col[i - j] } else { row[j - i] } + v[j])
                .filter(|x| x.is_finite())
                .collect();
            let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if top == f64::NEG_INFINITY {
                return top;
            }
            top + terms.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
        })
        .collect()
}

fn fft_matches_naive() -> Outcome {
    let mut rng = RandomSource::new(303);
    let offsets = [0.0, -400.0, -1000.0, -1500.0, -2500.0];
    let mut worst: f64 = 0.0;
    let mut pattern_errors = 0;
    let mut below = 0usize;
    for t in 0..100 {
        let (r, c) = if t == 0 {
            (1024, 1024)
        } else {
            (1 + (rng.uniform() * 1024.0) as usize, 1 + (rng.uniform() * 1024.0) as usize)
        };
        let off_t = offsets[t % offsets.len()];
        let off_v = offsets[(t / 5) % offsets.len()];
        let entry = |off: f64, rng: &mut RandomSource| off - 8.0 * rng.uniform();
        let mut col: Vec<f64> = (0..r).map(|_| entry(off_t, &mut rng)).collect();
        let mut row: Vec<f64> = (0..c).map(|_| entry(off_t, &mut rng)).collect();
        row[0] = col[0];
        if t % 4 == 1 {
            // strictly lower-triangular shape, as in the forward pass
            col[0] = f64::NEG_INFINITY;
            row.iter_mut().for_each(|x| *x = f64::NEG_INFINITY);
        }
        let v: Vec<f64> = (0..c)
            .map(|_| if rng.uniform() < 0.1 { f64::NEG_INFINITY } else { entry(off_v, &mut rng) })
            .collect();
        below += col.iter().chain(&row).chain(&v).filter(|x| **x < -1000.0).count();
        let op = ToeplitzOperator::new(col.clone(), row.clone()).unwrap();
        let fast = log_toeplitz_matvec(&op, &v).unwrap();
        let slow = naive_log_matvec(&col, &row, &v);
        for (a, b) in fast.iter().zip(&slow) {
            match (a.is_finite(), b.is_finite()) {
                (true, true) => worst = worst.max((a - b).abs()),
                (false, false) => {}
                _ => pattern_errors += 1,
            }
        }
    }
    outcome(
        worst <= 1e-6 && pattern_errors == 0 && below > 0,
        format!("100 instances up to 1024x1024, {below} entries below -1000, max |diff| {worst:.2e}, -inf mismatches {pattern_errors}"),
    )
}

fn racing_chi_square() -> Outcome {
    let mut rng = RandomSource::new(404);
    let draws = 100_000;
    let mut failures = Vec::new();
    let mut worst_p: f64 = 1.0;
    for t in 0..20 {
        let size = 2 + (t * 62) / 19;
        let lw: Vec<f64> = (0..size).map(|_| -3.0 * rng.uniform() - 50.0 * t as f64).collect();
        let top = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = lw.iter().map(|x| (x - top).exp()).sum();
        let mut counts = vec![0u64; size];
        for _ in 0..draws {
            counts[racing_sample(&lw, &mut rng).unwrap()] += 1;
        }
        let stat: f64 = counts
            .iter()
            .zip(&lw)
            .map(|(&c, &w)| {
                let e = draws as f64 * (w - top).exp() / z;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        let dist = ChiSquared::new((size - 1) as f64).unwrap();
        let p = 1.0 - dist.cdf(stat);
        worst_p = worst_p.min(p);
        if stat > dist.inverse_cdf(0.99) {
            failures.push(format!("size {size}: stat {stat:.1}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!("20 vectors, sizes 2..=64, {draws} draws each, smallest p-value {worst_p:.4}{}", if failures.is_empty() { String::new() } else { format!(", rejected: {}", failures.join("; ")) }),
    )
}

fn mean_error(summaries: &[Summary], algorithm: Algorithm, m: usize) -> f64 {
    summaries
        .iter()
        .find(|s| s.algorithm == algorithm && s.m == m)
        .map(|s| s.misclassified_per_quantile)
        .unwrap()
}

fn accuracy_ordering() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for dataset in [DatasetKind::Gaussian, DatasetKind::Uniform] {
        let cfg = ExperimentConfig {
            algorithms: Algorithm::ALL.to_vec(),
            dataset,
            n: 1000,
            m_range: (1..=29).collect(),
            epsilon: 1.0,
            trials: 20,
            seed: 2021,
            data_range: (-100.0, 100.0),
            timing: false,
            ..ExperimentConfig::default()
        };
        let s = summarize(&run_experiment(&cfg).unwrap());
        let err = |a, m| mean_error(&s, a, m);

        let j1 = err(Algorithm::JointExp, 1);
        let a1 = err(Algorithm::AppIndExp, 1);
        let c1 = err(Algorithm::CSmooth, 1);
        let t1 = err(Algorithm::AggTree, 1);
        let a_ok = j1 <= 2.0 * a1 && a1 <= 2.0 * j1 && c1 >= 5.0 * j1 && t1 >= 5.0 * j1;

        let b_fail: Vec<usize> = (1..=20)
            .filter(|&m| err(Algorithm::JointExp, m) > err(Algorithm::AppIndExp, m))
            .collect();
        let b_ok = b_fail.is_empty();

        let ratios: Vec<(usize, f64)> = (2..=25)
            .map(|m| {
                let best = [Algorithm::AppIndExp, Algorithm::CSmooth, Algorithm::AggTree]
                    .into_iter()
                    .map(|a| err(a, m))
                    .fold(f64::INFINITY, f64::min);
                (m, err(Algorithm::JointExp, m) / best)
            })
            .collect();
        let good = ratios.iter().filter(|(_, r)| *r <= 0.6).count();
        let c_ok = good >= 15;
        let median_ratio = {
            let mut r: Vec<f64> = ratios.iter().map(|(_, r)| *r).collect();
            r.sort_by(f64::total_cmp);
            r[r.len() / 2]
        };
        passed &= a_ok && b_ok && c_ok;
        parts.push(format!(
            "{dataset}: (a) m=1 joint {j1:.2} vs appindexp {a1:.2}, csmooth/joint {:.1}x, aggtree/joint {:.1}x -> {}; \
             (b) joint <= appindexp for m<=20 -> {}{}; (c) ratio <= 0.6 at {good}/24 m values (median {median_ratio:.2}) -> {}",
            c1 / j1,
            t1 / j1,
            if a_ok { "ok" } else { "FAIL" },
            if b_ok { "ok" } else { "FAIL" },
            if b_ok { String::new() } else { format!(" at m={b_fail:?}") },
            if c_ok { "ok" } else { "FAIL" },
        ));
    }
    outcome(passed, parts.join(" | "))
}

fn time_call<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn gaussian_dataset(n: usize, seed: u64) -> SortedDataset {
    let mut rng = RandomSource::new(seed);
    let raw: Vec<f64> = (0..n).map(|_| 5.0 * rng.normal()).collect();
    prepare_dataset(&raw, -100.0, 100.0).unwrap()
}

fn runtime_scaling() -> Outcome {
    let spec30 = QuantileSpec::evenly_spaced(30).unwrap();
    let params = MechanismParams::swap(1.0).unwrap();
    let mut rng = RandomSource::new(505);

    let small = gaussian_dataset(1000, 1);
    let _ = joint_exp(&small, &spec30, &params, &mut rng).unwrap();
    let (_, t_small) = time_call(|| joint_exp(&small, &spec30, &params, &mut rng).unwrap());

    let large = gaussian_dataset(1_000_000, 2);
    let (_, t_large) = time_call(|| joint_exp(&large, &spec30, &params, &mut rng).unwrap());
    drop(large);

    // forward pass at m = 8, best of 5 to damp scheduler noise
    let spec8 = QuantileSpec::evenly_spaced(8).unwrap();
    let sizes = [10_000, 20_000, 40_000, 80_000];
    let times: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let d = gaussian_dataset(n, n as u64);
            (0..5)
                .map(|_| time_call(|| forward_pass(&d, &spec8, &params)).1)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let ratios: Vec<f64> = times.windows(2).map(|w| w[1] / w[0]).collect();
    let worst_ratio = ratios.iter().copied().fold(0.0, f64::max);

    let ok = t_small < 0.1 && t_large < 300.0 && worst_ratio <= 2.4;
    outcome(
        ok,
        format!(
            "m=30: n=1e3 {:.1} ms (< 100), n=1e6 {t_large:.1} s (< 300); m=8 forward doubling ratios {} (<= 2.4)",
            t_small * 1e3,
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn composition_sanity() -> Outcome {
    let mut problems = Vec::new();
    for m in 1..=32 {
        let e = solve_per_call_epsilon(m, 1.0, DEFAULT_DELTA);
        if !(e >= 1.0 / m as f64 && e <= 1.0) {
            problems.push(format!("m={m}: {e}"));
        }
    }
    if solve_per_call_epsilon(1, 1.0, DEFAULT_DELTA) != 1.0 {
        problems.push("m=1 does not keep the full budget".into());
    }
    let mut zero_checks = 0;
    for eps_g in [0.25, 0.5, 1.0, 2.0] {
        for m in 1..=32 {
            for k in 1..=200 {
                let eps = k as f64 * 0.005;
                if m as f64 * eps <= eps_g {
                    zero_checks += 1;
                    let d = ddr_delta(eps, m, eps_g);
                    if d != 0.0 {
                        problems.push(format!("delta({eps}, {m}, {eps_g}) = {d}"));
                    }
                }
            }
        }
    }
    outcome(
        problems.is_empty(),
        format!("per-call budgets in [1/m, 1] for m <= 32; {zero_checks} zero-delta cases; issues: {}", problems.len()),
    )
}

fn smooth_mechanics() -> Outcome {
    let mut worst: f64 = 0.0;
    let cal = CsmoothCalibration::embedded();
    for m in 1..=29 {
        let spec = QuantileSpec::evenly_spaced(m).unwrap();
        for eps_total in [0.5, 1.0, 2.0] {
            let target = eps_total / (m as f64).sqrt();
            for p in cal.schedule(&spec, eps_total).unwrap() {
                worst = worst.max((p.epsilon() - target).abs() / target);
            }
        }
    }
    let data = gaussian_dataset(1000, 9);
    for q in [0.1, 0.5, 0.9] {
        let p = tune_csmooth(&data, q, 0.3).unwrap();
        worst = worst.max((p.epsilon() - 0.3).abs() / 0.3);
        let again = csmooth_params(p.t, 0.3).unwrap();
        worst = worst.max((again.epsilon() - 0.3).abs() / 0.3);
    }
    let small = prepare_dataset(&[-1.0, 0.0, 1.0], -100.0, 100.0).unwrap();
    let spread = prepare_dataset(&[-100.0, 0.0, 100.0], -100.0, 100.0).unwrap();
    let limits: Vec<(f64, f64)> = [20.0, 100.0, 1000.0]
        .into_iter()
        .map(|t| (smooth_sensitivity(&small, 0.5, t), smooth_sensitivity(&spread, 0.5, t)))
        .collect();
    let examples_ok = limits.iter().all(|&(a, b)| a == 1.0 && b == 100.0);
    outcome(
        worst <= 1e-9 && examples_ok,
        format!(
            "budget identity max relative error {worst:.2e}; large-t smooth sensitivity {{-1,0,1}} -> {}, {{-100,0,100}} -> {}",
            limits[2].0, limits[2].1
        ),
    )
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/goodreads_fixture.csv")
}

fn noiseless_tree() -> Outcome {
    let mut rng = RandomSource::new(606);
    let mut sets: Vec<(&str, SortedDataset)> = vec![
        ("gaussian", gaussian_dataset(1000, 3)),
        ("uniform", {
            let raw: Vec<f64> = (0..1000).map(|_| rng.uniform_in(-5.0, 5.0)).collect();
            prepare_dataset(&raw, -100.0, 100.0).unwrap()
        }),
    ];
    let ratings = ingest_csv(fixture(), "rating", 1.0).unwrap().values;
    sets.push(("ratings", prepare_dataset(&ratings, -100.0, 100.0).unwrap()));
    let pages = ingest_csv(fixture(), "pages", 100.0).unwrap().values;
    sets.push(("pagecounts", prepare_dataset(&pages, -100.0, 100.0).unwrap()));

    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for (_, data) in &sets {
        for m in 1..=29 {
            let spec = QuantileSpec::evenly_spaced(m).unwrap();
            let truth = true_quantiles(data, &spec);
            for metric in [Metric::Misclassified, Metric::Distance] {
                let cfg = AggTreeConfig::tuned(m, metric, f64::INFINITY).unwrap();
                let width = (data.upper() - data.lower()) / cfg.leaves() as f64;
                let est = agg_tree(data, &spec, &cfg, &mut rng);
                for (e, t) in est.values().iter().zip(truth.values()) {
                    worst = worst.max((e - t).abs() / width);
                    checked += 1;
                }
            }
        }
    }
    outcome(
        worst <= 1.0 + 1e-9,
        format!("{checked} estimates over 4 datasets and all tuned shapes; max error {worst:.4} bucket widths"),
    )
}

fn run_dpq(config: &Path, output: &Path) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_dpq"))
        .args(["run", "--quiet", "--config"])
        .arg(config)
        .arg("--output")
        .arg(output)
        .status()
        .expect("dpq runs");
    assert!(status.success());
    std::fs::read(output).unwrap()
}

fn run_is_reproducible() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        "algorithm = jointexp, appindexp, csmooth, aggtree\nm_range = 1-6, 12\ntrials = 4\nseed = 77\n\
         dataset = pagecounts\npath = {}\n",
        fixture().display()
    );
    let untimed = dir.path().join("untimed.cfg");
    std::fs::write(&untimed, format!("{body}timing = false\n")).unwrap();
    let a = run_dpq(&untimed, &dir.path().join("a.csv"));
    let b = run_dpq(&untimed, &dir.path().join("b.csv"));

    // with timing on, everything but the wall-time column must still agree
    let timed = dir.path().join("timed.cfg");
    std::fs::write(&timed, &body).unwrap();
    let strip = |bytes: Vec<u8>| -> Vec<String> {
        String::from_utf8(bytes)
            .unwrap()
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    let c = strip(run_dpq(&timed, &dir.path().join("c.csv")));
    let d = strip(run_dpq(&timed, &dir.path().join("d.csv")));
    let rows = a.iter().filter(|&&ch| ch == b'\n').count();
    let ok = a == b && c == d && strip(a.clone()) == c && rows == 1 + 4 * 7 * 4;
    outcome(
        ok,
        format!("{rows} lines; timing off byte-identical: {}; timing on identical apart from wall time: {}", a == b, c == d),
    )
}
