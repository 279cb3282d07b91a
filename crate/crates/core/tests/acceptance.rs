//! Acceptance checks. Prints one PASS/FAIL line per criterion, followed by
//! indented measurements, and exits non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use gebayes::diagnostics::{acf, geweke_z, ks_test, GEWEKE_FIRST, GEWEKE_LAST};
use gebayes::dist::{ge_logpdf, ge_sample, GeParams};
use gebayes::harness::{bearings, cmd_fit, run_simulation, FitConfig, PointEstimator, SimConfig};
use gebayes::mle::{fit_mle, loglik, profile_loglik};
use gebayes::posterior::{
    check_propriety, log_conditional_alpha, log_joint_posterior, log_marginal_lambda,
    log_marginal_z, quadrature_posterior_summary, Dataset, PriorSpec,
};
use gebayes::quadrature::integrate;
use gebayes::rou::{rou_bounds, rou_sample_1d, sample_posterior};

struct Verdict {
    pass: bool,
    notes: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Self {
            pass: true,
            notes: Vec::new(),
        }
    }

    /// Records one sub-check; the criterion passes only if all do.
    fn check(&mut self, ok: bool, note: String) {
        self.pass &= ok;
        self.notes
            .push(format!("{} {note}", if ok { "ok  " } else { "MISS" }));
    }

    fn within(&mut self, what: &str, value: f64, target: f64, tol: f64) {
        let ok = (value - target).abs() <= tol;
        self.check(
            ok,
            format!(
                "{what} = {value:.6} (target {target} ± {tol}, off by {:.2e})",
                (value - target).abs()
            ),
        );
    }
}

fn median(xs: &[f64]) -> f64 {
    PointEstimator::Median.apply(xs)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn synthetic(seed: u64, n: usize, alpha: f64, lambda: f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Dataset::new(ge_sample(&GeParams::new(alpha, lambda).unwrap(), n, &mut rng).unwrap()).unwrap()
}

fn bearings_mle_regression() -> Verdict {
    let mut v = Verdict::new();
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_gebayes"))
        .args(["fit", "--data", "bearings", "--json"])
        .output()
        .expect("binary runs");
    let secs = start.elapsed().as_secs_f64();
    v.check(
        out.status.success(),
        format!("fit exit status {:?}", out.status.code()),
    );
    let Ok(report) = serde_json::from_slice::<serde_json::Value>(&out.stdout) else {
        v.check(false, "fit output is not JSON".into());
        return v;
    };
    let mle = &report["estimates"][1];
    let get = |k: &str| mle[k].as_f64().unwrap_or(f64::NAN);
    v.within("MLE alpha", get("alpha_hat"), 5.2783, 5e-3);
    v.within("MLE lambda", get("lambda_hat"), 0.0322, 5e-5);
    v.within("K-S D at MLE", get("ks_statistic"), 0.10588, 2e-4);
    v.within("K-S p at MLE", get("ks_p_value"), 0.9349, 5e-3);
    v.check(secs < 1.0, format!("fit wall time {secs:.3} s (< 1 s)"));
    v
}

fn bearings_bayes_regression() -> Verdict {
    let mut v = Verdict::new();
    let data = bearings();
    let start = Instant::now();
    for seed in 1..=10 {
        let cfg = FitConfig {
            seed,
            ..Default::default()
        };
        let (report, _) = cmd_fit(&data, &cfg).expect("fit succeeds");
        let b = report.bayes();
        let ok = (b.alpha_hat - 5.02).abs() <= 0.15
            && (b.lambda_hat - 0.0317).abs() <= 0.002
            && (b.ks_statistic - 0.1043).abs() <= 0.003;
        v.check(
            ok,
            format!(
                "seed {seed:>2}: alpha {:.4} (5.02 ± 0.15), lambda {:.5} (0.0317 ± 0.002), D {:.5} (0.1043 ± 0.003)",
                b.alpha_hat, b.lambda_hat, b.ks_statistic
            ),
        );
    }
    let secs = start.elapsed().as_secs_f64();
    v.check(
        secs < 30.0,
        format!("10 fits with M = 10000 in {secs:.2} s (< 30 s)"),
    );
    v
}

fn propriety_and_normalizing_constant() -> Verdict {
    let mut v = Verdict::new();
    let data = bearings();
    let jeffreys = PriorSpec::jeffreys();
    v.check(
        check_propriety(&data, &jeffreys).proper,
        "a = 1, b = 1 accepted".into(),
    );
    let r = check_propriety(&data, &PriorSpec::new(1.0, 2.0).unwrap());
    v.check(
        !r.proper && r.reasons.iter().any(|s| s == "b ≤ 1 violated"),
        format!("a = 1, b = 2 rejected: {:?}", r.reasons),
    );
    let r = check_propriety(&data, &PriorSpec::new(24.0, 1.0).unwrap());
    v.check(
        !r.proper && r.reasons.iter().any(|s| s == "n > a − 1 violated"),
        format!("n = 23, a = 24 rejected: {:?}", r.reasons),
    );

    let s = quadrature_posterior_summary(&data, &jeffreys).expect("quadrature converges");
    v.check(
        s.log_norm_const.is_finite(),
        format!("log normalizing constant {:.12}", s.log_norm_const),
    );
    let kernel = |z: f64| (log_marginal_z(z, &data, &jeffreys).unwrap() - s.log_norm_const).exp();
    let base = integrate(kernel, s.z_lo, s.z_hi, 1e-10, 0.0, 4000)
        .unwrap()
        .value;
    let wide = integrate(kernel, s.z_lo - 5.0, s.z_hi + 5.0, 1e-13, 0.0, 8000)
        .unwrap()
        .value;
    let rel = (wide / base - 1.0).abs();
    v.check(
        rel < 1e-8,
        format!("relative change under widening and tightening: {rel:.2e} (< 1e-8)"),
    );
    v
}

fn sampler_matches_oracles() -> Verdict {
    let mut v = Verdict::new();
    let m = 10_000;
    let sets = [
        (5, 1.5, 1.0),
        (10, 0.7, 2.0),
        (23, 2.0, 0.5),
        (5, 3.0, 0.2),
        (10, 1.0, 1.0),
    ];
    let prior = PriorSpec::jeffreys();
    for (k, &(n, alpha, lambda)) in sets.iter().enumerate() {
        let data = synthetic(500 + k as u64, n, alpha, lambda);
        let s = quadrature_posterior_summary(&data, &prior).expect("quadrature converges");
        let post = sample_posterior(&data, &prior, 1.0, m, 900 + k as u64).expect("sampler runs");
        let se_mean = s.sd_lambda / (m as f64).sqrt();
        let se_median = 1.0 / (2.0 * s.density_at_median_lambda * (m as f64).sqrt());
        let (mc_mean, mc_median) = (mean(&post.lambdas), median(&post.lambdas));
        let (zm, zd) = (
            (mc_mean - s.mean_lambda) / se_mean,
            (mc_median - s.median_lambda) / se_median,
        );
        v.check(
            zm.abs() < 3.0 && zd.abs() < 3.0,
            format!(
                "n = {n:>2}: lambda mean {mc_mean:.6} vs {:.6} ({zm:+.2} se), median {mc_median:.6} vs {:.6} ({zd:+.2} se)",
                s.mean_lambda, s.median_lambda
            ),
        );
    }

    let std_normal = |x: f64| -0.5 * x * x;
    let bounds = rou_bounds(std_normal, 1.0, (-40.0, 40.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (xs, _) = rou_sample_1d(std_normal, &bounds, 100_000, &mut rng).unwrap();
    let phi = Normal::standard();
    let ks = ks_test(&xs, |x| phi.cdf(x)).unwrap();
    // asymptotic 1% critical value of the K-S statistic
    let critical = 1.627_624 / (xs.len() as f64).sqrt();
    v.check(
        ks.statistic < critical,
        format!(
            "normal kernel, 1e5 draws: D = {:.5} (1% critical {critical:.5})",
            ks.statistic
        ),
    );
    v
}

fn independence() -> Verdict {
    let mut v = Verdict::new();
    let data = bearings();
    let prior = PriorSpec::jeffreys();
    let m = 10_000;
    let band = 2.0 / (m as f64).sqrt();
    let post = sample_posterior(&data, &prior, 1.0, m, 42).unwrap();
    for (name, chain) in [("alpha", &post.alphas), ("lambda", &post.lambdas)] {
        let r = acf(chain, 20).unwrap();
        let over = r[1..].iter().filter(|x| x.abs() >= band).count();
        v.check(
            over <= 2,
            format!("seed 42 {name}: {over} of 20 lags outside ±{band:.3} (≤ 2)"),
        );
    }
    let (mut ok_alpha, mut ok_lambda) = (0, 0);
    for seed in 1..=40 {
        let post = sample_posterior(&data, &prior, 1.0, m, seed).unwrap();
        ok_alpha += (geweke_z(&post.alphas, GEWEKE_FIRST, GEWEKE_LAST)
            .unwrap()
            .abs()
            < 1.96) as usize;
        ok_lambda += (geweke_z(&post.lambdas, GEWEKE_FIRST, GEWEKE_LAST)
            .unwrap()
            .abs()
            < 1.96) as usize;
    }
    v.check(
        ok_alpha >= 38,
        format!("alpha: |Geweke z| < 1.96 in {ok_alpha} of 40 runs (≥ 38)"),
    );
    v.check(
        ok_lambda >= 38,
        format!("lambda: |Geweke z| < 1.96 in {ok_lambda} of 40 runs (≥ 38)"),
    );
    v
}

fn simulation_trend() -> Verdict {
    let mut v = Verdict::new();
    let cfg = SimConfig {
        n_grid: vec![10, 20, 30, 50, 100],
        alpha_grid: vec![0.5, 1.0, 2.0],
        lambda_grid: vec![1.0],
        replications: 50,
        draws: 2000,
        ..Default::default()
    };
    let start = Instant::now();
    let rows = run_simulation(&cfg).expect("simulation runs");
    let secs = start.elapsed().as_secs_f64();
    let gap = |n: usize| {
        rows.iter()
            .filter(|r| r.n == n)
            .flat_map(|r| {
                [
                    (r.srmse_bayes_alpha - r.srmse_mle_alpha).abs(),
                    (r.srmse_bayes_lambda - r.srmse_mle_lambda).abs(),
                ]
            })
            .fold(0.0, f64::max)
    };
    for r in rows.iter().filter(|r| r.n == 10) {
        v.check(
            r.srmse_bayes_alpha <= r.srmse_mle_alpha && r.srmse_bayes_lambda <= r.srmse_mle_lambda,
            format!(
                "n = 10, alpha = {}: SRMSE alpha Bayes {:.4} vs MLE {:.4}, lambda Bayes {:.4} vs MLE {:.4} ({} failed reps)",
                r.alpha_true, r.srmse_bayes_alpha, r.srmse_mle_alpha, r.srmse_bayes_lambda, r.srmse_mle_lambda, r.failures
            ),
        );
    }
    let (g10, g100) = (gap(10), gap(100));
    v.check(
        g100 < 0.5 * g10,
        format!(
            "max SRMSE gap: n = 100 {g100:.4} vs half of n = 10 {:.4}",
            0.5 * g10
        ),
    );
    v.check(
        secs < 600.0,
        format!("simulation wall time {secs:.1} s (< 600 s)"),
    );
    v
}

fn elementary_bounds() -> Verdict {
    let mut v = Verdict::new();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut bad = 0;
    for _ in 0..10_000 {
        let x = 50.0 * (1.0 - rng.random::<f64>());
        let mid = -(-x).exp_m1();
        if !(x - 0.5 * x * x < mid && mid < x) {
            bad += 1;
        }
    }
    v.check(
        bad == 0,
        format!("x − x²/2 < 1 − e^(−x) < x on 10000 points in (0, 50]: {bad} violations"),
    );
    let mut missing = 0;
    for k in 0..50 {
        let n = rng.random_range(2..60);
        let data = synthetic(
            1000 + k,
            n,
            rng.random_range(0.2..5.0),
            rng.random_range(0.1..5.0),
        );
        let xbar = data.sum_x() / n as f64;
        if !data.values().iter().any(|&x| xbar - x > 0.0) {
            missing += 1;
        }
    }
    v.check(
        missing == 0,
        format!("50 datasets, a = 1: witness index with mean − xᵢ > 0 missing in {missing}"),
    );
    v
}

fn numerical_stability() -> Verdict {
    let mut v = Verdict::new();
    let data = bearings();
    let prior = PriorSpec::jeffreys();
    let rate = data.exp_rate();
    let fit = fit_mle(&data).unwrap();
    let mut bad = Vec::new();
    let mut evaluations = 0;
    for i in 0..=160 {
        let lambda = rate * 10f64.powf(-8.0 + 0.1 * i as f64);
        let mut record = |name: &str, x: f64| {
            evaluations += 1;
            if !x.is_finite() {
                bad.push(format!("{name} at lambda {lambda:.3e}: {x}"));
            }
        };
        record(
            "log_marginal_lambda",
            log_marginal_lambda(lambda, &data, &prior).unwrap(),
        );
        record(
            "log_marginal_z",
            log_marginal_z(lambda.ln(), &data, &prior).unwrap(),
        );
        record("profile_loglik", profile_loglik(lambda, &data).unwrap());
        for alpha in [1e-3, 1.0, fit.alpha_hat, 1e3] {
            record(
                "log_joint_posterior",
                log_joint_posterior(alpha, lambda, &data, &prior).unwrap(),
            );
            record(
                "log_conditional_alpha",
                log_conditional_alpha(alpha, lambda, &data, &prior).unwrap(),
            );
            record("loglik", loglik(alpha, lambda, &data).unwrap());
            let p = GeParams::new(alpha, lambda).unwrap();
            for &x in data.values() {
                record("ge_logpdf", ge_logpdf(x, &p).unwrap());
            }
        }
    }
    v.check(
        bad.is_empty(),
        format!("{evaluations} kernel values over lambda in [1e-8, 1e8]·n/Σx, non-finite: {bad:?}"),
    );

    let mut constant: Option<f64> = None;
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let alpha = 0.5 * 1.5f64.powi(i);
            let lambda = 0.004 * 1.4f64.powi(j);
            let c = log_joint_posterior(alpha, lambda, &data, &prior).unwrap()
                - log_conditional_alpha(alpha, lambda, &data, &prior).unwrap()
                - log_marginal_lambda(lambda, &data, &prior).unwrap();
            worst = worst.max((c - *constant.get_or_insert(c)).abs());
        }
    }
    v.check(
        worst < 1e-9,
        format!("joint − conditional − marginal spread on 10×10 grid: {worst:.2e} (< 1e-9)"),
    );
    v
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("bearings MLE and K-S regression", bearings_mle_regression),
        (
            "bearings Bayes estimates over 10 seeds",
            bearings_bayes_regression,
        ),
        (
            "propriety gate and normalizing constant",
            propriety_and_normalizing_constant,
        ),
        (
            "sampler against quadrature and normal oracles",
            sampler_matches_oracles,
        ),
        ("independence of posterior draws", independence),
        ("simulation trend, Bayes vs MLE", simulation_trend),
        ("elementary bounds behind propriety", elementary_bounds),
        ("numerical stability and factorization", numerical_stability),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let verdict = run();
        println!(
            "{} [{}] {name}",
            if verdict.pass { "PASS" } else { "FAIL" },
            i + 1
        );
        for note in &verdict.notes {
            println!("       {note}");
        }
        failed += (!verdict.pass) as usize;
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
