use std::fmt;

use serde::Serialize;

use crate::diagnostics::{geweke_z, ks_test, GEWEKE_FIRST, GEWEKE_LAST};
use crate::dist::{ge_cdf, GeParams};
use crate::error::{Error, Result};
use crate::mle::fit_mle;
use crate::posterior::{check_propriety, Dataset, PriorSpec};
use crate::rou::{sample_posterior, PosteriorSample};

/// Functional of the marginal posterior draws used as the Bayes estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PointEstimator {
    #[default]
    Median,
    Mean,
}

impl PointEstimator {
    pub fn apply(&self, draws: &[f64]) -> f64 {
        match self {
            PointEstimator::Mean => draws.iter().sum::<f64>() / draws.len() as f64,
            PointEstimator::Median => median(draws),
        }
    }
}

pub(crate) fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub prior: PriorSpec,
    pub r: f64,
    pub draws: usize,
    pub seed: u64,
    pub estimator: PointEstimator,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            prior: PriorSpec::jeffreys(),
            r: 1.0,
            draws: 10_000,
            seed: 42,
            estimator: PointEstimator::Median,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodEstimate {
    pub method: String,
    pub alpha_hat: f64,
    pub lambda_hat: f64,
    pub ks_statistic: f64,
    pub ks_p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub n: usize,
    pub seed: u64,
    pub prior_a: f64,
    pub prior_b: f64,
    pub r: f64,
    #[serde(rename = "M")]
    pub draws: usize,
    pub estimator: PointEstimator,
    pub acceptance_rate: f64,
    pub geweke_z_alpha: f64,
    pub geweke_z_lambda: f64,
    pub estimates: Vec<MethodEstimate>,
}

impl FitReport {
    pub fn bayes(&self) -> &MethodEstimate {
        &self.estimates[0]
    }

    pub fn mle(&self) -> &MethodEstimate {
        &self.estimates[1]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn estimate(method: &str, alpha: f64, lambda: f64, data: &Dataset) -> Result<MethodEstimate> {
    let p = GeParams::new(alpha, lambda)?;
    let ks = ks_test(data.values(), |x| ge_cdf(x, &p).unwrap_or(f64::NAN))?;
    Ok(MethodEstimate {
        method: method.to_string(),
        alpha_hat: alpha,
        lambda_hat: lambda,
        ks_statistic: ks.statistic,
        ks_p_value: ks.p_value,
    })
}

/// Bayes and ML estimates with K-S fit checks and Geweke scores for the draws.
pub fn cmd_fit(data: &Dataset, cfg: &FitConfig) -> Result<(FitReport, PosteriorSample)> {
    check_propriety(data, &cfg.prior).into_result()?;
    let sample = sample_posterior(data, &cfg.prior, cfg.r, cfg.draws, cfg.seed)?;
    let mle = fit_mle(data)?;
    if !mle.converged {
        return Err(Error::NoConvergence(format!(
            "MLE search stopped at lambda = {}",
            mle.lambda_hat
        )));
    }
    let bayes = estimate(
        "bayes",
        cfg.estimator.apply(&sample.alphas),
        cfg.estimator.apply(&sample.lambdas),
        data,
    )?;
    let ml = estimate("mle", mle.alpha_hat, mle.lambda_hat, data)?;
    let report = FitReport {
        n: data.n(),
        seed: cfg.seed,
        prior_a: cfg.prior.a(),
        prior_b: cfg.prior.b(),
        r: cfg.r,
        draws: cfg.draws,
        estimator: cfg.estimator,
        acceptance_rate: sample.acceptance_rate,
        geweke_z_alpha: geweke_z(&sample.alphas, GEWEKE_FIRST, GEWEKE_LAST)?,
        geweke_z_lambda: geweke_z(&sample.lambdas, GEWEKE_FIRST, GEWEKE_LAST)?,
        estimates: vec![bayes, ml],
    };
    Ok((report, sample))
}

impl fmt::Display for FitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "GE fit: n = {}, prior a = {}, b = {}, r = {}, M = {}, seed = {}",
            self.n, self.prior_a, self.prior_b, self.r, self.draws, self.seed
        )?;
        writeln!(
            f,
            "{:<8}{:>12}{:>12}{:>12}{:>10}",
            "method", "alpha", "lambda", "K-S", "p-value"
        )?;
        for e in &self.estimates {
            writeln!(
                f,
                "{:<8}{:>12.4}{:>12.6}{:>12.5}{:>10.4}",
                e.method, e.alpha_hat, e.lambda_hat, e.ks_statistic, e.ks_p_value
            )?;
        }
        writeln!(f, "Bayes point estimator: {:?}", self.estimator)?;
        writeln!(f, "acceptance rate: {:.4}", self.acceptance_rate)?;
        write!(
            f,
            "Geweke z: alpha {:.4}, lambda {:.4}",
            self.geweke_z_alpha, self.geweke_z_lambda
        )
    }
}
