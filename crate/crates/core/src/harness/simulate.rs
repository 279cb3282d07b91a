//! Finite-sample comparison of the Bayes and ML estimators over a parameter grid.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::scaled_errors;
use crate::dist::{ge_sample, GeParams};
use crate::error::{Error, Result};
use crate::harness::fit::PointEstimator;
use crate::mle::fit_mle;
use crate::posterior::{check_propriety, Dataset, PriorSpec};
use crate::rou::sample_posterior_with_rng;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_grid: Vec<usize>,
    pub alpha_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
    /// Replications per cell.
    pub replications: usize,
    /// Posterior draws per replication.
    pub draws: usize,
    pub prior: PriorSpec,
    pub r: f64,
    pub base_seed: u64,
    pub point_estimator: PointEstimator,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_grid: (10..=100).step_by(5).collect(),
            alpha_grid: vec![0.5, 1.0, 2.0],
            lambda_grid: vec![0.5, 1.0, 2.0],
            replications: 200,
            draws: 10_000,
            prior: PriorSpec::jeffreys(),
            r: 1.0,
            base_seed: 20_240_601,
            point_estimator: PointEstimator::Median,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.alpha_grid.is_empty() || self.lambda_grid.is_empty() {
            return Err(Error::InvalidParameter(
                "simulation grids must be non-empty".into(),
            ));
        }
        if self.n_grid.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParameter("sample sizes must be >= 2".into()));
        }
        if self
            .alpha_grid
            .iter()
            .chain(&self.lambda_grid)
            .any(|&v| !(v.is_finite() && v > 0.0))
        {
            return Err(Error::InvalidParameter(
                "grid parameters must be finite and positive".into(),
            ));
        }
        if self.replications == 0 || self.draws == 0 {
            return Err(Error::InvalidParameter("N and M must be >= 1".into()));
        }
        // propriety depends on the data only through n; check the smallest
        let n_min = *self.n_grid.iter().min().expect("non-empty");
        let probe = Dataset::new((1..=n_min).map(|i| i as f64).collect())?;
        check_propriety(&probe, &self.prior).into_result()
    }

    /// Grid cells `(n, α, λ)` in output order: n outermost, λ innermost.
    pub fn cells(&self) -> Vec<(usize, f64, f64)> {
        let mut out =
            Vec::with_capacity(self.n_grid.len() * self.alpha_grid.len() * self.lambda_grid.len());
        for &n in &self.n_grid {
            for &a in &self.alpha_grid {
                for &l in &self.lambda_grid {
                    out.push((n, a, l));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimCellResult {
    pub n: usize,
    pub alpha_true: f64,
    pub lambda_true: f64,
    pub sbias_bayes_alpha: f64,
    pub srmse_bayes_alpha: f64,
    pub sbias_mle_alpha: f64,
    pub srmse_mle_alpha: f64,
    pub sbias_bayes_lambda: f64,
    pub srmse_bayes_lambda: f64,
    pub sbias_mle_lambda: f64,
    pub srmse_mle_lambda: f64,
    pub failures: usize,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `rep` in grid cell `cell`.
pub fn cell_seed(base_seed: u64, cell: usize, rep: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base_seed) ^ cell as u64) ^ rep as u64)
}

struct Replicate {
    bayes: (f64, f64),
    mle: (f64, f64),
}

fn replicate(
    cfg: &SimConfig,
    cell: usize,
    rep: usize,
    n: usize,
    params: &GeParams,
) -> Result<Replicate> {
    let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(cfg.base_seed, cell, rep));
    let data = Dataset::new(ge_sample(params, n, &mut rng)?)?;
    let mle = fit_mle(&data)?;
    if !mle.converged {
        return Err(Error::NoConvergence("MLE".into()));
    }
    let post = sample_posterior_with_rng(&data, &cfg.prior, cfg.r, cfg.draws, &mut rng)?;
    Ok(Replicate {
        bayes: (
            cfg.point_estimator.apply(&post.alphas),
            cfg.point_estimator.apply(&post.lambdas),
        ),
        mle: (mle.alpha_hat, mle.lambda_hat),
    })
}

/// Runs one grid cell by index into [`SimConfig::cells`].
///
/// Replications run in parallel but are aggregated in index order, so the
/// result does not depend on scheduling or on which other cells are run.
pub fn run_cell(cfg: &SimConfig, cell: usize) -> Result<SimCellResult> {
    cfg.validate()?;
    let cells = cfg.cells();
    let &(n, alpha, lambda) = cells.get(cell).ok_or_else(|| {
        Error::InvalidParameter(format!("cell {cell} out of range (0..{})", cells.len()))
    })?;
    let params = GeParams::new(alpha, lambda)?;
    let reps: Vec<Result<Replicate>> = (0..cfg.replications)
        .into_par_iter()
        .map(|j| replicate(cfg, cell, j, n, &params))
        .collect();
    let ok: Vec<&Replicate> = reps.iter().filter_map(|r| r.as_ref().ok()).collect();
    let failures = reps.len() - ok.len();
    let metric = |pick: fn(&Replicate) -> f64, truth: f64| {
        let est: Vec<f64> = ok.iter().map(|r| pick(r)).collect();
        scaled_errors(&est, truth)
            .map(|e| (e.sbias, e.srmse))
            .unwrap_or((f64::NAN, f64::NAN))
    };
    let (sbias_bayes_alpha, srmse_bayes_alpha) = metric(|r| r.bayes.0, alpha);
    let (sbias_mle_alpha, srmse_mle_alpha) = metric(|r| r.mle.0, alpha);
    let (sbias_bayes_lambda, srmse_bayes_lambda) = metric(|r| r.bayes.1, lambda);
    let (sbias_mle_lambda, srmse_mle_lambda) = metric(|r| r.mle.1, lambda);
    Ok(SimCellResult {
        n,
        alpha_true: alpha,
        lambda_true: lambda,
        sbias_bayes_alpha,
        srmse_bayes_alpha,
        sbias_mle_alpha,
        srmse_mle_alpha,
        sbias_bayes_lambda,
        srmse_bayes_lambda,
        sbias_mle_lambda,
        srmse_mle_lambda,
        failures,
    })
}

/// Runs every cell of the grid.
pub fn run_simulation(cfg: &SimConfig) -> Result<Vec<SimCellResult>> {
    cfg.validate()?;
    (0..cfg.cells().len())
        .into_par_iter()
        .map(|c| run_cell(cfg, c))
        .collect()
}

pub const SIM_CSV_HEADER: &str =
    "n,alpha_true,lambda_true,sbias_bayes_alpha,srmse_bayes_alpha,sbias_mle_alpha,\
srmse_mle_alpha,sbias_bayes_lambda,srmse_bayes_lambda,sbias_mle_lambda,srmse_mle_lambda,failures";

pub fn simulation_csv(rows: &[SimCellResult]) -> String {
    let mut s = String::new();
    s.push_str(SIM_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.alpha_true,
            r.lambda_true,
            r.sbias_bayes_alpha,
            r.srmse_bayes_alpha,
            r.sbias_mle_alpha,
            r.srmse_mle_alpha,
            r.sbias_bayes_lambda,
            r.srmse_bayes_lambda,
            r.sbias_mle_lambda,
            r.srmse_mle_lambda,
            r.failures
        );
    }
    s
}
