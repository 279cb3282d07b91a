//! Maximum likelihood by profiling out α.
//!
//! For fixed λ the log-likelihood is maximized in α at
//! `α̂(λ) = −n / Σ ln(1 − e^{−λxᵢ})`, so the fit reduces to a
//! one-dimensional search over λ.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimize::{argmax, golden_section_max};
use crate::posterior::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MleFit {
    pub alpha_hat: f64,
    pub lambda_hat: f64,
    pub loglik: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "lambda must be finite and > 0, got {lambda}"
        )))
    }
}

/// Maximizer of the log-likelihood in α at fixed λ.
pub fn alpha_hat_given_lambda(lambda: f64, data: &Dataset) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(data.n() as f64 * (-data.ln_neg_sum_ln_cdf_base(lambda)).exp())
}

/// GE log-likelihood of the whole sample.
pub fn loglik(alpha: f64, lambda: f64, data: &Dataset) -> Result<f64> {
    check_lambda(lambda)?;
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain(format!(
            "alpha must be finite and > 0, got {alpha}"
        )));
    }
    let n = data.n() as f64;
    Ok(
        n * alpha.ln() + n * lambda.ln() + (alpha - 1.0) * data.sum_ln_cdf_base(lambda)
            - lambda * data.sum_x(),
    )
}

/// Log-likelihood with α replaced by [`alpha_hat_given_lambda`].
pub fn profile_loglik(lambda: f64, data: &Dataset) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(profile_unchecked(lambda, data))
}

fn profile_unchecked(lambda: f64, data: &Dataset) -> f64 {
    // α̂·S = −n, so only ln(−S) is needed; S alone underflows for large λ
    let n = data.n() as f64;
    let ln_neg_s = data.ln_neg_sum_ln_cdf_base(lambda);
    n * (n.ln() - ln_neg_s) + n * lambda.ln() - n + ln_neg_s.exp() - lambda * data.sum_x()
}

const SCAN_POINTS: usize = 512;
const SCAN_LO: f64 = 1e-6;
const SCAN_HI: f64 = 1e4;
const GOLDEN_REL_TOL: f64 = 1e-10;

/// Maximizes the profile log-likelihood: 512-point log-spaced scan over
/// `[1e-6, 1e4]·n/Σxᵢ`, then golden-section between the best point's neighbours.
pub fn fit_mle(data: &Dataset) -> Result<MleFit> {
    let rate = data.exp_rate();
    let (llo, lhi) = ((SCAN_LO * rate).ln(), (SCAN_HI * rate).ln());
    let step = (lhi - llo) / (SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| (llo + step * i as f64).exp())
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&l| profile_unchecked(l, data)).collect();
    let i = argmax(&vals).ok_or_else(|| {
        Error::NoConvergence("profile likelihood is not finite on the scan".into())
    })?;
    if i == 0 || i == SCAN_POINTS - 1 {
        return Err(Error::NoConvergence(format!(
            "profile likelihood maximum at scan boundary lambda = {:.6e} (scan [{:.3e}, {:.3e}])",
            grid[i],
            grid[0],
            grid[SCAN_POINTS - 1]
        )));
    }
    let (lambda_hat, ll, iterations) = golden_section_max(
        |l| profile_unchecked(l, data),
        grid[i - 1],
        grid[i + 1],
        GOLDEN_REL_TOL,
    );
    let alpha_hat = alpha_hat_given_lambda(lambda_hat, data)?;
    Ok(MleFit {
        alpha_hat,
        lambda_hat,
        loglik: ll,
        iterations,
        converged: lambda_hat.is_finite() && ll.is_finite(),
    })
}
