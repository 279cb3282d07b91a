//! Posterior of (α, λ) under the vague prior family `π(α, λ) ∝ α^{-a} λ^{-b}`.
//!
//! Every kernel here is an unnormalized log density. Given λ, α is
//! Gamma(n − a + 1, −Σ ln(1 − e^{−λxᵢ})) in the shape–rate parametrization,
//! which leaves a one-dimensional marginal for λ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{argmax, linspace};
use crate::quadrature::integrate;
use crate::special::{ln_gamma, ln_one_minus_exp_neg};

/// Hyperparameters `(a, b)` of the prior `1 / (α^a λ^b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    a: f64,
    b: f64,
}

impl PriorSpec {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "prior exponents must be finite, got a={a}, b={b}"
            )));
        }
        Ok(Self { a, b })
    }

    /// The independence Jeffreys prior `1/(αλ)`.
    pub fn jeffreys() -> Self {
        Self { a: 1.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

impl Default for PriorSpec {
    fn default() -> Self {
        Self::jeffreys()
    }
}

/// Positive observations with the sufficient statistic `Σxᵢ` cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    sum_x: f64,
}

impl Dataset {
    /// Requires at least two finite, strictly positive values that are not all equal.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidDataset(format!(
                "need n >= 2 observations, got {}",
                values.len()
            )));
        }
        if let Some((i, &x)) = values
            .iter()
            .enumerate()
            .find(|(_, &x)| !(x.is_finite() && x > 0.0))
        {
            return Err(Error::Domain(format!(
                "observation {} = {x} is not finite and positive",
                i + 1
            )));
        }
        if values.iter().all(|&x| x == values[0]) {
            return Err(Error::InvalidDataset("all observations are equal".into()));
        }
        let sum_x = values.iter().sum();
        Ok(Self { values, sum_x })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn sum_x(&self) -> f64 {
        self.sum_x
    }

    /// Rate of the exponential fit, `n / Σxᵢ`; the natural scale of λ.
    pub fn exp_rate(&self) -> f64 {
        self.n() as f64 / self.sum_x
    }

    /// `Σ ln(1 − e^{−λxᵢ})`, strictly negative for λ > 0.
    pub fn sum_ln_cdf_base(&self, lambda: f64) -> f64 {
        self.values
            .iter()
            .map(|&x| ln_one_minus_exp_neg(lambda * x))
            .sum()
    }

    /// `ln(−Σ ln(1 − e^{−λxᵢ}))`, accurate even when every term underflows.
    pub fn ln_neg_sum_ln_cdf_base(&self, lambda: f64) -> f64 {
        let terms: Vec<f64> = self
            .values
            .iter()
            .map(|&x| ln_neg_ln_one_minus_exp_neg(lambda * x))
            .collect();
        log_sum_exp(&terms)
    }
}

/// `ln(−ln(1 − e^{−t}))` for t > 0.
fn ln_neg_ln_one_minus_exp_neg(t: f64) -> f64 {
    if t < 30.0 {
        (-ln_one_minus_exp_neg(t)).ln()
    } else {
        // −ln(1 − u) = u(1 + u/2 + u²/3 + …) with u = e^{−t} < 1e-13
        let u = (-t).exp();
        -t + (0.5 * u).ln_1p()
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + terms.iter().map(|&t| (t - m).exp()).sum::<f64>().ln()
}

/// Outcome of the sufficient conditions for posterior propriety.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProprietyReport {
    pub proper: bool,
    pub reasons: Vec<String>,
}

impl ProprietyReport {
    pub fn into_result(self) -> Result<()> {
        if self.proper {
            Ok(())
        } else {
            Err(Error::Improper {
                reasons: self.reasons,
            })
        }
    }
}

/// Checks `a ≥ 1`, `b ≤ 1` and `n > a − 1`.
///
/// These are sufficient, not necessary; a failed check is treated as improper.
pub fn check_propriety(data: &Dataset, prior: &PriorSpec) -> ProprietyReport {
    let mut reasons = Vec::new();
    if prior.a < 1.0 {
        reasons.push("a ≥ 1 violated".to_string());
    }
    if prior.b > 1.0 {
        reasons.push("b ≤ 1 violated".to_string());
    }
    if !(data.n() as f64 > prior.a - 1.0) {
        reasons.push("n > a − 1 violated".to_string());
    }
    ProprietyReport {
        proper: reasons.is_empty(),
        reasons,
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

/// Unnormalized joint log posterior of (α, λ).
pub fn log_joint_posterior(
    alpha: f64,
    lambda: f64,
    data: &Dataset,
    prior: &PriorSpec,
) -> Result<f64> {
    check_positive("alpha", alpha)?;
    check_positive("lambda", lambda)?;
    let n = data.n() as f64;
    Ok((n - prior.a) * alpha.ln()
        + (n - prior.b) * lambda.ln()
        + (alpha - 1.0) * data.sum_ln_cdf_base(lambda)
        - lambda * data.sum_x())
}

/// Shape and rate of the Gamma conditional posterior of α given λ.
pub fn conditional_alpha_params(
    lambda: f64,
    data: &Dataset,
    prior: &PriorSpec,
) -> Result<(f64, f64)> {
    check_positive("lambda", lambda)?;
    let shape = conditional_alpha_shape(data, prior)?;
    let rate = -data.sum_ln_cdf_base(lambda);
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::Domain(format!(
            "conditional rate {rate} is not positive at lambda = {lambda}"
        )));
    }
    Ok((shape, rate))
}

/// Normalized log density of α given λ.
///
/// Works from `ln(rate)` so it stays finite where the rate itself underflows.
pub fn log_conditional_alpha(
    alpha: f64,
    lambda: f64,
    data: &Dataset,
    prior: &PriorSpec,
) -> Result<f64> {
    check_positive("alpha", alpha)?;
    check_positive("lambda", lambda)?;
    let shape = conditional_alpha_shape(data, prior)?;
    let ln_rate = data.ln_neg_sum_ln_cdf_base(lambda);
    Ok(shape * ln_rate - ln_gamma(shape) + (shape - 1.0) * alpha.ln() - alpha * ln_rate.exp())
}

fn conditional_alpha_shape(data: &Dataset, prior: &PriorSpec) -> Result<f64> {
    let shape = data.n() as f64 - prior.a + 1.0;
    if shape > 0.0 {
        Ok(shape)
    } else {
        Err(Error::Improper {
            reasons: vec!["n > a − 1 violated".to_string()],
        })
    }
}

/// Unnormalized log marginal posterior of λ (α integrated out).
pub fn log_marginal_lambda(lambda: f64, data: &Dataset, prior: &PriorSpec) -> Result<f64> {
    check_positive("lambda", lambda)?;
    let shape = conditional_alpha_shape(data, prior)?;
    Ok(log_marginal_unchecked(lambda, data, prior.b, shape))
}

pub(crate) fn log_marginal_unchecked(lambda: f64, data: &Dataset, b: f64, shape: f64) -> f64 {
    let n = data.n() as f64;
    (n - b) * lambda.ln() - lambda * data.sum_x() - data.sum_ln_cdf_base(lambda) + ln_gamma(shape)
        - shape * data.ln_neg_sum_ln_cdf_base(lambda)
}

/// Log density of `z = ln λ` up to a constant: the λ marginal plus the Jacobian `z`.
///
/// Returns `-inf` where `e^z` is not a usable positive number.
pub fn log_marginal_z(z: f64, data: &Dataset, prior: &PriorSpec) -> Result<f64> {
    let shape = conditional_alpha_shape(data, prior)?;
    Ok(log_marginal_z_unchecked(z, data, prior.b, shape))
}

pub(crate) fn log_marginal_z_unchecked(z: f64, data: &Dataset, b: f64, shape: f64) -> f64 {
    let lambda = z.exp();
    if !(lambda > 0.0 && lambda.is_finite()) {
        return f64::NEG_INFINITY;
    }
    let v = log_marginal_unchecked(lambda, data, b, shape) + z;
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Normalizing constant and moments of the λ marginal, by quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PosteriorSummary {
    /// Log of `∫ exp(log_marginal_lambda) dλ`.
    pub log_norm_const: f64,
    pub mean_lambda: f64,
    pub median_lambda: f64,
    pub sd_lambda: f64,
    /// Normalized density of λ at its median (for Monte Carlo error of the median).
    pub density_at_median_lambda: f64,
    pub mean_alpha: f64,
    /// Integration limits in `z = ln λ`.
    pub z_lo: f64,
    pub z_hi: f64,
}

impl PosteriorSummary {
    pub fn norm_const(&self) -> f64 {
        self.log_norm_const.exp()
    }
}

const SCAN_POINTS: usize = 2048;
const SCAN_DECADES: f64 = 8.0;
const TAIL_DROP_NATS: f64 = 50.0;
/// Support of `z = ln λ` used by the sampler and the quadrature oracle alike.
pub const Z_ABS_LIMIT: f64 = 700.0;
const QUAD_REL_TOL: f64 = 1e-10;

/// Quadrature oracle for the posterior of λ and E[α].
///
/// The integral is taken in `z = ln λ`, where the kernel is bounded for every
/// admissible prior. The bracket is found by a 2048-point scan across
/// `[1e-8, 1e8]·n/Σxᵢ`, then widened until the kernel is 50 nats under its peak.
pub fn quadrature_posterior_summary(data: &Dataset, prior: &PriorSpec) -> Result<PosteriorSummary> {
    check_propriety(data, prior).into_result()?;
    let shape = conditional_alpha_shape(data, prior)?;
    let lz = |z: f64| log_marginal_z_unchecked(z, data, prior.b, shape);

    let center = data.exp_rate().ln();
    let half = SCAN_DECADES * std::f64::consts::LN_10;
    let grid = linspace(center - half, center + half, SCAN_POINTS);
    let vals: Vec<f64> = grid.iter().map(|&z| lz(z)).collect();
    let imax = argmax(&vals).ok_or(Error::EmptySupport {
        lo: grid[0],
        hi: grid[SCAN_POINTS - 1],
    })?;
    if imax == 0 || imax == SCAN_POINTS - 1 {
        return Err(Error::NoConvergence(format!(
            "posterior mode of ln(lambda) not bracketed by scan over [{:.3}, {:.3}]",
            grid[0],
            grid[SCAN_POINTS - 1]
        )));
    }
    let peak = vals[imax];
    let tail_edge = |dir: f64| {
        // walk outward until 50 nats down; with b = 1 the lower tail is only
        // polynomial in |z| and the walk stops at the support limit instead
        let mut z = grid[imax];
        loop {
            z += dir * 0.5;
            if z.abs() >= Z_ABS_LIMIT {
                return dir * Z_ABS_LIMIT;
            }
            if lz(z) < peak - TAIL_DROP_NATS {
                return z;
            }
        }
    };
    let z_lo = tail_edge(-1.0);
    let z_hi = tail_edge(1.0);

    let kernel = |z: f64| (lz(z) - peak).exp();
    let mass = integrate(kernel, z_lo, z_hi, QUAD_REL_TOL, 0.0, 4000)?.value;
    let first = integrate(|z| z.exp() * kernel(z), z_lo, z_hi, QUAD_REL_TOL, 0.0, 4000)?.value;
    let second = integrate(
        |z| (2.0 * z).exp() * kernel(z),
        z_lo,
        z_hi,
        QUAD_REL_TOL,
        0.0,
        4000,
    )?
    .value;
    let e_alpha = integrate(
        |z| {
            let k = kernel(z);
            if k == 0.0 {
                0.0
            } else {
                shape / (-data.sum_ln_cdf_base(z.exp())) * k
            }
        },
        z_lo,
        z_hi,
        QUAD_REL_TOL,
        0.0,
        4000,
    )?
    .value;

    let mean_lambda = first / mass;
    let var = (second / mass - mean_lambda * mean_lambda).max(0.0);

    // median: bisection on the normalized CDF in z
    let cdf = |z: f64| -> Result<f64> {
        if z <= z_lo {
            return Ok(0.0);
        }
        Ok(integrate(kernel, z_lo, z, 1e-12, 1e-14 * mass, 4000)?.value / mass)
    };
    let (mut lo, mut hi) = (z_lo, z_hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid)? < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * mid.abs().max(1.0) {
            break;
        }
    }
    let z_med = 0.5 * (lo + hi);
    let median_lambda = z_med.exp();
    // density in λ = density in z / λ
    let density_at_median_lambda = kernel(z_med) / mass / median_lambda;

    Ok(PosteriorSummary {
        log_norm_const: peak + mass.ln(),
        mean_lambda,
        median_lambda,
        sd_lambda: var.sqrt(),
        density_at_median_lambda,
        mean_alpha: e_alpha / mass,
        z_lo,
        z_hi,
    })
}
