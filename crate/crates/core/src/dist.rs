//! The two-parameter generalized exponential law with CDF `(1 - e^{-λx})^α`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{digamma, ln_one_minus_exp_neg, trigamma, EULER_GAMMA};

/// Shape `alpha` and rate `lambda` of a GE distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeParams {
    alpha: f64,
    lambda: f64,
}

impl GeParams {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite and > 0, got {alpha}"
            )));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and > 0, got {lambda}"
            )));
        }
        Ok(Self { alpha, lambda })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Distribution function. Non-positive `x` maps to 0 and `+inf` to 1.
pub fn ge_cdf(x: f64, p: &GeParams) -> Result<f64> {
    if x.is_nan() || x == f64::NEG_INFINITY {
        return Err(Error::Domain(format!(
            "cdf argument must be a number, got {x}"
        )));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    Ok((p.alpha * ln_one_minus_exp_neg(p.lambda * x)).exp())
}

/// Log density `ln α + ln λ + (α-1) ln(1 - e^{-λx}) - λx`.
pub fn ge_logpdf(x: f64, p: &GeParams) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!(
            "density requires finite x > 0, got {x}"
        )));
    }
    let t = p.lambda * x;
    let log_term = if p.alpha == 1.0 {
        0.0
    } else {
        (p.alpha - 1.0) * ln_one_minus_exp_neg(t)
    };
    Ok(p.alpha.ln() + p.lambda.ln() + log_term - t)
}

/// Closed-form inverse of [`ge_cdf`].
pub fn ge_quantile(prob: f64, p: &GeParams) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::Domain(format!(
            "quantile requires 0 < prob < 1, got {prob}"
        )));
    }
    // 1 - prob^{1/α} = -expm1(ln(prob)/α)
    let q = -(prob.ln() / p.alpha).exp_m1();
    Ok(-q.ln() / p.lambda)
}

/// `m` independent draws by inverse-CDF.
pub fn ge_sample<R: Rng + ?Sized>(p: &GeParams, m: usize, rng: &mut R) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::InvalidParameter("sample size must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        // open interval (0, 1)
        let u: f64 = rng.random();
        if u <= 0.0 {
            continue;
        }
        let x = ge_quantile(u, p)?;
        if x > 0.0 && x.is_finite() {
            out.push(x);
        }
    }
    Ok(out)
}

/// Entries of the symmetric 2×2 Fisher information for `n` observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherInfo {
    pub i_aa: f64,
    pub i_al: f64,
    pub i_ll: f64,
    pub n: usize,
}

const FISHER_SINGULAR_TOL: f64 = 1e-6;

/// Fisher information of `n` observations.
///
/// The closed form has removable singularities at α = 1 and α = 2; those
/// points are refused rather than patched.
pub fn fisher_info(p: &GeParams, n: usize) -> Result<FisherInfo> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let a = p.alpha;
    let l = p.lambda;
    for point in [1.0, 2.0] {
        if (a - point).abs() < FISHER_SINGULAR_TOL {
            return Err(Error::Singularity { point, alpha: a });
        }
    }
    let nf = n as f64;
    let c = EULER_GAMMA;
    let psi = digamma(a);
    let bracket = std::f64::consts::PI.powi(2) - 6.0 * trigamma(a) - 12.0 * c - 12.0 * psi
        + 6.0 * c * c
        + 12.0 * c * psi
        + 6.0 * psi * psi;
    Ok(FisherInfo {
        i_aa: nf / (a * a),
        i_al: nf * (digamma(2.0) - digamma(a + 1.0)) / (l * (a - 1.0)),
        i_ll: nf / (l * l) + nf * a * bracket / (6.0 * l * l * (a - 2.0)),
        n,
    })
}
