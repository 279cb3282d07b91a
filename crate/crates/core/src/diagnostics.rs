//! Goodness-of-fit and sampler diagnostics.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KsMethod {
    Exact,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    pub method: KsMethod,
}

/// Largest sample size for which the exact null distribution is used.
pub const KS_EXACT_MAX_N: usize = 100;

/// One-sample Kolmogorov–Smirnov test of `data` against `cdf`.
pub fn ks_test<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> Result<KsResult> {
    if data.is_empty() {
        return Err(Error::InvalidParameter(
            "K-S test needs at least one observation".into(),
        ));
    }
    if data.iter().any(|x| x.is_nan()) {
        return Err(Error::Domain("K-S data contains NaN".into()));
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Domain(format!("cdf({x}) = {f} is outside [0, 1]")));
        }
        d = d.max((i + 1) as f64 / nf - f).max(f - i as f64 / nf);
    }
    let (p_value, method) = ks_p_value(d, n);
    Ok(KsResult {
        statistic: d,
        p_value,
        n,
        method,
    })
}

/// `P(D_n ≥ d)`: exact for `n ≤ 100`, limiting Kolmogorov law otherwise.
pub fn ks_p_value(d: f64, n: usize) -> (f64, KsMethod) {
    if n <= KS_EXACT_MAX_N {
        (
            (1.0 - kolmogorov_cdf_exact(n, d)).clamp(0.0, 1.0),
            KsMethod::Exact,
        )
    } else {
        (
            kolmogorov_q((n as f64).sqrt() * d).clamp(0.0, 1.0),
            KsMethod::Asymptotic,
        )
    }
}

/// `P(D_n < d)` by the Marsaglia–Tsang–Wang matrix-power method.
pub fn kolmogorov_cdf_exact(n: usize, d: f64) -> f64 {
    let nf = n as f64;
    if d <= 0.5 / nf {
        // below the smallest attainable statistic 1/(2n)
        return 0.0;
    }
    if d >= 1.0 {
        return 1.0;
    }
    let k = (nf * d) as usize + 1;
    let m = 2 * k - 1;
    let h = k as f64 - nf * d;

    let mut hm = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            if i + 1 >= j {
                hm[i * m + j] = 1.0;
            }
        }
    }
    for i in 0..m {
        hm[i * m] -= h.powi(i as i32 + 1);
        hm[(m - 1) * m + i] -= h.powi((m - i) as i32);
    }
    if 2.0 * h - 1.0 > 0.0 {
        hm[(m - 1) * m] += (2.0 * h - 1.0).powi(m as i32);
    }
    for i in 0..m {
        for j in 0..m {
            if i + 1 > j {
                for g in 1..=(i + 1 - j) {
                    hm[i * m + j] /= g as f64;
                }
            }
        }
    }
    let (q, mut exp10) = matrix_power(&hm, m, n);
    let mut s = q[(k - 1) * m + k - 1];
    for i in 1..=n {
        s = s * i as f64 / nf;
        if s < 1e-140 {
            s *= 1e140;
            exp10 -= 140;
        }
    }
    s * 10f64.powi(exp10)
}

fn matrix_mul(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut c = vec![0.0; m * m];
    for i in 0..m {
        for l in 0..m {
            let ail = a[i * m + l];
            if ail == 0.0 {
                continue;
            }
            for j in 0..m {
                c[i * m + j] += ail * b[l * m + j];
            }
        }
    }
    c
}

/// `A^p` as a mantissa matrix and a power-of-ten exponent.
fn matrix_power(a: &[f64], m: usize, p: usize) -> (Vec<f64>, i32) {
    if p == 1 {
        return (a.to_vec(), 0);
    }
    let (half, e_half) = matrix_power(a, m, p / 2);
    let mut v = matrix_mul(&half, &half, m);
    let mut e = 2 * e_half;
    if p % 2 == 1 {
        v = matrix_mul(a, &v, m);
    }
    if v[(m / 2) * m + m / 2] > 1e140 {
        for x in v.iter_mut() {
            *x *= 1e-140;
        }
        e += 140;
    }
    (v, e)
}

/// Survival function of the Kolmogorov distribution, `Q(t) = 2Σ(−1)^{k−1} e^{−2k²t²}`.
pub fn kolmogorov_q(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t < 1.0 {
        // Jacobi-transformed series converges fast for small t
        let pi = std::f64::consts::PI;
        let w = -pi * pi / (8.0 * t * t);
        let s: f64 = (1..=20)
            .map(|k| ((2 * k - 1) as f64).powi(2) * w)
            .map(f64::exp)
            .sum();
        return 1.0 - (2.0 * pi).sqrt() / t * s;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * t * t).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    2.0 * s
}

fn mean_and_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v)
}

pub const GEWEKE_FIRST: f64 = 0.1;
pub const GEWEKE_LAST: f64 = 0.5;

/// Geweke z-score comparing the first `frac_first` and last `frac_last` of a chain.
///
/// Segment variances are plain sample variances (appropriate for independent draws).
pub fn geweke_z(chain: &[f64], frac_first: f64, frac_last: f64) -> Result<f64> {
    if chain.len() < 100 {
        return Err(Error::InvalidParameter(format!(
            "Geweke needs >= 100 draws, got {}",
            chain.len()
        )));
    }
    if !(frac_first > 0.0 && frac_last > 0.0 && frac_first + frac_last <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Geweke fractions must be positive with sum <= 1, got {frac_first} and {frac_last}"
        )));
    }
    let len = chain.len();
    let n1 = ((frac_first * len as f64).floor() as usize).max(2);
    let n2 = ((frac_last * len as f64).floor() as usize).max(2);
    let (m1, v1) = mean_and_var(&chain[..n1]);
    let (m2, v2) = mean_and_var(&chain[len - n2..]);
    let se2 = v1 / n1 as f64 + v2 / n2 as f64;
    if !(se2 > 0.0) {
        return Err(Error::DegenerateChain(
            "both Geweke segments have zero variance".into(),
        ));
    }
    Ok((m1 - m2) / se2.sqrt())
}

/// Sample autocorrelations at lags `0..=max_lag` with the biased normalization.
pub fn acf(chain: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = chain.len();
    if max_lag == 0 || 2 * max_lag >= n {
        return Err(Error::InvalidParameter(format!(
            "acf needs 1 <= max_lag < n/2, got lag {max_lag} for n = {n}"
        )));
    }
    let mean = chain.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = chain.iter().map(|x| x - mean).collect();
    let denom: f64 = centered.iter().map(|c| c * c).sum();
    if !(denom > 0.0) {
        return Err(Error::DegenerateChain(
            "constant chain has no autocorrelation".into(),
        ));
    }
    Ok((0..=max_lag)
        .map(|k| {
            if k == 0 {
                1.0
            } else {
                centered[..n - k]
                    .iter()
                    .zip(&centered[k..])
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    / denom
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledErrors {
    pub sbias: f64,
    pub srmse: f64,
}

/// Bias and RMSE of `estimates` about `truth`, each divided by `truth`.
pub fn scaled_errors(estimates: &[f64], truth: f64) -> Result<ScaledErrors> {
    if estimates.is_empty() {
        return Err(Error::InvalidParameter(
            "scaled errors need at least one estimate".into(),
        ));
    }
    if truth == 0.0 || !truth.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "truth must be finite and nonzero, got {truth}"
        )));
    }
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let mse = estimates.iter().map(|e| (e - truth).powi(2)).sum::<f64>() / n;
    Ok(ScaledErrors {
        sbias: (mean - truth) / truth,
        srmse: mse.sqrt() / truth,
    })
}
