//! Generalized ratio-of-uniforms sampling.
//!
//! For an unnormalized density `p` and exponent `r ≥ 0`, a point `(u, v)`
//! uniform on `{0 < u ≤ p(v/u^r)^{1/(r+1)}}` gives `v/u^r ~ p`. The region is
//! enclosed in the rectangle `[0, a] × [b⁻, b⁺]` with
//! `a = sup p^{1/(r+1)}` and `b± = sup/inf of x·p(x)^{r/(r+1)}`.
//!
//! Densities are handled in log space and shifted by their maximum, so the
//! height `a` is exactly 1.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimize::{argmax, golden_section_max, linspace};
use crate::posterior::{
    check_propriety, conditional_alpha_params, log_marginal_z_unchecked, Dataset, PriorSpec,
    Z_ABS_LIMIT,
};

/// Bounding rectangle of the ratio-of-uniforms region, after log-shifting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RouBounds {
    pub r: f64,
    pub a_bound: f64,
    pub b_minus: f64,
    pub b_plus: f64,
    /// Maximum of the log density; subtracted before exponentiation.
    pub log_shift: f64,
}

const SCAN_POINTS: usize = 1024;
const GOLDEN_REL_TOL: f64 = 1e-10;
const SAFETY_INFLATION: f64 = 1e-8;

/// Computes the bounding rectangle of `log_density` on `bracket`.
///
/// Each extremum is located by a 1024-point scan and refined by golden-section
/// search between the neighbours of the best scan point.
pub fn rou_bounds<F: Fn(f64) -> f64>(
    log_density: F,
    r: f64,
    bracket: (f64, f64),
) -> Result<RouBounds> {
    let (lo, hi) = bracket;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "r must be finite and >= 0, got {r}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "bracket must be finite with lo < hi, got [{lo}, {hi}]"
        )));
    }
    let ld = |x: f64| {
        let v = log_density(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let grid = linspace(lo, hi, SCAN_POINTS);
    let vals: Vec<f64> = grid.iter().map(|&x| ld(x)).collect();
    let imax = argmax(&vals).ok_or(Error::EmptySupport { lo, hi })?;
    if imax == 0 || imax == SCAN_POINTS - 1 {
        return Err(Error::BracketTooSmall {
            lo,
            hi,
            at: grid[imax],
        });
    }
    let (_, log_shift, _) = golden_section_max(ld, grid[imax - 1], grid[imax + 1], GOLDEN_REL_TOL);
    let log_shift = log_shift.max(vals[imax]);

    let power = r / (r + 1.0);
    // x·p(x)^{r/(r+1)} on the shifted density
    let weighted = |x: f64| {
        let v = ld(x);
        if v == f64::NEG_INFINITY {
            0.0
        } else {
            x * (power * (v - log_shift)).exp()
        }
    };

    let extremum = |sign: f64| -> Result<f64> {
        let g: Vec<f64> = grid.iter().map(|&x| sign * weighted(x)).collect();
        let i = argmax(&g).ok_or(Error::EmptySupport { lo, hi })?;
        if g[i] <= 0.0 {
            // region lies entirely on the other side of zero
            return Ok(0.0);
        }
        if i == 0 || i == SCAN_POINTS - 1 {
            return Err(Error::BracketTooSmall {
                lo,
                hi,
                at: grid[i],
            });
        }
        let (_, best, _) = golden_section_max(
            |x| sign * weighted(x),
            grid[i - 1],
            grid[i + 1],
            GOLDEN_REL_TOL,
        );
        Ok(sign * best.max(g[i]))
    };
    let b_plus = extremum(1.0)?;
    let b_minus = extremum(-1.0)?;

    Ok(RouBounds {
        r,
        a_bound: 1.0,
        b_minus: b_minus * (1.0 + SAFETY_INFLATION),
        b_plus: b_plus * (1.0 + SAFETY_INFLATION),
        log_shift,
    })
}

const EFFICIENCY_CHECK_AFTER: u64 = 1_000_000;
const MIN_ACCEPTANCE: f64 = 1e-4;

/// Draws `m` values from the normalized `log_density` by ratio-of-uniforms.
///
/// A proposal `(U, V)` is accepted when `(r+1)·ln U ≤ log_density(V/U^r) − log_shift`.
/// Returns the draws and the fraction of proposals accepted.
pub fn rou_sample_1d<F, R>(
    log_density: F,
    bounds: &RouBounds,
    m: usize,
    rng: &mut R,
) -> Result<(Vec<f64>, f64)>
where
    F: Fn(f64) -> f64,
    R: Rng + ?Sized,
{
    if m == 0 {
        return Err(Error::InvalidParameter(
            "number of draws must be >= 1".into(),
        ));
    }
    if !(bounds.b_minus < bounds.b_plus) {
        return Err(Error::InvalidParameter(format!(
            "degenerate rectangle: b_minus = {} >= b_plus = {}",
            bounds.b_minus, bounds.b_plus
        )));
    }
    let r = bounds.r;
    let width = bounds.b_plus - bounds.b_minus;
    let mut draws = Vec::with_capacity(m);
    let mut proposals: u64 = 0;
    while draws.len() < m {
        let u = bounds.a_bound * rng.random::<f64>();
        let v = bounds.b_minus + width * rng.random::<f64>();
        proposals += 1;
        if u > 0.0 {
            let rho = if r == 0.0 { v } else { v / u.powf(r) };
            if rho.is_finite() && (r + 1.0) * u.ln() <= log_density(rho) - bounds.log_shift {
                draws.push(rho);
            }
        }
        if proposals == EFFICIENCY_CHECK_AFTER {
            let rate = draws.len() as f64 / proposals as f64;
            if rate < MIN_ACCEPTANCE {
                return Err(Error::LowAcceptance { rate, proposals });
            }
        }
    }
    Ok((draws, m as f64 / proposals as f64))
}

/// One draw from Gamma(shape, rate) (density ∝ x^{shape−1} e^{−rate·x}).
///
/// Marsaglia–Tsang squeeze for shape ≥ 1; shape < 1 draws at shape + 1 and
/// multiplies by `U^{1/shape}`.
pub fn gamma_variate<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0 && shape.is_finite()) || !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma needs shape, rate > 0, got ({shape}, {rate})"
        )));
    }
    if shape < 1.0 {
        let boosted = marsaglia_tsang(shape + 1.0, rng);
        let u: f64 = loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break u;
            }
        };
        return Ok(boosted * u.powf(1.0 / shape) / rate);
    }
    Ok(marsaglia_tsang(shape, rng) / rate)
}

fn marsaglia_tsang<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = rng.random();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u > 0.0 && u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Joint posterior draws of (α, λ).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorSample {
    pub alphas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub r: f64,
    pub acceptance_rate: f64,
    pub seed: Option<u64>,
    pub prior: PriorSpec,
    /// Rectangle used for `z − mode`, where `z = ln λ`.
    pub bounds: RouBounds,
    /// Posterior mode of `z = ln λ`, the relocation point of the sampler.
    pub mode_z: f64,
}

impl PosteriorSample {
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }
}

const BRACKET_STEP: f64 = 2.0;
const BRACKET_DROP: f64 = 50.0;
const BRACKET_CAP: f64 = Z_ABS_LIMIT + BRACKET_STEP;

/// Bracket for `z = ln λ`: start at `ln(n/Σx)` and step outward by 2 until the
/// density is 50 nats below the running maximum, at most 702 each way.
pub fn auto_bracket<F: Fn(f64) -> f64>(log_density: F, center: f64) -> (f64, f64) {
    let mut running_max = log_density(center);
    let mut edge = |dir: f64| {
        let mut offset = 0.0;
        while offset < BRACKET_CAP {
            offset += BRACKET_STEP;
            let v = log_density(center + dir * offset);
            if v > running_max {
                running_max = v;
            } else if v < running_max - BRACKET_DROP {
                break;
            }
        }
        center + dir * offset
    };
    let lo = edge(-1.0);
    let hi = edge(1.0);
    (lo, hi)
}

fn locate_mode<F: Fn(f64) -> f64>(log_density: F, (lo, hi): (f64, f64)) -> Result<f64> {
    let grid = linspace(lo, hi, SCAN_POINTS);
    let vals: Vec<f64> = grid.iter().map(|&x| log_density(x)).collect();
    let i = argmax(&vals).ok_or(Error::EmptySupport { lo, hi })?;
    if i == 0 || i == SCAN_POINTS - 1 {
        return Err(Error::BracketTooSmall {
            lo,
            hi,
            at: grid[i],
        });
    }
    let (x, fx, _) = golden_section_max(&log_density, grid[i - 1], grid[i + 1], GOLDEN_REL_TOL);
    Ok(if fx >= vals[i] { x } else { grid[i] })
}

/// Exact independent draws from the joint posterior, seeded with `seed`.
pub fn sample_posterior(
    data: &Dataset,
    prior: &PriorSpec,
    r: f64,
    m: usize,
    seed: u64,
) -> Result<PosteriorSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = sample_posterior_with_rng(data, prior, r, m, &mut rng)?;
    sample.seed = Some(seed);
    Ok(sample)
}

/// As [`sample_posterior`], drawing from a caller-supplied stream.
///
/// λ is sampled as `e^z` with `z` drawn by ratio-of-uniforms from the log
/// marginal of `z = ln λ`; each α is then drawn from its Gamma conditional.
pub fn sample_posterior_with_rng<R: Rng + ?Sized>(
    data: &Dataset,
    prior: &PriorSpec,
    r: f64,
    m: usize,
    rng: &mut R,
) -> Result<PosteriorSample> {
    check_propriety(data, prior).into_result()?;
    if r == 0.0 {
        return Err(Error::InvalidParameter(
            "r = 0 is not valid for the unbounded support of ln(lambda)".into(),
        ));
    }
    let shape = data.n() as f64 - prior.a() + 1.0;
    let b = prior.b();
    // same truncated support as the quadrature oracle
    let log_density = |z: f64| {
        if z.abs() > Z_ABS_LIMIT {
            f64::NEG_INFINITY
        } else {
            log_marginal_z_unchecked(z, data, b, shape)
        }
    };

    let (lo, hi) = auto_bracket(log_density, data.exp_rate().ln());
    // relocating to the mode keeps the rectangle tight; the draws stay exact
    let mode = locate_mode(log_density, (lo, hi))?;
    let centered = |w: f64| log_density(w + mode);
    let bounds = rou_bounds(centered, r, (lo - mode, hi - mode))?;
    let (ws, acceptance_rate) = rou_sample_1d(centered, &bounds, m, rng)?;

    let mut alphas = Vec::with_capacity(m);
    let mut lambdas = Vec::with_capacity(m);
    for w in ws {
        let lambda = (w + mode).exp();
        let (shape, rate) = conditional_alpha_params(lambda, data, prior)?;
        alphas.push(gamma_variate(shape, rate, rng)?);
        lambdas.push(lambda);
    }
    Ok(PosteriorSample {
        alphas,
        lambdas,
        r,
        acceptance_rate,
        seed: None,
        prior: *prior,
        bounds,
        mode_z: mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_normal(z: f64) -> f64 {
        -0.5 * z * z
    }

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn normal_bounds_r1() {
        let b = rou_bounds(std_normal, 1.0, (-10.0, 10.0)).unwrap();
        let expect = 2f64.sqrt() * (-0.5f64).exp();
        assert_eq!(b.a_bound, 1.0);
        assert!(b.log_shift.abs() < 1e-15);
        // bounds carry a 1e-8 relative safety margin
        assert!((b.b_plus - expect).abs() < 2e-8 && b.b_plus >= expect);
        assert!((b.b_minus + expect).abs() < 2e-8 && b.b_minus <= -expect);
    }

    #[test]
    fn normal_bounds_r0_needs_wider_bracket() {
        assert!(matches!(
            rou_bounds(std_normal, 0.0, (-10.0, 10.0)),
            Err(Error::BracketTooSmall { .. })
        ));
    }

    #[test]
    fn bounds_errors() {
        assert!(matches!(
            rou_bounds(|_| f64::NEG_INFINITY, 1.0, (0.0, 1.0)),
            Err(Error::EmptySupport { .. })
        ));
        // increasing density: mode at the right edge
        assert!(matches!(
            rou_bounds(|x| x, 1.0, (0.0, 1.0)),
            Err(Error::BracketTooSmall { .. })
        ));
        assert!(rou_bounds(std_normal, -1.0, (-5.0, 5.0)).is_err());
    }

    #[test]
    fn shifted_height_is_one_for_any_density() {
        for (ld, br) in [
            (
                Box::new(|x: f64| -0.5 * (x - 3.0).powi(2) + 40.0) as Box<dyn Fn(f64) -> f64>,
                (-10.0, 20.0),
            ),
            (
                Box::new(|x: f64| {
                    if x > 0.0 {
                        2.0 * x.ln() - x
                    } else {
                        f64::NEG_INFINITY
                    }
                }),
                (-1.0, 60.0),
            ),
        ] {
            for r in [0.5, 1.0, 2.0] {
                let b = rou_bounds(&ld, r, br).unwrap();
                assert_eq!(b.a_bound, 1.0);
                assert!(b.b_minus < b.b_plus);
            }
        }
    }

    #[test]
    fn normal_moments_r1() {
        let b = rou_bounds(std_normal, 1.0, (-10.0, 10.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (xs, rate) = rou_sample_1d(std_normal, &b, 100_000, &mut rng).unwrap();
        let (m, v) = mean_var(&xs);
        assert!(m.abs() < 0.02, "mean {m}");
        assert!((v - 1.0).abs() < 0.03, "var {v}");
        // |C(1)| / rectangle = (√(2π)/2) / (2·√2·e^{-1/2})
        assert!((rate - 0.730_57).abs() < 0.01, "rate {rate}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let b = rou_bounds(std_normal, 1.0, (-10.0, 10.0)).unwrap();
        let a = rou_sample_1d(std_normal, &b, 500, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let c = rou_sample_1d(std_normal, &b, 500, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn low_acceptance_is_reported() {
        // rectangle far larger than the region
        let b = RouBounds {
            r: 1.0,
            a_bound: 1.0,
            b_minus: -1e6,
            b_plus: 1e6,
            log_shift: 0.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            rou_sample_1d(|z: f64| -0.5 * z * z, &b, 1000, &mut rng),
            Err(Error::LowAcceptance { .. })
        ));
    }

    #[test]
    fn gamma_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 100_000;
        for (shape, rate) in [(1.0, 2.5), (22.0, 10.0), (0.5, 3.0)] {
            let xs: Vec<f64> = (0..n)
                .map(|_| gamma_variate(shape, rate, &mut rng).unwrap())
                .collect();
            let (m, v) = mean_var(&xs);
            let true_mean = shape / rate;
            let true_var = shape / (rate * rate);
            assert!(
                (m - true_mean).abs() < 3.0 * (true_var / n as f64).sqrt(),
                "shape {shape}: mean {m}"
            );
            assert!((v / true_var - 1.0).abs() < 0.05, "shape {shape}: var {v}");
        }
        assert!(gamma_variate(0.0, 1.0, &mut rng).is_err());
        assert!(gamma_variate(1.0, -1.0, &mut rng).is_err());
    }

    #[test]
    fn posterior_rejects_improper_prior_and_r0() {
        let d = Dataset::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            sample_posterior(&d, &PriorSpec::new(1.0, 2.0).unwrap(), 1.0, 10, 0),
            Err(Error::Improper { .. })
        ));
        assert!(sample_posterior(&d, &PriorSpec::jeffreys(), 0.0, 10, 0).is_err());
    }

    #[test]
    fn posterior_sample_shape_and_determinism() {
        let d = Dataset::new(vec![0.5, 1.5, 0.9, 2.2, 1.1]).unwrap();
        let p = PriorSpec::jeffreys();
        let s1 = sample_posterior(&d, &p, 1.0, 300, 77).unwrap();
        let s2 = sample_posterior(&d, &p, 1.0, 300, 77).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(s1.len(), 300);
        assert_eq!(s1.seed, Some(77));
        assert!(s1
            .alphas
            .iter()
            .chain(&s1.lambdas)
            .all(|v| v.is_finite() && *v > 0.0));
        assert!(s1.acceptance_rate > 0.0 && s1.acceptance_rate <= 1.0);
        // z-space support straddles zero here, so both sides of the rectangle are used
        assert!(s1.bounds.b_minus < 0.0 || s1.bounds.b_plus > 0.0);
    }
}
