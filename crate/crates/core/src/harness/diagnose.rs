use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::diagnostics::{acf, geweke_z, GEWEKE_FIRST, GEWEKE_LAST};
use crate::error::Result;
use crate::harness::read_sample_file;

pub const QUANTILE_LEVELS: [f64; 5] = [0.025, 0.25, 0.5, 0.75, 0.975];
pub const ACF_MAX_LAG: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainDiagnostics {
    pub mean: f64,
    pub sd: f64,
    /// `(level, value)` pairs at [`QUANTILE_LEVELS`].
    pub quantiles: Vec<(f64, f64)>,
    pub geweke_z: f64,
    /// Lags `0..=max_lag`.
    pub acf: Vec<f64>,
}

/// Type-7 (linear interpolation) sample quantile of sorted data.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl ChainDiagnostics {
    pub fn compute(chain: &[f64]) -> Result<Self> {
        let n = chain.len() as f64;
        let mean = chain.iter().sum::<f64>() / n;
        let sd = (chain.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let mut sorted = chain.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let quantiles = QUANTILE_LEVELS
            .iter()
            .map(|&p| (p, quantile_sorted(&sorted, p)))
            .collect();
        let max_lag = ACF_MAX_LAG.min(chain.len().saturating_sub(1) / 2).max(1);
        Ok(Self {
            mean,
            sd,
            quantiles,
            geweke_z: geweke_z(chain, GEWEKE_FIRST, GEWEKE_LAST)?,
            acf: acf(chain, max_lag)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnoseReport {
    #[serde(rename = "M")]
    pub draws: usize,
    pub alpha: ChainDiagnostics,
    pub lambda: ChainDiagnostics,
}

impl DiagnoseReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Recomputes Geweke scores, ACF and quantiles from a sample file.
pub fn cmd_diagnose(path: &Path) -> Result<DiagnoseReport> {
    let file = read_sample_file(path)?;
    Ok(DiagnoseReport {
        draws: file.alphas.len(),
        alpha: ChainDiagnostics::compute(&file.alphas)?,
        lambda: ChainDiagnostics::compute(&file.lambdas)?,
    })
}

impl fmt::Display for DiagnoseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "draws: {}", self.draws)?;
        for (name, c) in [("alpha", &self.alpha), ("lambda", &self.lambda)] {
            writeln!(
                f,
                "{name}: mean {:.6}, sd {:.6}, Geweke z {:.4}",
                c.mean, c.sd, c.geweke_z
            )?;
            let qs: Vec<String> = c
                .quantiles
                .iter()
                .map(|(p, q)| format!("q{p}={q:.6}"))
                .collect();
            writeln!(f, "  {}", qs.join(" "))?;
        }
        writeln!(f, "{:>4}{:>12}{:>12}", "lag", "acf_alpha", "acf_lambda")?;
        for (k, (a, l)) in self.alpha.acf.iter().zip(&self.lambda.acf).enumerate() {
            writeln!(f, "{k:>4}{a:>12.5}{l:>12.5}")?;
        }
        Ok(())
    }
}
