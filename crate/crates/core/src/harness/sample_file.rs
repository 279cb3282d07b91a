//! CSV storage of posterior draws.
//!
//! ```text
//! # seed=42
//! # r=1
//! # M=3
//! # a=1
//! # b=1
//! # acceptance_rate=0.71
//! alpha,lambda
//! 5.1,0.031
//! ...
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::diagnose::ChainDiagnostics;
use crate::harness::fit::FitConfig;
use crate::posterior::Dataset;
use crate::rou::{sample_posterior, PosteriorSample};

#[derive(Debug, Clone, PartialEq)]
pub struct SampleFile {
    pub metadata: BTreeMap<String, String>,
    pub alphas: Vec<f64>,
    pub lambdas: Vec<f64>,
}

pub fn format_sample(sample: &PosteriorSample) -> String {
    let mut s = String::with_capacity(40 * sample.len() + 128);
    let seed = sample
        .seed
        .map(|v| v.to_string())
        .unwrap_or_else(|| "none".into());
    let _ = writeln!(s, "# seed={seed}");
    let _ = writeln!(s, "# r={}", sample.r);
    let _ = writeln!(s, "# M={}", sample.len());
    let _ = writeln!(s, "# a={}", sample.prior.a());
    let _ = writeln!(s, "# b={}", sample.prior.b());
    let _ = writeln!(s, "# acceptance_rate={}", sample.acceptance_rate);
    s.push_str("alpha,lambda\n");
    for (a, l) in sample.alphas.iter().zip(&sample.lambdas) {
        let _ = writeln!(s, "{a},{l}");
    }
    s
}

pub fn write_sample_file(path: &Path, sample: &PosteriorSample) -> Result<()> {
    std::fs::write(path, format_sample(sample))?;
    Ok(())
}

pub fn parse_sample(text: &str) -> Result<SampleFile> {
    let mut metadata = BTreeMap::new();
    let mut alphas = Vec::new();
    let mut lambdas = Vec::new();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((k, v)) = meta.trim().split_once('=') {
                metadata.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        if !seen_header {
            if line != "alpha,lambda" {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected header `alpha,lambda`, got {line:?}"),
                });
            }
            seen_header = true;
            continue;
        }
        let (a, l) = line.split_once(',').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: "expected two comma-separated values".into(),
        })?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    line: line_no,
                    msg: format!("not a finite number: {s:?}"),
                })
        };
        alphas.push(parse(a)?);
        lambdas.push(parse(l)?);
    }
    if !seen_header {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            msg: "missing `alpha,lambda` header".into(),
        });
    }
    Ok(SampleFile {
        metadata,
        alphas,
        lambdas,
    })
}

pub fn read_sample_file(path: &Path) -> Result<SampleFile> {
    parse_sample(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

pub const HISTOGRAM_BINS: usize = 40;

fn histogram(xs: &[f64], bins: usize) -> Histogram {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo {
        (hi - lo) / bins as f64
    } else {
        1.0
    };
    let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0; bins];
    for &x in xs {
        let i = (((x - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    Histogram { edges, counts }
}

/// Data behind trace, density and ACF plots of a posterior sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSummary {
    #[serde(rename = "M")]
    pub draws: usize,
    pub acceptance_rate: f64,
    pub alpha: ChainDiagnostics,
    pub lambda: ChainDiagnostics,
    pub alpha_histogram: Histogram,
    pub lambda_histogram: Histogram,
}

impl SampleSummary {
    pub fn compute(sample: &PosteriorSample) -> Result<Self> {
        Ok(Self {
            draws: sample.len(),
            acceptance_rate: sample.acceptance_rate,
            alpha: ChainDiagnostics::compute(&sample.alphas)?,
            lambda: ChainDiagnostics::compute(&sample.lambdas)?,
            alpha_histogram: histogram(&sample.alphas, HISTOGRAM_BINS),
            lambda_histogram: histogram(&sample.lambdas, HISTOGRAM_BINS),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

/// Companion path for the summary of `out`: `draws.csv` → `draws.summary.json`.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

/// Draws from the posterior, writes the sample file and its JSON summary.
pub fn cmd_sample(
    data: &Dataset,
    cfg: &FitConfig,
    out: &Path,
) -> Result<(PosteriorSample, SampleSummary)> {
    let sample = sample_posterior(data, &cfg.prior, cfg.r, cfg.draws, cfg.seed)?;
    let summary = SampleSummary::compute(&sample)?;
    write_sample_file(out, &sample)?;
    std::fs::write(summary_path(out), summary.to_json())?;
    Ok((sample, summary))
}
