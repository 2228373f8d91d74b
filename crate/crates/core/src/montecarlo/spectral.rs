use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::sample::{eigenvalues, sample_matrix};
use super::EnsembleConfig;
use crate::error::{Error, Result};
use crate::rational;

/// `4 exp(16 V4 chi) n / (s^{3/2} (1+eps)^{2s})` with `s = floor(chi rho)`.
/// Infinite when `s = 0`.
pub fn spectral_norm_bound(n: usize, rho: f64, chi: f64, v4: f64, eps: f64) -> f64 {
    let s = (chi * rho).floor();
    if s < 1.0 {
        return f64::INFINITY;
    }
    let log = 4f64.ln() + 16.0 * v4 * chi + (n as f64).ln() - 1.5 * s.ln() - 2.0 * s * (1.0 + eps).ln();
    log.exp()
}

/// Default `chi = 1 / (4^11 U^2)`.
pub fn default_chi(sup_norm: f64) -> f64 {
    1.0 / (4f64.powi(11) * sup_norm * sup_norm)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub eps: f64,
    pub exceedances: usize,
    pub frequency: f64,
    pub bound: f64,
    /// The bound is at least 1 and so says nothing.
    pub vacuous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub lambda_max: Vec<f64>,
    pub median: f64,
    pub chi: f64,
    pub s: u64,
    pub rows: Vec<BoundRow>,
}

/// Largest absolute eigenvalue per sample and, for each `eps`, how often
/// it reaches `2(1 + eps)` next to the tail bound.
pub fn spectral_norm_study(config: &EnsembleConfig, eps_list: &[f64], chi: Option<f64>) -> Result<SpectralSummary> {
    config.validate()?;
    if let Some(e) = eps_list.iter().find(|e| !(**e > 0.0)) {
        return Err(Error::Config(format!("eps values must be positive, got {e}")));
    }
    let chi = chi.unwrap_or_else(|| default_chi(config.dist.sup_norm()));
    if !(chi > 0.0) {
        return Err(Error::Config(format!("chi must be positive, got {chi}")));
    }
    let results: Vec<Result<f64>> = (0..config.samples as u64)
        .into_par_iter()
        .map(|k| {
            let ev = eigenvalues(&sample_matrix(config, k))?;
            Ok(ev.iter().fold(0.0f64, |m, x| m.max(x.abs())))
        })
        .collect();
    let mut lambda_max = Vec::with_capacity(results.len());
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => lambda_max.push(v),
            Err(e) => log::warn!("sample {k} discarded: {e}"),
        }
    }
    if lambda_max.is_empty() {
        return Err(Error::Inconsistency("every sample was discarded".into()));
    }
    let mut sorted = lambda_max.clone();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let median = if m % 2 == 1 { sorted[m / 2] } else { 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]) };
    let rho = config.rho_f64();
    let v4 = rational::to_f64(&config.dist.v4());
    let rows = eps_list
        .iter()
        .map(|&eps| {
            let exceedances = lambda_max.iter().filter(|&&l| l >= 2.0 * (1.0 + eps)).count();
            let bound = spectral_norm_bound(config.n, rho, chi, v4, eps);
            BoundRow { eps, exceedances, frequency: exceedances as f64 / m as f64, bound, vacuous: bound >= 1.0 }
        })
        .collect();
    Ok(SpectralSummary { lambda_max, median, chi, s: (chi * rho).floor() as u64, rows })
}

/// One value per line.
pub fn write_lambda_dump<W: Write>(mut out: W, summary: &SpectralSummary) -> Result<()> {
    for l in &summary.lambda_max {
        writeln!(out, "{l}")?;
    }
    Ok(())
}
