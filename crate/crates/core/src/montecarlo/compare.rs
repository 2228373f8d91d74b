use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::sample::{sample_matrix, trace_powers};
use super::{EnsembleConfig, MeanStderr};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::series::{solve_moment_series, SeriesParams};
use crate::walks::{enum_ceiling, exact_moment, MomentParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub s: usize,
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Sample means of `Tr H^{2s}` for `s = 1..=s_max`. Samples whose
/// eigendecomposition fails are logged and left out.
pub fn estimate_moments(config: &EnsembleConfig, s_max: usize) -> Result<Vec<MomentEstimate>> {
    config.validate()?;
    if s_max < 1 {
        return Err(Error::Contract("s_max must be at least 1".into()));
    }
    let per_sample: Vec<Result<Vec<f64>>> = (0..config.samples as u64)
        .into_par_iter()
        .map(|k| trace_powers(&sample_matrix(config, k), s_max))
        .collect();
    let mut kept = Vec::with_capacity(per_sample.len());
    for (k, r) in per_sample.into_iter().enumerate() {
        match r {
            Ok(v) => kept.push(v),
            Err(e) => log::warn!("sample {k} discarded: {e}"),
        }
    }
    if kept.is_empty() {
        return Err(Error::Inconsistency("every sample was discarded".into()));
    }
    Ok((1..=s_max)
        .map(|s| {
            let column: Vec<f64> = kept.iter().map(|v| v[s - 1]).collect();
            let m = MeanStderr::of(&column);
            MomentEstimate { s, mean: m.mean, stderr: m.stderr, samples: kept.len() }
        })
        .collect())
}

/// Exact moments from the walk engine and `n m̂_s(u)` from the series, both
/// using the moments of the configured entry law.
fn reference_values(config: &EnsembleConfig, s_max: usize) -> Result<(Vec<Option<Rational>>, Vec<Rational>)> {
    let params = MomentParams::new(config.n as u64, config.rho.clone(), config.dist.moments(s_max))?;
    let series = solve_moment_series(&SeriesParams { order: s_max, u_value: Some(config.u()) })?;
    let mut exact = Vec::with_capacity(s_max);
    let mut asym = Vec::with_capacity(s_max);
    for s in 1..=s_max {
        exact.push(if s <= enum_ceiling() { Some(exact_moment(&params, s)?) } else { None });
        asym.push(series.scalar(s));
    }
    Ok((exact, asym))
}

/// One line of the Monte Carlo table; every column is on the `Tr H^{2s}`
/// scale, with `series = n m̂_s(V4/rho)`.
#[derive(Debug, Clone, PartialEq)]
pub struct McRow {
    pub s: usize,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub exact: Option<Rational>,
    pub series: Rational,
    pub n: usize,
    pub rho: Rational,
    pub v4: Rational,
    pub samples: usize,
    pub seed: u64,
}

pub fn mc_rows(config: &EnsembleConfig, estimates: &[MomentEstimate]) -> Result<Vec<McRow>> {
    let s_max = estimates.len();
    let (exact, asym) = reference_values(config, s_max)?;
    let n = rational::int(config.n as i64);
    Ok(estimates
        .iter()
        .map(|e| McRow {
            s: e.s,
            mc_mean: e.mean,
            mc_stderr: e.stderr,
            exact: exact[e.s - 1].clone(),
            series: &asym[e.s - 1] * &n,
            n: config.n,
            rho: config.rho.clone(),
            v4: config.dist.v4(),
            samples: e.samples,
            seed: config.master_seed,
        })
        .collect())
}

pub const MC_CSV_HEADER: [&str; 10] = ["s", "mc_mean", "mc_stderr", "exact", "series", "n", "rho", "V4", "samples", "seed"];

pub fn write_mc_csv<W: Write>(rows: &[McRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MC_CSV_HEADER).map_err(crate::series::io_csv_err)?;
    for r in rows {
        w.write_record([
            r.s.to_string(),
            r.mc_mean.to_string(),
            r.mc_stderr.to_string(),
            r.exact.as_ref().map(rational::to_exact_string).unwrap_or_default(),
            rational::to_exact_string(&r.series),
            r.n.to_string(),
            rational::to_exact_string(&r.rho),
            rational::to_exact_string(&r.v4),
            r.samples.to_string(),
            r.seed.to_string(),
        ])
        .map_err(crate::series::io_csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn mc_json(rows: &[McRow]) -> serde_json::Value {
    let items = rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "s": r.s,
                "mc_mean": r.mc_mean,
                "mc_stderr": if r.mc_stderr.is_finite() { serde_json::json!(r.mc_stderr) } else { serde_json::json!("inf") },
                "exact": r.exact.as_ref().map(rational::to_exact_string),
                "series": rational::to_exact_string(&r.series),
                "n": r.n,
                "rho": rational::to_exact_string(&r.rho),
                "V4": rational::to_exact_string(&r.v4),
                "samples": r.samples,
                "seed": r.seed,
            })
        })
        .collect();
    serde_json::Value::Array(items)
}

/// Everything divided by `n`, next to `m̂_s(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub s: usize,
    pub mc_over_n: Option<f64>,
    pub mc_stderr_over_n: Option<f64>,
    pub exact_over_n: Option<Rational>,
    pub series: Rational,
    pub mc_ratio: Option<f64>,
    pub exact_ratio: Option<f64>,
}

/// Diagnostic table for `M_{2s} = n m̂_s (1 + o(1))`. Sampling is skipped
/// when `with_mc` is false.
pub fn compare_asymptotic(config: &EnsembleConfig, s_max: usize, with_mc: bool) -> Result<Vec<CompareRow>> {
    config.validate()?;
    if s_max < 1 {
        return Err(Error::Contract("s_max must be at least 1".into()));
    }
    let estimates = if with_mc { Some(estimate_moments(config, s_max)?) } else { None };
    let (exact, asym) = reference_values(config, s_max)?;
    let n = config.n as f64;
    let n_exact = rational::int(config.n as i64);
    Ok((1..=s_max)
        .map(|s| {
            let series = asym[s - 1].clone();
            let series_f = rational::to_f64(&series);
            let est = estimates.as_ref().map(|e| e[s - 1]);
            let exact_over_n = exact[s - 1].as_ref().map(|e| e / &n_exact);
            CompareRow {
                s,
                mc_over_n: est.map(|e| e.mean / n),
                mc_stderr_over_n: est.map(|e| e.stderr / n),
                exact_ratio: exact_over_n.as_ref().map(|e| rational::to_f64(e) / series_f),
                mc_ratio: est.map(|e| e.mean / n / series_f),
                exact_over_n,
                series,
            }
        })
        .collect())
}
