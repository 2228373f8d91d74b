use std::io::Write;

use serde::Serialize;

use super::truncated::TruncatedSeries;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

fn plain(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        rational::to_exact_string(r)
    }
}

/// Writes `s,coeff_u0,coeff_u1,...`, one row per power of `z`. Rows are
/// padded with zeros to the widest polynomial in the series.
pub fn write_series_csv<W: Write>(series: &TruncatedSeries, out: W) -> Result<()> {
    let width = series.coeffs().iter().filter_map(|c| c.degree()).max().map_or(1, |d| d + 1);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["s".to_string()];
    header.extend((0..width).map(|p| format!("coeff_u{p}")));
    w.write_record(&header).map_err(csv_err)?;
    for (s, c) in series.coeffs().iter().enumerate() {
        let mut row = vec![s.to_string()];
        row.extend((0..width).map(|p| plain(&c.coeff(p))));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesJsonRow {
    pub s: usize,
    pub poly: Vec<String>,
}

/// `[{"s": 0, "poly": ["1/1"]}, ...]`; the zero polynomial is `[]`.
pub fn series_json(series: &TruncatedSeries) -> Vec<SeriesJsonRow> {
    series
        .coeffs()
        .iter()
        .enumerate()
        .map(|(s, c)| SeriesJsonRow { s, poly: c.coeffs().iter().map(rational::to_exact_string).collect() })
        .collect()
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
