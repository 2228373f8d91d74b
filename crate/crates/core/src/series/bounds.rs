use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::solve::{solve_moment_series, SeriesParams};
use crate::combinatorics::{catalan, n_one_multiedge};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Cap on Taylor terms before a cell is declared inconclusive.
const MAX_EXP_TERMS: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Proven: the ratio is below a lower bound of the right side.
    Pass,
    /// Proven: the ratio exceeds an upper bound of the right side.
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperBoundCell {
    pub s: usize,
    #[serde(serialize_with = "crate::report::serialize_rational")]
    pub u: Rational,
    /// `m̂_s(u) / t_s`.
    #[serde(serialize_with = "crate::report::serialize_rational")]
    pub ratio: Rational,
    pub verdict: Verdict,
    pub taylor_terms: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperBoundReport {
    pub order: usize,
    pub cells: Vec<UpperBoundCell>,
}

impl UpperBoundReport {
    pub fn all_pass(&self) -> bool {
        self.cells.iter().all(|c| c.verdict == Verdict::Pass)
    }

    pub fn non_passing(&self) -> impl Iterator<Item = &UpperBoundCell> {
        self.cells.iter().filter(|c| c.verdict != Verdict::Pass)
    }
}

/// Decides `value <= 4 e^x` exactly, for `x >= 0`.
///
/// Taylor partial sums of `e^x` are lower bounds, so `value <= 4 P_K`
/// proves the inequality. Once `K + 2 > x` the tail is at most
/// `T_{K+1} / (1 - x/(K+2))`, which gives an upper bound used to refute.
pub fn certify_below_four_exp(value: &Rational, x: &Rational) -> (Verdict, usize) {
    debug_assert!(!x.is_negative());
    let four = rational::int(4);
    let mut term = Rational::one();
    let mut partial = Rational::one();
    for k in 0..MAX_EXP_TERMS {
        if value <= &(&four * &partial) {
            return (Verdict::Pass, k + 1);
        }
        let next_term = &term * x / rational::int(k as i64 + 1);
        let k2 = rational::int(k as i64 + 2);
        if x < &k2 {
            let tail = &next_term / (Rational::one() - x / &k2);
            if value > &(&four * (&partial + &tail)) {
                return (Verdict::Fail, k + 1);
            }
        }
        if x.is_zero() {
            // e^0 = 1 exactly and the partial sum already equals it.
            return (Verdict::Fail, k + 1);
        }
        partial += &next_term;
        term = next_term;
    }
    (Verdict::Inconclusive, MAX_EXP_TERMS)
}

/// Checks `m̂_s(u) / t_s <= 4 e^{4us}` for every `s <= order` and grid value.
pub fn check_upper_bound(order: usize, u_grid: &[Rational]) -> Result<UpperBoundReport> {
    if let Some(u) = u_grid.iter().find(|u| u.is_negative()) {
        return Err(Error::Contract(format!("u grid value {} is negative", rational::to_exact_string(u))));
    }
    let series = solve_moment_series(&SeriesParams::symbolic(order))?;
    let mut cells = Vec::with_capacity((order + 1) * u_grid.len());
    for s in 0..=order {
        let ts = Rational::from_integer(BigInt::from(catalan(s)));
        for u in u_grid {
            let ratio = series.coeff(s).evaluate(u)? / &ts;
            let x = rational::int(4 * s as i64) * u;
            let (verdict, taylor_terms) = certify_below_four_exp(&ratio, &x);
            cells.push(UpperBoundCell { s, u: u.clone(), ratio, verdict, taylor_terms });
        }
    }
    Ok(UpperBoundReport { order, cells })
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundRow {
    pub s: usize,
    pub u0_is_catalan: bool,
    #[serde(serialize_with = "crate::report::serialize_rational")]
    pub u1_coefficient: Rational,
    /// `N_s^(1,2)`; zero below `s = 2`, where no multiplicity-4 edge fits.
    #[serde(serialize_with = "crate::report::serialize_rational")]
    pub n12: Rational,
    pub u1_at_least_n12: bool,
    pub u1_equals_n12: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundReport {
    pub order: usize,
    pub rows: Vec<LowerBoundRow>,
}

impl LowerBoundReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.u0_is_catalan && r.u1_at_least_n12)
    }
}

/// Coefficient-wise check of `m̂_s >= t_s + u N_s^(1,2)` for `s <= order`.
pub fn check_lower_bound(order: usize) -> Result<LowerBoundReport> {
    if order < 2 {
        return Err(Error::Contract(format!("lower bound check needs order >= 2, got {order}")));
    }
    let series = solve_moment_series(&SeriesParams::symbolic(order))?;
    let rows = (0..=order)
        .map(|s| {
            let c = series.coeff(s);
            let ts = Rational::from_integer(BigInt::from(catalan(s)));
            let n12 = if s >= 2 {
                Rational::from_integer(BigInt::from(n_one_multiedge(s, 2).expect("s >= 2")))
            } else {
                Rational::zero()
            };
            let u1 = c.coeff(1);
            LowerBoundRow {
                s,
                u0_is_catalan: c.coeff(0) == ts,
                u1_at_least_n12: u1 >= n12,
                u1_equals_n12: u1 == n12,
                u1_coefficient: u1,
                n12,
            }
        })
        .collect();
    Ok(LowerBoundReport { order, rows })
}
