//! Exact formal power series for the moment generating function.

mod bounds;
mod io;
mod solve;
mod truncated;
mod upoly;

pub use bounds::{
    certify_below_four_exp, check_lower_bound, check_upper_bound, LowerBoundReport, LowerBoundRow,
    UpperBoundCell, UpperBoundReport, Verdict,
};
pub use io::{series_json, write_series_csv, SeriesJsonRow};
pub(crate) use io::csv_err as io_csv_err;
pub use solve::{
    moment_residual, phi_12, phi_22, solve_catalan, solve_moment_series, SeriesParams, MAX_PRACTICAL_ORDER,
};
pub use truncated::{series_geom_inverse, series_mul, TruncatedSeries};
pub use upoly::{evaluate_coefficient, UPolynomial};
