use num_traits::Signed;

use super::truncated::{rational_coeff_is_integral, series_geom_inverse, series_mul, TruncatedSeries};
use super::upoly::UPolynomial;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Highest order the solvers are tuned for. Larger orders work but slow
/// down quadratically in the coefficient size.
pub const MAX_PRACTICAL_ORDER: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesParams {
    pub order: usize,
    /// Specializes `u = V4/rho`; `None` keeps `u` symbolic.
    pub u_value: Option<Rational>,
}

impl SeriesParams {
    pub fn symbolic(order: usize) -> Self {
        Self { order, u_value: None }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(u) = &self.u_value {
            if u.is_negative() {
                return Err(Error::Contract(format!(
                    "u_value must be non-negative, got {}",
                    rational::to_exact_string(u)
                )));
            }
        }
        Ok(())
    }
}

/// Right-hand side `1 + z F^2 + z^2 c (1 - zF)^{-4}` at the order of `f`.
fn moment_map(f: &TruncatedSeries, c: &UPolynomial) -> TruncatedSeries {
    let order = f.order();
    let sq = series_mul(f, f).expect("same order");
    let g = series_geom_inverse(f);
    let g2 = series_mul(&g, &g).expect("same order");
    let g4 = series_mul(&g2, &g2).expect("same order");
    let one = TruncatedSeries::one(order);
    &(&one + &sq.shift(1)) + &g4.scale(c).shift(2)
}

fn catalan_map(f: &TruncatedSeries) -> TruncatedSeries {
    let sq = series_mul(f, f).expect("same order");
    &TruncatedSeries::one(f.order()) + &sq.shift(1)
}

/// `sum_{i+j=k} a_i b_j` over the computed prefixes.
fn conv_at(a: &[UPolynomial], b: &[UPolynomial], k: usize) -> UPolynomial {
    let mut acc = UPolynomial::zero();
    for i in 0..=k {
        if a[i].is_zero() || b[k - i].is_zero() {
            continue;
        }
        acc = &acc + &(&a[i] * &b[k - i]);
    }
    acc
}

/// Fixed point of `F = 1 + z F^2 + z^2 c G^4`, `G = 1/(1 - zF)`, with `c`
/// zero for the Catalan series.
///
/// Starting from the constant series 1, iteration `k` leaves coefficients
/// below `k` unchanged and fixes coefficient `k`, so only that coefficient
/// is computed each round; the products it needs are extended one term at
/// a time. A final full evaluation of the map must reproduce the series.
fn iterate(order: usize, c: Option<&UPolynomial>) -> Result<TruncatedSeries> {
    let mut f = vec![UPolynomial::one()];
    let mut g: Vec<UPolynomial> = Vec::new();
    let mut g2: Vec<UPolynomial> = Vec::new();
    let mut g4: Vec<UPolynomial> = Vec::new();
    for k in 1..=order {
        let mut next = conv_at(&f, &f, k - 1);
        if let (Some(c), true) = (c, k >= 2) {
            let j = k - 2;
            let gj = if j == 0 { UPolynomial::one() } else { conv_at(&f[..j], &g[..j], j - 1) };
            g.push(gj);
            g2.push(conv_at(&g, &g, j));
            g4.push(conv_at(&g2, &g2, j));
            next = &next + &(c * &g4[j]);
        }
        f.push(next);
    }
    let f = TruncatedSeries::from_coeffs(f)?;
    let again = match c {
        Some(c) => moment_map(&f, c),
        None => catalan_map(&f),
    };
    if again != f {
        return Err(Error::Inconsistency(format!(
            "fixed point at order {order} moved under one extra iteration"
        )));
    }
    Ok(f)
}

/// Catalan series `f = 1 + z f^2`.
pub fn solve_catalan(order: usize) -> TruncatedSeries {
    iterate(order, None).expect("catalan fixed point is exact")
}

/// Moment series `F = 1 + z F^2 + z^2 u (1 - zF)^{-4}`.
///
/// The coefficient of `z^s` is `m̂_s` as a polynomial in `u`, or its value at
/// `params.u_value` when that is set. The result is checked for a zero
/// residual and for non-negative integer coefficients before it is returned.
pub fn solve_moment_series(params: &SeriesParams) -> Result<TruncatedSeries> {
    params.validate()?;
    let c = match &params.u_value {
        Some(u) => UPolynomial::constant(u.clone()),
        None => UPolynomial::u(),
    };
    let f = iterate(params.order, Some(&c))?;
    let residual = moment_residual(&f, &c);
    if !residual.is_zero() {
        return Err(Error::Inconsistency(format!(
            "moment series residual is nonzero at order {}",
            params.order
        )));
    }
    if params.u_value.is_none() && !f.is_nonneg_integral() {
        return Err(Error::Inconsistency("moment series has a non-integral coefficient".into()));
    }
    Ok(f)
}

/// `F - 1 - zF^2 - z^2 c (1 - zF)^{-4}`.
pub fn moment_residual(f: &TruncatedSeries, c: &UPolynomial) -> TruncatedSeries {
    f - &moment_map(f, c)
}

/// Catalan series together with its first two derivatives, all at `order`.
fn catalan_with_derivatives(order: usize) -> (TruncatedSeries, TruncatedSeries, TruncatedSeries) {
    let f = solve_catalan(order + 2);
    let d1 = f.derivative().expect("order >= 2");
    let d2 = d1.derivative().expect("order >= 1");
    (f.with_order(order), d1.with_order(order), d2)
}

/// `2 z^3 f' f^3 + z^2 f^4`, the generating function of `N_s^(1,2)`.
pub fn phi_12(order: usize) -> Result<TruncatedSeries> {
    if order < 2 {
        return Err(Error::Contract(format!("phi_12 needs order >= 2, got {order}")));
    }
    let (f, d1, _) = catalan_with_derivatives(order);
    let f3 = f.pow(3);
    let f4 = series_mul(&f3, &f)?;
    let two = UPolynomial::constant(rational::int(2));
    let a = series_mul(&d1, &f3)?.scale(&two).shift(3);
    Ok(&a + &f4.shift(2))
}

/// `(z^4/2) f'' f^4 + 3 z^4 f' f^6`.
///
/// Individual products carry halves; the sum must come out integral.
pub fn phi_22(order: usize) -> Result<TruncatedSeries> {
    if order < 4 {
        return Err(Error::Contract(format!("phi_22 needs order >= 4, got {order}")));
    }
    let (f, d1, d2) = catalan_with_derivatives(order);
    let f2 = series_mul(&f, &f)?;
    let f4 = series_mul(&f2, &f2)?;
    let f6 = series_mul(&f4, &f2)?;
    let half = UPolynomial::constant(rational::ratio(1, 2));
    let three = UPolynomial::constant(rational::int(3));
    let a = series_mul(&d2, &f4)?.scale(&half);
    let b = series_mul(&d1, &f6)?.scale(&three);
    let phi = (&a + &b).shift(4);
    for (s, c) in phi.coeffs().iter().enumerate() {
        if !rational_coeff_is_integral(c) || !c.is_nonneg_integral() {
            return Err(Error::Inconsistency(format!("phi_22 coefficient of z^{s} is not a count: {c}")));
        }
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{catalan, n_one_multiedge};
    use num_bigint::BigInt;

    fn poly(c: &[i64]) -> UPolynomial {
        UPolynomial::from_integers(c)
    }

    #[test]
    fn catalan_series() {
        assert_eq!(solve_catalan(0).coeffs(), &[poly(&[1])]);
        let f = solve_catalan(12);
        assert_eq!(f.scalar(3), rational::int(5));
        assert_eq!(f.scalar(6), rational::int(132));
        for k in 0..=12 {
            assert_eq!(f.scalar(k), Rational::from_integer(BigInt::from(catalan(k))));
        }
    }

    #[test]
    fn catalan_square_coefficient() {
        let f = solve_catalan(6);
        let sq = series_mul(&f, &f).unwrap();
        assert_eq!(sq.scalar(5), rational::int(132));
    }

    /// Weighted compositions `sum_l sum_{a_1+..+a_l = k-l} t_{a_1}..t_{a_l}`.
    fn composition_sum(k: usize) -> BigInt {
        fn parts(total: usize, l: usize) -> BigInt {
            if l == 0 {
                return BigInt::from(u8::from(total == 0));
            }
            (0..=total).map(|a| BigInt::from(catalan(a)) * parts(total - a, l - 1)).sum()
        }
        (0..=k).map(|l| parts(k - l, l)).sum()
    }

    #[test]
    fn geom_inverse_of_catalan() {
        let f = solve_catalan(8);
        let g = series_geom_inverse(&f);
        for k in 0..=8 {
            assert_eq!(g.scalar(k), Rational::from_integer(composition_sum(k)), "k={k}");
        }
        assert_eq!(g.scalar(3), rational::int(5));
        // f = 1 + z f^2 means 1/(1 - z f) = f.
        assert_eq!(g, f);
    }

    #[test]
    fn moment_coefficients() {
        let f = solve_moment_series(&SeriesParams::symbolic(8)).unwrap();
        let expected: [&[i64]; 9] = [
            &[1],
            &[1],
            &[2, 1],
            &[5, 6],
            &[14, 28],
            &[42, 120, 5],
            &[132, 495, 66],
            &[429, 2002, 546],
            &[1430, 8008, 3640, 40],
        ];
        for (s, e) in expected.iter().enumerate() {
            assert_eq!(f.coeff(s), &poly(e), "s={s}");
        }
        assert_eq!(
            f.coeff(4).coeff(1),
            Rational::from_integer(BigInt::from(n_one_multiedge(4, 2).unwrap()))
        );
    }

    #[test]
    fn specialized_matches_evaluated() {
        let u = rational::ratio(1, 64);
        let sym = solve_moment_series(&SeriesParams::symbolic(10)).unwrap();
        let num = solve_moment_series(&SeriesParams { order: 10, u_value: Some(u.clone()) }).unwrap();
        assert_eq!(sym.specialize(&u), num);
        let zero = solve_moment_series(&SeriesParams { order: 10, u_value: Some(rational::int(0)) }).unwrap();
        assert_eq!(zero, solve_catalan(10));
    }

    #[test]
    fn negative_u_rejected() {
        let p = SeriesParams { order: 3, u_value: Some(rational::int(-1)) };
        assert!(matches!(solve_moment_series(&p), Err(Error::Contract(_))));
    }

    #[test]
    fn residual_detects_perturbation() {
        let mut coeffs = solve_moment_series(&SeriesParams::symbolic(6)).unwrap().coeffs().to_vec();
        coeffs[5] = poly(&[42, 121, 5]);
        let f = TruncatedSeries::from_coeffs(coeffs).unwrap();
        assert!(!moment_residual(&f, &UPolynomial::u()).is_zero());
    }

    #[test]
    fn phi_12_values() {
        let p = phi_12(30).unwrap();
        assert!(p.scalar(0) == rational::int(0) && p.scalar(1) == rational::int(0));
        assert_eq!(p.scalar(2), rational::int(1));
        assert_eq!(p.scalar(3), rational::int(6));
        assert_eq!(p.scalar(4), rational::int(28));
        for s in 2..=30 {
            assert_eq!(p.scalar(s), Rational::from_integer(BigInt::from(n_one_multiedge(s, 2).unwrap())));
        }
        assert!(phi_12(1).is_err());
    }

    #[test]
    fn phi_22_values() {
        let p = phi_22(8).unwrap();
        let got: Vec<Rational> = (0..=8).map(|s| p.scalar(s)).collect();
        let want: Vec<Rational> = [0, 0, 0, 0, 5, 53, 370, 2154, 11346].iter().map(|&v| rational::int(v)).collect();
        assert_eq!(got, want);
        assert!(matches!(phi_22(3), Err(Error::Contract(_))));
    }

    #[test]
    fn phi_22_ratio_approaches_half_slowly() {
        let p = phi_22(320).unwrap();
        let ratio = |s: usize| {
            let denom = Rational::from_integer(BigInt::from(catalan(s) * (s * s)));
            rational::to_f64(&(p.scalar(s) / denom))
        };
        let gaps: Vec<f64> = [40, 80, 160, 320].iter().map(|&s| 0.5 - ratio(s)).collect();
        assert!(gaps.windows(2).all(|g| g[1] < g[0] && g[1] > 0.0), "{gaps:?}");
        // The gap decays like s^{-1/2}: still 0.19 at s = 40.
        assert!((ratio(40) - 0.3062).abs() < 1e-4);
        assert!(gaps[3] / gaps[2] > 0.7 && gaps[3] / gaps[2] < 0.8);
    }
}
