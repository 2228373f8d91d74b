use std::ops::{Add, Sub};

use super::upoly::UPolynomial;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Power series in `z` truncated after `z^order`.
///
/// Coefficients are [`UPolynomial`]s so the same type carries both the
/// symbolic moment series `F(z)` and plain rational series such as the
/// Catalan series `f(z)` (constant polynomials).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<UPolynomial>,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![UPolynomial::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, UPolynomial::one())
    }

    pub fn constant(order: usize, c: UPolynomial) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// Builds a series from explicit coefficients; `order` is `len - 1`.
    pub fn from_coeffs(coeffs: Vec<UPolynomial>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Contract("a truncated series needs at least one coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::from_coeffs(values.iter().map(|&v| UPolynomial::constant(rational::int(v))).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[UPolynomial] {
        &self.coeffs
    }

    pub fn coeff(&self, s: usize) -> &UPolynomial {
        &self.coeffs[s]
    }

    /// The `u^0` part of the coefficient of `z^s`, for rational series.
    pub fn scalar(&self, s: usize) -> Rational {
        self.coeffs[s].coeff(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(UPolynomial::is_zero)
    }

    /// Re-truncates (or zero-pads) to a new order.
    pub fn with_order(&self, order: usize) -> Self {
        let mut coeffs: Vec<UPolynomial> = self.coeffs.iter().take(order + 1).cloned().collect();
        coeffs.resize(order + 1, UPolynomial::zero());
        Self { coeffs }
    }

    /// Multiplies by `z^k`, dropping terms past the order.
    pub fn shift(&self, k: usize) -> Self {
        let order = self.order();
        let mut out = Self::zero(order);
        for s in k..=order {
            out.coeffs[s] = self.coeffs[s - k].clone();
        }
        out
    }

    pub fn scale(&self, c: &UPolynomial) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Formal derivative. The result has order `order - 1` because the top
    /// coefficient of the derivative is not known.
    pub fn derivative(&self) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::Contract("derivative of an order-0 series is undefined".into()));
        }
        let coeffs = (1..=self.order())
            .map(|s| self.coeffs[s].scale(&rational::int(s as i64)))
            .collect();
        Ok(Self { coeffs })
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        same_order(self, rhs, "add")?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        same_order(self, rhs, "sub")?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..k {
            acc = series_mul(&acc, self).expect("orders agree by construction");
        }
        acc
    }

    /// Every coefficient is a non-negative integer polynomial.
    pub fn is_nonneg_integral(&self) -> bool {
        self.coeffs.iter().all(UPolynomial::is_nonneg_integral)
    }

    /// Specializes `u` to a rational value.
    pub fn specialize(&self, u: &Rational) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| UPolynomial::constant(c.horner(u))).collect() }
    }
}

fn same_order(a: &TruncatedSeries, b: &TruncatedSeries, op: &str) -> Result<()> {
    if a.order() != b.order() {
        return Err(Error::Contract(format!(
            "series {op}: order mismatch ({} vs {})",
            a.order(),
            b.order()
        )));
    }
    Ok(())
}

/// Cauchy product truncated at the common order.
pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    same_order(a, b, "mul")?;
    let order = a.order();
    let mut out = TruncatedSeries::zero(order);
    for (i, ai) in a.coeffs.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.coeffs[..=order - i].iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            out.coeffs[i + j] = &out.coeffs[i + j] + &(ai * bj);
        }
    }
    Ok(out)
}

/// Returns `G = 1 / (1 - z a)` to the order of `a`.
///
/// Uses `G = 1 + z a G`, so `G_k = sum_{j<k} a_j G_{k-1-j}`; the constant
/// term of `1 - z a` is always 1, so no division ever happens.
pub fn series_geom_inverse(a: &TruncatedSeries) -> TruncatedSeries {
    let order = a.order();
    let mut g = TruncatedSeries::one(order);
    for k in 1..=order {
        let mut acc = UPolynomial::zero();
        for j in 0..k {
            if a.coeffs[j].is_zero() || g.coeffs[k - 1 - j].is_zero() {
                continue;
            }
            acc = &acc + &(&a.coeffs[j] * &g.coeffs[k - 1 - j]);
        }
        g.coeffs[k] = acc;
    }
    g
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;

    /// Panics on order mismatch; use [`TruncatedSeries::checked_add`] for
    /// caller-supplied series.
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.checked_add(rhs).expect("series order mismatch")
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.checked_sub(rhs).expect("series order mismatch")
    }
}

pub(crate) fn rational_coeff_is_integral(c: &UPolynomial) -> bool {
    c.coeffs().iter().all(|r| r.is_integer())
}
