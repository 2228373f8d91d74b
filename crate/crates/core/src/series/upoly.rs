use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Polynomial in `u = V4/rho` with exact rational coefficients.
///
/// `coeffs[p]` is the coefficient of `u^p`. The vector never ends in a zero,
/// so the zero polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UPolynomial {
    coeffs: Vec<Rational>,
}

impl UPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The monomial `u`.
    pub fn u() -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rational::int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `u^p`; zero past the degree.
    pub fn coeff(&self, p: usize) -> Rational {
        self.coeffs.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_nonneg_integral(&self) -> bool {
        self.coeffs.iter().all(rational::is_nonneg_integer)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplies by `u^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Horner evaluation at `u = value`. Negative `u` is outside the
    /// physical domain (`V4/rho >= 0`) and is rejected.
    pub fn evaluate(&self, value: &Rational) -> Result<Rational> {
        if value.is_negative() {
            return Err(Error::Contract(format!(
                "u must be non-negative, got {}",
                rational::to_exact_string(value)
            )));
        }
        Ok(self.horner(value))
    }

    pub(crate) fn horner(&self, value: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * value + c)
    }
}

/// Free-function spelling of [`UPolynomial::evaluate`].
pub fn evaluate_coefficient(poly: &UPolynomial, u_value: &Rational) -> Result<Rational> {
    poly.evaluate(u_value)
}

impl Add for &UPolynomial {
    type Output = UPolynomial;

    fn add(self, rhs: &UPolynomial) -> UPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        UPolynomial::from_coeffs((0..len).map(|p| self.coeff(p) + rhs.coeff(p)).collect())
    }
}

impl Sub for &UPolynomial {
    type Output = UPolynomial;

    fn sub(self, rhs: &UPolynomial) -> UPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        UPolynomial::from_coeffs((0..len).map(|p| self.coeff(p) - rhs.coeff(p)).collect())
    }
}

impl Mul for &UPolynomial {
    type Output = UPolynomial;

    fn mul(self, rhs: &UPolynomial) -> UPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return UPolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPolynomial::from_coeffs(out)
    }
}

impl fmt::Display for UPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match p {
                0 => write!(f, "{c}")?,
                1 if c.is_one() => write!(f, "u")?,
                1 => write!(f, "{c}u")?,
                _ if c.is_one() => write!(f, "u^{p}")?,
                _ => write!(f, "{c}u^{p}")?,
            }
        }
        Ok(())
    }
}
