//! Univariate rational polynomials compared lexicographically, and binary
//! forms (homogeneous polynomials in `x, y`).

use std::cmp::Ordering;
use std::fmt;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{format_rational, serde_rational_vec, Rational};

/// `Σ c_k T^k`, trailing zero coefficients removed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RationalPolynomial {
    /// Ascending: `coeffs[k]` multiplies `T^k`.
    #[serde(with = "serde_rational_vec")]
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        RationalPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Lexicographic order on coefficients from the top degree down, which is
    /// the order of the values for all sufficiently large `T`.
    pub fn lex_compare(&self, other: &Self) -> Ordering {
        let diff = self.sub(other);
        if diff.is_zero() {
            Ordering::Equal
        } else if diff.leading().is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let show_coeff = k == 0 || !abs.is_one();
            if show_coeff {
                f.write_str(&format_rational(&abs))?;
            }
            match k {
                0 => {}
                1 => f.write_str("T")?,
                _ => write!(f, "T^{k}")?,
            }
        }
        Ok(())
    }
}

/// Lexicographic comparison of two polynomials.
pub fn lex_compare(p: &RationalPolynomial, q: &RationalPolynomial) -> Ordering {
    p.lex_compare(q)
}

/// A homogeneous polynomial of degree `e` in `x, y`, stored by its `e + 1`
/// coefficients on `x^e, x^{e−1}y, …, y^e`. Negative degrees only admit zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    degree: i64,
    coeffs: Vec<Rational>,
}

impl BinaryForm {
    pub fn new(degree: i64, coeffs: Vec<Rational>) -> Option<Self> {
        let expected = if degree < 0 { 0 } else { degree as usize + 1 };
        (coeffs.len() == expected).then_some(BinaryForm { degree, coeffs })
    }

    pub fn zero(degree: i64) -> Self {
        let n = if degree < 0 { 0 } else { degree as usize + 1 };
        BinaryForm { degree, coeffs: vec![Rational::zero(); n] }
    }

    /// The monomial `x^{e−t} y^t`.
    pub fn monomial(degree: i64, t: usize) -> Self {
        let mut m = Self::zero(degree);
        m.coeffs[t] = Rational::one();
        m
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.degree + other.degree);
        for (s, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (t, b) in other.coeffs.iter().enumerate() {
                out.coeffs[s + t] += a * b;
            }
        }
        out
    }

    /// Sum of two forms of the same degree.
    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.degree, other.degree);
        BinaryForm { degree: self.degree, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        BinaryForm { degree: self.degree, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }
}
