//! Truncated polynomial algebra over the exact rationals.
//!
//! A [`TruncatedPoly`] is an element of `Q[u] / (u^(N+1))` for a fixed
//! truncation order `N`: exactly `N+1` coefficients, with every product
//! discarding terms of degree above `N`. The order is pinned at
//! construction and never coerced; the order encodes the nilpotency
//! degree of `u`, so mixing orders is an error, not a promotion.

use crate::rational::{self, Rational};
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("argument must have zero constant term, found {0}")]
    NonzeroConstantTerm(Rational),
}

/// Element of `Q[u] / (u^(order+1))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedPoly {
    coeffs: Vec<Rational>,
}

impl TruncatedPoly {
    /// The zero element of the given order.
    pub fn zero(order: usize) -> Self {
        TruncatedPoly {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    /// The multiplicative unit of the given order.
    pub fn one(order: usize) -> Self {
        Self::constant(order, Rational::one())
    }

    /// The constant polynomial `c`.
    pub fn constant(order: usize, c: Rational) -> Self {
        let mut p = Self::zero(order);
        p.coeffs[0] = c;
        p
    }

    /// `c * u^k`, truncated (zero when `k > order`).
    pub fn monomial(order: usize, k: usize, c: Rational) -> Self {
        let mut p = Self::zero(order);
        if k <= order {
            p.coeffs[k] = c;
        }
        p
    }

    /// Builds a polynomial from its coefficient vector; the order is
    /// `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a truncated polynomial has at least a constant term"
        );
        TruncatedPoly { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `u^k` (zero beyond the order).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn check_order(&self, other: &Self) -> Result<(), PolyError> {
        if self.order() != other.order() {
            return Err(PolyError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(TruncatedPoly { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(TruncatedPoly { coeffs })
    }

    pub fn neg(&self) -> Self {
        TruncatedPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TruncatedPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Truncated product: coefficient of `u^k` is `sum_{i+j=k} a_i b_j`,
    /// terms of degree above the order are discarded.
    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_order(other)?;
        let n = self.order();
        let mut coeffs = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > n {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        Ok(TruncatedPoly { coeffs })
    }

    /// `self^k` within the same order (`k = 0` gives the unit).
    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..k {
            acc = acc.mul(self).expect("same order by construction");
        }
        acc
    }

    /// Truncated logarithm `log(1 + p) = sum_{j>=1} (-1)^(j-1) p^j / j` for
    /// a nilpotent argument (zero constant term).
    pub fn log1p(&self) -> Result<Self, PolyError> {
        if !self.coeffs[0].is_zero() {
            return Err(PolyError::NonzeroConstantTerm(self.coeffs[0].clone()));
        }
        let n = self.order();
        let mut acc = Self::zero(n);
        let mut power = Self::one(n);
        for j in 1..=n {
            power = power.mul(self).expect("same order");
            if power.is_zero() {
                break;
            }
            let sign = if j % 2 == 1 { 1 } else { -1 };
            acc = acc
                .add(&power.scale(&rational::rat(sign, j as i64)))
                .expect("same order");
        }
        Ok(acc)
    }

    /// Truncated exponential `exp(p) = sum_{j>=0} p^j / j!` for a nilpotent
    /// argument. Inverse to [`TruncatedPoly::log1p`]: `exp(log(1+q)) = 1+q`.
    pub fn exp(&self) -> Result<Self, PolyError> {
        if !self.coeffs[0].is_zero() {
            return Err(PolyError::NonzeroConstantTerm(self.coeffs[0].clone()));
        }
        let n = self.order();
        let mut acc = Self::one(n);
        let mut power = Self::one(n);
        let mut fact = Rational::one();
        for j in 1..=n {
            power = power.mul(self).expect("same order");
            if power.is_zero() {
                break;
            }
            fact *= rational::int(j as i64);
            acc = acc
                .add(&power.scale(&(Rational::one() / &fact)))
                .expect("same order");
        }
        Ok(acc)
    }

    /// Substitutes a nilpotent element `q` for the variable:
    /// `p(u) -> p(q)`, truncated at the common order.
    pub fn substitute(&self, q: &Self) -> Result<Self, PolyError> {
        self.check_order(q)?;
        if !q.coeffs[0].is_zero() {
            return Err(PolyError::NonzeroConstantTerm(q.coeffs[0].clone()));
        }
        let n = self.order();
        let mut acc = Self::constant(n, self.coeffs[0].clone());
        let mut power = Self::one(n);
        for k in 1..=n {
            power = power.mul(q).expect("same order");
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power.scale(&self.coeffs[k])).expect("same order");
        }
        Ok(acc)
    }
}

impl fmt::Display for TruncatedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})u")?,
                _ => write!(f, "({c})u^{k}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
