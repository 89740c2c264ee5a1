//! Exact rational coefficients.
//!
//! All coefficient arithmetic in the crate runs over arbitrary-precision
//! rationals. `BigRational` keeps values in canonical form (positive
//! denominator, reduced fraction), which is exactly the contract the rest of
//! the crate relies on.

use num_bigint::BigInt;
pub use num_rational::BigRational as Rational;
use num_traits::{One, Zero};

/// Rational from an integer pair. Panics on zero denominator.
pub fn rat(numer: i64, denom: i64) -> Rational {
    assert!(denom != 0, "zero denominator");
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Rational from an integer.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational from a big integer.
pub fn from_bigint(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// `n^k` for a signed base and unsigned exponent, with `0^0 = 1`.
pub fn int_pow(n: i64, k: u32) -> BigInt {
    BigInt::from(n).pow(k)
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}
