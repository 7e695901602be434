//! Exact integer helpers shared across the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `(2n-1)!! = 1 * 3 * ... * (2n-1)`, the number of perfect matchings of
/// `K_2n`. By convention `(-1)!! = 1`, so `n = 0` gives 1.
pub fn odd_double_factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * (2 * k - 1))
}

/// `(2n)!! = 2^n n!`, the order of the hyperoctahedral group.
pub fn even_double_factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * (2 * k))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Signed binomial `C(n, k)` for possibly negative `n` (`k >= 0`), used only
/// to evaluate printed expressions such as `C(2n-4, 4)` at small `n`.
pub fn binomial_signed(n: i64, k: usize) -> BigInt {
    let mut num = BigInt::one();
    for i in 0..k as i64 {
        num *= n - i;
    }
    num / factorial(k)
}

pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn int_rational(v: impl Into<BigInt>) -> Rational {
    Rational::from_integer(v.into())
}

/// Exact conversion of a rational to an integer, failing when it has a
/// nontrivial denominator.
pub fn exact_integer(r: &Rational) -> Option<BigInt> {
    r.is_integer().then(|| r.to_integer())
}

pub fn to_f64(r: &Rational) -> f64 {
    // numer/denom can exceed f64 range individually only far beyond desk scale
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

/// Round a float to the nearest integer if it lies within `tol` of it.
pub fn rationalize(x: f64, tol: f64) -> Option<Rational> {
    let r = x.round();
    ((x - r).abs() <= tol).then(|| int_rational(BigInt::from(r as i64)))
}
