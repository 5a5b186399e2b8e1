//! Exact rational scalars and small number-theoretic helpers.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Error;

/// The scalar type of the whole crate: arbitrary-precision rationals, kept in
/// lowest terms with a positive denominator by construction.
pub type Rat = BigRational;

/// `n` as a rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d` as a rational, reduced. Panics on `d == 0`; intended for literals.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `a/b`, or plain `a` when the denominator is 1.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let bad = || Error::BadRational(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let numer: BigInt = n.parse().map_err(|_| bad())?;
    let denom: BigInt = match d {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(numer, denom))
}

/// Formats as `a/b`, omitting `/b` when the denominator is 1.
pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

/// Trial-division primality test; every prime in this calculus is small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Splits a positive integer as `p^k * rest` with `rest` prime to `p`.
pub fn split_p_power(n: &BigUint, p: u64) -> (u64, BigUint) {
    let p = BigUint::from(p);
    let mut k = 0u64;
    let mut rest = n.clone();
    while !rest.is_zero() && (&rest % &p).is_zero() {
        rest /= &p;
        k += 1;
    }
    (k, rest)
}

/// True when the denominator of `r` is prime to `p`.
pub fn is_p_integral(r: &Rat, p: u64) -> bool {
    !(r.denom().magnitude() % BigUint::from(p)).is_zero()
}

/// True when `r` is a (non-strictly) positive integer.
pub fn is_positive_integer(r: &Rat) -> bool {
    r.is_integer() && r > &Rat::zero()
}
