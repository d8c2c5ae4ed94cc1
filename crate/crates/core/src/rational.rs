//! Exact rational scalars.
//!
//! Every coefficient in this crate is a `Rational`: an arbitrary-precision
//! fraction kept in lowest terms with positive denominator. `BigRational`
//! guarantees both invariants on construction, so arithmetic never rounds.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse a coefficient string: either `"num"` or `"num/den"`, both decimal.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let mut parts = s.splitn(2, '/');
    let num: BigInt = parts.next()?.trim().parse().ok()?;
    match parts.next() {
        None => Some(Rational::from_integer(num)),
        Some(den) => {
            let den: BigInt = den.trim().parse().ok()?;
            if den.is_zero() {
                None
            } else {
                Some(Rational::new(num, den))
            }
        }
    }
}

/// Canonical string form: `"num"` for integers, `"num/den"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Total bit length of numerator and denominator; used as a pivot weight
/// in exact elimination.
pub fn bit_length(r: &Rational) -> u64 {
    r.numer().abs().bits() + r.denom().bits()
}
