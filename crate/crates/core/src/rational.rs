//! Exact rational scalars used throughout the crate.
//!
//! Every capacity, cost, weight, dual value and share is a [`Rational`]
//! (arbitrary-precision fraction in lowest terms, positive denominator).
//! There is no floating point anywhere in the solve paths: equalities in
//! duality checks and imputation sums are exact.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational number, always kept in canonical form
/// (reduced, denominator > 0) by `num_rational`.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for the fraction `p/q`. Panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses an exact rational from `"p/q"` or plain integer text.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    match s.parse::<Rational>() {
        Ok(r) => Ok(r),
        Err(e) => Err(format!("invalid rational {s:?}: {e}")),
    }
}

/// Renders a rational exactly, as `p/q` or a plain integer when `q = 1`.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Decimal approximation for human-readable reports (6 places, truncated
/// toward nearest).
pub fn approx_decimal(r: &Rational) -> String {
    let scale = BigInt::from(1_000_000);
    let scaled = (r * Rational::from_integer(scale.clone())).round();
    let int = scaled.to_integer();
    let sign = if int.is_negative() { "-" } else { "" };
    let abs = int.abs();
    let whole = &abs / &scale;
    let frac = &abs % &scale;
    format!("{sign}{whole}.{frac:06}")
}

/// Least common multiple of the denominators of `values`.
///
/// Scaling by this turns a rational vector into integers, which is how the
/// flow solver clears denominators before augmenting.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    let mut l = BigInt::one();
    for v in values {
        l = num_integer::lcm(l, v.denom().clone());
    }
    l
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["1/3", "-7/2", "4", "0"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        assert_eq!(parse_rational("2/4").unwrap(), ratio(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn lcm_of_denominators() {
        let vals = [ratio(1, 6), ratio(3, 4), rat(2)];
        assert_eq!(denominator_lcm(vals.iter()), BigInt::from(12));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(approx_decimal(&ratio(1, 3)), "0.333333");
        assert_eq!(approx_decimal(&ratio(-1, 2)), "-0.500000");
        assert_eq!(approx_decimal(&rat(2)), "2.000000");
    }
}
