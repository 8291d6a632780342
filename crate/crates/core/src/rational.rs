//! Exact rational numbers.
//!
//! Every weight, discount factor and value in the crate is a [`Rational`].
//! Floating point only appears in [`approx`], for display.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision fraction, always kept in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalParseError {
    #[error("malformed rational `{0}` (expected `int` or `int/int`)")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// `numer / denom` as a rational. Panics on a zero denominator.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `int` or `int/int`.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let malformed = || RationalParseError::Malformed(text.to_string());
    let parse_int = |s: &str| -> Result<BigInt, RationalParseError> {
        let s = s.trim();
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        s.parse::<BigInt>().map_err(|_| malformed())
    };
    match text.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(text)?)),
        Some((n, d)) => {
            let numer = parse_int(n)?;
            let denom = parse_int(d)?;
            if denom.is_zero() {
                return Err(RationalParseError::ZeroDenominator(text.to_string()));
            }
            Ok(Rational::new(numer, denom))
        }
    }
}

/// Decimal approximation, for display next to the exact value.
pub fn approx(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Formats as `<exact> (~<decimal>)`.
pub fn display_with_approx(value: &Rational) -> String {
    format!("{} (~{})", value, approx(value))
}

/// `base^exp` for a non-negative exponent.
pub fn pow(base: &Rational, exp: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Number of bits in the binary representation of `|n|` (at least 1).
pub fn bit_length(n: &BigInt) -> u64 {
    n.abs().bits().max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-3/6").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("14/15").unwrap(), ratio(14, 15));
        assert_eq!(parse_rational("4/-2").unwrap(), int(-2));
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(parse_rational("1.5"), Err(RationalParseError::Malformed(_))));
        assert!(matches!(parse_rational("/2"), Err(RationalParseError::Malformed(_))));
        assert!(matches!(
            parse_rational("1/0"),
            Err(RationalParseError::ZeroDenominator(_))
        ));
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn reduced_form_and_display() {
        let r = ratio(6, -4);
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(int(2).to_string(), "2");
        assert_eq!(display_with_approx(&ratio(3, 2)), "3/2 (~1.5)");
    }

    #[test]
    fn powers() {
        assert_eq!(pow(&ratio(3, 2), 3), ratio(27, 8));
        assert_eq!(pow(&int(7), 0), int(1));
    }
}
