//! Exact rational scalars.
//!
//! `Scalar` is `num_rational::BigRational`, which is always stored reduced with
//! a positive denominator. The helpers here cover construction and the
//! `"num/den"` string encoding used by the JSON formats.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

/// The integer `n` as a scalar.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// The fraction `num/den`; panics on a zero denominator.
pub fn frac(num: i64, den: i64) -> Scalar {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// Canonical string form, always `"num/den"` (so `3` is `"3/1"`).
pub fn format_scalar(s: &Scalar) -> String {
    format!("{}/{}", s.numer(), s.denom())
}

/// Short human form: integers print without a denominator.
pub fn display_scalar(s: &Scalar) -> String {
    if s.is_integer() {
        s.numer().to_string()
    } else {
        format_scalar(s)
    }
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let text = text.trim();
    let bad = |why: &str| Error::Parse {
        location: format!("scalar {text:?}"),
        message: why.to_string(),
    };
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| bad("numerator is not an integer"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| bad("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

/// Factorial as a scalar, used by the truncated Taylor substitution.
pub fn factorial(m: usize) -> Scalar {
    let mut acc = BigInt::one();
    for k in 2..=m {
        acc *= BigInt::from(k);
    }
    BigRational::from_integer(acc)
}

pub fn is_negative(s: &Scalar) -> bool {
    s.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_is_reduced() {
        assert_eq!(frac(4, -6), frac(-2, 3));
        assert_eq!(format_scalar(&frac(4, -6)), "-2/3");
        assert_eq!(format_scalar(&int(5)), "5/1");
        assert_eq!(display_scalar(&int(5)), "5");
    }

    #[test]
    fn parse_round_trips() {
        for s in [frac(1, 2), frac(-7, 3), int(0), int(12)] {
            assert_eq!(parse_scalar(&format_scalar(&s)).unwrap(), s);
        }
        assert_eq!(parse_scalar("6/4").unwrap(), frac(3, 2));
        assert_eq!(parse_scalar("-3").unwrap(), int(-3));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        assert!(parse_scalar("1.5").is_err());
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), int(1));
        assert_eq!(factorial(5), int(120));
    }
}
