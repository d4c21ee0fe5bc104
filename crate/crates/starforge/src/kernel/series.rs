use std::fmt;

use num_traits::{One, Zero};

use super::scalar::{display_scalar, Scalar};
use crate::error::{Error, Result};

/// An element of K[t]/(t^q), stored densely (`coeffs[k]` is the coefficient
/// of t^k). The truncation `q` is the length of the coefficient vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    coeffs: Vec<Scalar>,
}

impl TruncSeries {
    pub fn new(coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Usage("truncation must be positive".into()));
        }
        Ok(TruncSeries { coeffs })
    }

    /// Builds from integer coefficients; convenient in tests and examples.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| super::scalar::int(c)).collect())
            .expect("non-empty coefficient list")
    }

    pub fn zero(q: usize) -> Self {
        assert!(q > 0, "truncation must be positive");
        TruncSeries {
            coeffs: vec![Scalar::zero(); q],
        }
    }

    pub fn one(q: usize) -> Self {
        Self::monomial(Scalar::one(), 0, q)
    }

    /// c·t^k truncated at q (zero when k ≥ q).
    pub fn monomial(c: Scalar, k: usize, q: usize) -> Self {
        let mut s = Self::zero(q);
        if k < q {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn t_pow(k: usize, q: usize) -> Self {
        Self::monomial(Scalar::one(), k, q)
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn eval0(&self) -> Scalar {
        self.coeffs[0].clone()
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    /// Index of the first nonzero coefficient, `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.trunc() != other.trunc() {
            return Err(Error::TruncationMismatch {
                left: self.trunc(),
                right: other.trunc(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(TruncSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(TruncSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn neg(&self) -> Self {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let q = self.trunc();
        let mut out = vec![Scalar::zero(); q];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..q - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Ok(TruncSeries { coeffs: out })
    }

    /// Multiplies by t^k, dropping what falls off the truncation.
    pub fn shift(&self, k: usize) -> Self {
        let q = self.trunc();
        let mut out = vec![Scalar::zero(); q];
        for i in 0..q.saturating_sub(k) {
            out[i + k] = self.coeffs[i].clone();
        }
        TruncSeries { coeffs: out }
    }

    /// Divides by t^k. The first k coefficients must vanish; the result lives
    /// at truncation q − k.
    pub fn unshift(&self, k: usize) -> Result<Self> {
        if k >= self.trunc() {
            return Err(Error::Usage(format!(
                "cannot divide a series truncated at {} by t^{k}",
                self.trunc()
            )));
        }
        if self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return Err(Error::Usage(format!("series is not divisible by t^{k}")));
        }
        Ok(TruncSeries {
            coeffs: self.coeffs[k..].to_vec(),
        })
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(self.trunc());
        for _ in 0..e {
            acc = acc.mul(self).expect("same truncation");
        }
        acc
    }

    /// Multiplicative inverse of a unit, by solving a·b = 1 coefficientwise.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit);
        }
        let q = self.trunc();
        let c0 = self.coeffs[0].clone();
        let mut b = vec![Scalar::zero(); q];
        b[0] = c0.recip();
        for k in 1..q {
            let mut acc = Scalar::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc += &self.coeffs[j] * &b[k - j];
                }
            }
            b[k] = -acc / &c0;
        }
        Ok(TruncSeries { coeffs: b })
    }

    /// Reduces to a smaller truncation.
    pub fn reduce(&self, q: usize) -> Result<Self> {
        if q == 0 || q > self.trunc() {
            return Err(Error::Usage(format!(
                "cannot reduce truncation {} to {q}",
                self.trunc()
            )));
        }
        Ok(TruncSeries {
            coeffs: self.coeffs[..q].to_vec(),
        })
    }

    /// Re-reads the coefficients as a polynomial at a larger truncation,
    /// padding with zeros.
    pub fn lift(&self, q: usize) -> Result<Self> {
        if q < self.trunc() {
            return Err(Error::Usage(format!(
                "cannot lift truncation {} to {q}",
                self.trunc()
            )));
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(q, Scalar::zero());
        Ok(TruncSeries { coeffs })
    }

    /// Reads the coefficients as a polynomial and re-truncates at q, either
    /// dropping high terms or padding with zeros.
    pub fn retrunc(&self, q: usize) -> Self {
        assert!(q > 0, "truncation must be positive");
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(q, Scalar::zero());
        TruncSeries { coeffs }
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{k}"),
            };
            let coef = display_scalar(c);
            terms.push(if mono.is_empty() {
                coef
            } else if c.is_one() {
                mono
            } else if coef == "-1" {
                format!("-{mono}")
            } else {
                format!("({coef}){mono}")
            });
        }
        if terms.is_empty() {
            write!(f, "0")?;
        } else {
            write!(f, "{}", terms.join(" + "))?;
        }
        write!(f, " mod t^{}", self.trunc())
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::scalar::frac;

    #[test]
    fn difference_of_squares() {
        let a = TruncSeries::from_ints(&[1, 1, 0]);
        let b = TruncSeries::from_ints(&[1, -1, 0]);
        assert_eq!(a.mul(&b).unwrap(), TruncSeries::from_ints(&[1, 0, -1]));
    }

    #[test]
    fn truncation_kills_t_squared() {
        let t = TruncSeries::t_pow(1, 2);
        assert!(t.mul(&t).unwrap().is_zero());
    }

    #[test]
    fn cubic_cancels_at_truncation_three() {
        let a = TruncSeries::from_ints(&[1, 1, 1]);
        let b = TruncSeries::from_ints(&[1, -1, 0]);
        assert_eq!(a.mul(&b).unwrap(), TruncSeries::from_ints(&[1, 0, 0]));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            TruncSeries::from_ints(&[1, 0, 0, 0]).inverse().unwrap(),
            TruncSeries::from_ints(&[1, 0, 0, 0])
        );
        assert_eq!(
            TruncSeries::from_ints(&[1, -1, 0]).inverse().unwrap(),
            TruncSeries::from_ints(&[1, 1, 1])
        );
        let inv = TruncSeries::from_ints(&[2, 1]).inverse().unwrap();
        assert_eq!(inv.coeffs(), &[frac(1, 2), frac(-1, 4)]);
    }

    #[test]
    fn non_units_are_rejected() {
        assert_eq!(
            TruncSeries::from_ints(&[0, 1]).inverse(),
            Err(Error::NotAUnit)
        );
    }

    #[test]
    fn mismatched_truncations_are_errors() {
        let a = TruncSeries::one(2);
        let b = TruncSeries::one(3);
        assert!(matches!(
            a.mul(&b),
            Err(Error::TruncationMismatch { left: 2, right: 3 })
        ));
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn shift_and_unshift() {
        let a = TruncSeries::from_ints(&[1, 2, 3, 4]);
        let s = a.shift(2);
        assert_eq!(s, TruncSeries::from_ints(&[0, 0, 1, 2]));
        assert_eq!(s.unshift(2).unwrap(), TruncSeries::from_ints(&[1, 2]));
        assert!(a.unshift(1).is_err());
    }

    #[test]
    fn display_is_readable() {
        let a = TruncSeries::new(vec![frac(1, 2), frac(-1, 4), frac(0, 1)]).unwrap();
        assert_eq!(a.to_string(), "1/2 + (-1/4)t mod t^3");
    }
}
