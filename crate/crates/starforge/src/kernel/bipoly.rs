use std::fmt;

use num_traits::{One, Zero};

use super::scalar::{display_scalar, Scalar};
use super::series::TruncSeries;
use crate::error::{Error, Result};

/// An element of K[x,t]/(x^D, t^N), stored as a dense D×N grid with the
/// coefficient of x^a t^b at `a * N + b`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BiPoly {
    xdeg: usize,
    trunc: usize,
    coeffs: Vec<Scalar>,
}

impl BiPoly {
    pub fn new(xdeg: usize, trunc: usize, coeffs: Vec<Scalar>) -> Result<Self> {
        if xdeg == 0 || trunc == 0 {
            return Err(Error::Usage(
                "x-degree and truncation must be positive".into(),
            ));
        }
        if coeffs.len() != xdeg * trunc {
            return Err(Error::DimensionMismatch {
                expected: xdeg * trunc,
                got: coeffs.len(),
            });
        }
        Ok(BiPoly {
            xdeg,
            trunc,
            coeffs,
        })
    }

    pub fn zero(xdeg: usize, trunc: usize) -> Self {
        assert!(
            xdeg > 0 && trunc > 0,
            "x-degree and truncation must be positive"
        );
        BiPoly {
            xdeg,
            trunc,
            coeffs: vec![Scalar::zero(); xdeg * trunc],
        }
    }

    pub fn one(xdeg: usize, trunc: usize) -> Self {
        Self::monomial(Scalar::one(), 0, 0, xdeg, trunc)
    }

    /// c·x^a t^b, zero if it falls outside the window.
    pub fn monomial(c: Scalar, a: usize, b: usize, xdeg: usize, trunc: usize) -> Self {
        let mut p = Self::zero(xdeg, trunc);
        if a < xdeg && b < trunc {
            p.coeffs[a * trunc + b] = c;
        }
        p
    }

    /// Builds from rows of integer coefficients, `rows[a][b]` for x^a t^b.
    pub fn from_int_rows(xdeg: usize, trunc: usize, rows: &[&[i64]]) -> Self {
        let mut p = Self::zero(xdeg, trunc);
        for (a, row) in rows.iter().enumerate() {
            for (b, &c) in row.iter().enumerate() {
                p.set(a, b, super::scalar::int(c));
            }
        }
        p
    }

    /// The x-free element with the given t-series.
    pub fn from_series(s: &TruncSeries, xdeg: usize) -> Self {
        let mut p = Self::zero(xdeg, s.trunc());
        for (b, c) in s.coeffs().iter().enumerate() {
            p.coeffs[b] = c.clone();
        }
        p
    }

    /// Rows x^0, x^1, … as t-series; all rows must share a truncation.
    pub fn from_rows(rows: &[TruncSeries]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::Usage(
                "a bivariate polynomial needs at least one row".into(),
            ));
        };
        let trunc = first.trunc();
        if let Some(r) = rows.iter().find(|r| r.trunc() != trunc) {
            return Err(Error::TruncationMismatch {
                left: trunc,
                right: r.trunc(),
            });
        }
        let coeffs = rows
            .iter()
            .flat_map(|r| r.coeffs().iter().cloned())
            .collect();
        Self::new(rows.len(), trunc, coeffs)
    }

    /// The coefficient of x^a as a t-series.
    pub fn x_row(&self, a: usize) -> TruncSeries {
        TruncSeries::new(self.coeffs[a * self.trunc..(a + 1) * self.trunc].to_vec())
            .expect("positive truncation")
    }

    pub fn xdeg(&self) -> usize {
        self.xdeg
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, a: usize, b: usize) -> &Scalar {
        &self.coeffs[a * self.trunc + b]
    }

    pub fn set(&mut self, a: usize, b: usize, c: Scalar) {
        self.coeffs[a * self.trunc + b] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    /// True when only x^0 coefficients are nonzero.
    pub fn is_x_free(&self) -> bool {
        self.coeffs[self.trunc..].iter().all(Zero::is_zero)
    }

    /// The t-series of x^0 coefficients.
    pub fn x_free_part(&self) -> TruncSeries {
        TruncSeries::new(self.coeffs[..self.trunc].to_vec()).expect("positive truncation")
    }

    /// Coefficient of t^b as a polynomial in x (length D).
    pub fn t_coeff(&self, b: usize) -> Vec<Scalar> {
        (0..self.xdeg).map(|a| self.coeff(a, b).clone()).collect()
    }

    /// Restriction to t = 0.
    pub fn eval_t0(&self) -> Vec<Scalar> {
        self.t_coeff(0)
    }

    /// Smallest b with a nonzero x-polynomial coefficient of t^b.
    pub fn t_valuation(&self) -> Option<usize> {
        (0..self.trunc).find(|&b| (0..self.xdeg).any(|a| !self.coeff(a, b).is_zero()))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.xdeg != other.xdeg {
            return Err(Error::DimensionMismatch {
                expected: self.xdeg,
                got: other.xdeg,
            });
        }
        if self.trunc != other.trunc {
            return Err(Error::TruncationMismatch {
                left: self.trunc,
                right: other.trunc,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    fn zip(&self, other: &Self, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Self {
        BiPoly {
            xdeg: self.xdeg,
            trunc: self.trunc,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Scalar::one())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        BiPoly {
            xdeg: self.xdeg,
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = vec![Scalar::zero(); self.coeffs.len()];
        mul_into(&self.coeffs, &other.coeffs, self.xdeg, self.trunc, &mut out);
        Ok(BiPoly {
            xdeg: self.xdeg,
            trunc: self.trunc,
            coeffs: out,
        })
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(self.xdeg, self.trunc);
        for _ in 0..e {
            acc = acc.mul(self).expect("same shape");
        }
        acc
    }

    /// Multiplies by t^k.
    pub fn shift_t(&self, k: usize) -> Self {
        let mut out = Self::zero(self.xdeg, self.trunc);
        for a in 0..self.xdeg {
            for b in 0..self.trunc.saturating_sub(k) {
                out.set(a, b + k, self.coeff(a, b).clone());
            }
        }
        out
    }

    /// Inverse of a unit. Writes self = c(1 − m) with m nilpotent and sums
    /// the geometric series; m^(D+N) vanishes.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit);
        }
        let c = self.coeffs[0].clone();
        let normalized = self.scale(&c.recip());
        let m = Self::one(self.xdeg, self.trunc).sub(&normalized)?;
        let mut acc = Self::one(self.xdeg, self.trunc);
        let mut power = Self::one(self.xdeg, self.trunc);
        for _ in 0..(self.xdeg + self.trunc) {
            power = power.mul(&m)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        Ok(acc.scale(&c.recip()))
    }

    /// ∂/∂x, keeping the window.
    pub fn deriv_x(&self) -> Self {
        let mut out = Self::zero(self.xdeg, self.trunc);
        for a in 1..self.xdeg {
            let k = Scalar::from_integer((a as i64).into());
            for b in 0..self.trunc {
                let c = self.coeff(a, b);
                if !c.is_zero() {
                    out.set(a - 1, b, c * &k);
                }
            }
        }
        out
    }

    /// Reads the grid as a polynomial and re-truncates in t.
    pub fn retrunc(&self, trunc: usize) -> Self {
        let mut out = Self::zero(self.xdeg, trunc);
        for a in 0..self.xdeg {
            for b in 0..trunc.min(self.trunc) {
                out.set(a, b, self.coeff(a, b).clone());
            }
        }
        out
    }

    /// Reads the grid as a polynomial and changes the x-window.
    pub fn rexdeg(&self, xdeg: usize) -> Self {
        let mut out = Self::zero(xdeg, self.trunc);
        for a in 0..xdeg.min(self.xdeg) {
            for b in 0..self.trunc {
                out.set(a, b, self.coeff(a, b).clone());
            }
        }
        out
    }

    /// Highest x-power with a nonzero coefficient.
    pub fn x_degree(&self) -> Option<usize> {
        (0..self.xdeg)
            .rev()
            .find(|&a| (0..self.trunc).any(|b| !self.coeff(a, b).is_zero()))
    }
}

/// Multiplies two D×N grids into `out` (which must be zeroed), reducing
/// modulo (x^D, t^N).
pub(crate) fn mul_into(a: &[Scalar], b: &[Scalar], xdeg: usize, trunc: usize, out: &mut [Scalar]) {
    for a1 in 0..xdeg {
        for b1 in 0..trunc {
            let c1 = &a[a1 * trunc + b1];
            if c1.is_zero() {
                continue;
            }
            for a2 in 0..xdeg - a1 {
                for b2 in 0..trunc - b1 {
                    let c2 = &b[a2 * trunc + b2];
                    if !c2.is_zero() {
                        out[(a1 + a2) * trunc + b1 + b2] += c1 * c2;
                    }
                }
            }
        }
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for b in 0..self.trunc {
            for a in 0..self.xdeg {
                let c = self.coeff(a, b);
                if c.is_zero() {
                    continue;
                }
                let mut mono = String::new();
                match a {
                    0 => {}
                    1 => mono.push('x'),
                    _ => mono.push_str(&format!("x^{a}")),
                }
                match b {
                    0 => {}
                    1 => mono.push('t'),
                    _ => mono.push_str(&format!("t^{b}")),
                }
                let coef = display_scalar(c);
                terms.push(if mono.is_empty() {
                    coef
                } else if c.is_one() {
                    mono
                } else {
                    format!("({coef}){mono}")
                });
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod (x^{}, t^{})", self, self.xdeg, self.trunc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::scalar::int;

    #[test]
    fn multiplication_reduces_in_both_variables() {
        // (x + t)^2 = x^2 + 2xt + t^2, and modulo (x^2, t^2) only 2xt survives.
        let x_plus_t = BiPoly::from_int_rows(2, 2, &[&[0, 1], &[1, 0]]);
        let sq = x_plus_t.mul(&x_plus_t).unwrap();
        assert_eq!(sq, BiPoly::from_int_rows(2, 2, &[&[0, 0], &[0, 2]]));
    }

    #[test]
    fn units_are_detected_by_constant_term() {
        let u = BiPoly::from_int_rows(3, 3, &[&[2, 1, 0], &[1, 0, 0]]);
        let inv = u.inverse().unwrap();
        assert_eq!(u.mul(&inv).unwrap(), BiPoly::one(3, 3));
        let nu = BiPoly::from_int_rows(3, 3, &[&[0, 1], &[1]]);
        assert_eq!(nu.inverse(), Err(Error::NotAUnit));
    }

    #[test]
    fn derivative_in_x() {
        let p = BiPoly::from_int_rows(3, 2, &[&[1, 1], &[0, 2], &[3, 0]]);
        assert_eq!(
            p.deriv_x(),
            BiPoly::from_int_rows(3, 2, &[&[0, 2], &[6, 0], &[0, 0]])
        );
    }

    #[test]
    fn t_valuation_and_x_freeness() {
        let p = BiPoly::from_int_rows(2, 3, &[&[0, 0, 1], &[0, 1, 0]]);
        assert_eq!(p.t_valuation(), Some(1));
        assert!(!p.is_x_free());
        assert_eq!(p.t_coeff(1), vec![int(0), int(1)]);
        let s = TruncSeries::from_ints(&[1, 2, 3]);
        let q = BiPoly::from_series(&s, 3);
        assert!(q.is_x_free());
        assert_eq!(q.x_free_part(), s);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        assert!(BiPoly::one(2, 2).mul(&BiPoly::one(2, 3)).is_err());
        assert!(BiPoly::one(2, 2).mul(&BiPoly::one(3, 2)).is_err());
    }
}
