use std::fmt;

use super::bipoly::BiPoly;
use super::series::TruncSeries;
use crate::error::{Error, Result};

/// An n-tuple of component functions, each with its own truncation.
///
/// In the star setting the components are `TruncSeries`; in the deformation
/// setting they are `BiPoly`s with a shared x-window.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiGerm<C = TruncSeries> {
    pub components: Vec<C>,
}

pub type DeformGerm = MultiGerm<BiPoly>;

impl<C> MultiGerm<C> {
    pub fn new(components: Vec<C>) -> Self {
        MultiGerm { components }
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &C {
        &self.components[i]
    }
}

impl MultiGerm<TruncSeries> {
    /// (t^k, …, t^k) with the given truncations.
    pub fn pi_pow(k: usize, trunc: &[usize]) -> Self {
        MultiGerm::new(trunc.iter().map(|&q| TruncSeries::t_pow(k, q)).collect())
    }

    pub fn truncations(&self) -> Vec<usize> {
        self.components.iter().map(TruncSeries::trunc).collect()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: other.n(),
            });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.mul(b))
            .collect::<Result<_>>()?;
        Ok(MultiGerm { components })
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(TruncSeries::is_zero)
    }

    /// Reads every component as a polynomial and re-truncates.
    pub fn retrunc(&self, trunc: &[usize]) -> Self {
        MultiGerm::new(
            self.components
                .iter()
                .zip(trunc)
                .map(|(c, &q)| c.retrunc(q))
                .collect(),
        )
    }
}

impl MultiGerm<BiPoly> {
    pub fn truncations(&self) -> Vec<usize> {
        self.components.iter().map(BiPoly::trunc).collect()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: other.n(),
            });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.mul(b))
            .collect::<Result<_>>()?;
        Ok(MultiGerm { components })
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(BiPoly::is_zero)
    }

    pub fn retrunc(&self, trunc: &[usize]) -> Self {
        MultiGerm::new(
            self.components
                .iter()
                .zip(trunc)
                .map(|(c, &q)| c.retrunc(q))
                .collect(),
        )
    }

    /// The x-free tuple of the components' x^0 parts.
    pub fn x_free_part(&self) -> MultiGerm<TruncSeries> {
        MultiGerm::new(self.components.iter().map(BiPoly::x_free_part).collect())
    }
}

impl<C: fmt::Display> fmt::Display for MultiGerm<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl<C: fmt::Display> fmt::Debug for MultiGerm<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
