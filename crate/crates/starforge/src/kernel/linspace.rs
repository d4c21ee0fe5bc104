//! Subspaces of K^m in canonical reduced row-echelon form.
//!
//! Rows are kept sorted by pivot column, every pivot is 1 and every pivot
//! column is zero in the other rows, so two spaces are equal exactly when
//! their stored bases are equal.

use num_traits::{One, Zero};

use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSpace {
    ambient: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

fn first_nonzero(v: &[Scalar]) -> Option<usize> {
    v.iter().position(|c| !c.is_zero())
}

/// v -= f·row, skipping zero entries of the row.
fn axpy(v: &mut [Scalar], f: &Scalar, row: &[Scalar]) {
    for (x, r) in v.iter_mut().zip(row) {
        if !r.is_zero() {
            *x -= f * r;
        }
    }
}

impl LinearSpace {
    pub fn zero(ambient: usize) -> Self {
        LinearSpace {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let rows = (0..ambient).map(|i| unit(ambient, i)).collect();
        LinearSpace {
            ambient,
            rows,
            pivots: (0..ambient).collect(),
        }
    }

    pub fn span<I>(ambient: usize, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<Scalar>>,
    {
        let mut s = Self::zero(ambient);
        for v in vectors {
            s.insert(v)?;
        }
        Ok(s)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check(&self, v: &[Scalar]) -> Result<()> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Remainder of v after eliminating every pivot column; zero iff v is in
    /// the space.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                axpy(&mut v, &f, row);
            }
        }
        v
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        v.len() == self.ambient && self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Coordinates of v in the stored basis, or `None` if v is not a member.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// Adds a vector, keeping the canonical form. Returns whether the
    /// dimension grew.
    pub fn insert(&mut self, v: Vec<Scalar>) -> Result<bool> {
        self.check(&v)?;
        let mut v = self.reduce(&v);
        let Some(p) = first_nonzero(&v) else {
            return Ok(false);
        };
        let inv = v[p].recip();
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                axpy(row, &f, &v);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, v);
        self.pivots.insert(at, p);
        Ok(true)
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: other.ambient,
            });
        }
        let mut s = self.clone();
        for r in &other.rows {
            s.insert(r.clone())?;
        }
        Ok(s)
    }

    /// Intersection by the Zassenhaus construction.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: other.ambient,
            });
        }
        let m = self.ambient;
        let mut big = Self::zero(2 * m);
        for r in &self.rows {
            let mut v = r.clone();
            v.extend(r.iter().cloned());
            big.insert(v)?;
        }
        for r in &other.rows {
            let mut v = r.clone();
            v.extend(std::iter::repeat_n(Scalar::zero(), m));
            big.insert(v)?;
        }
        let rows = big
            .rows
            .iter()
            .zip(&big.pivots)
            .filter(|(_, &p)| p >= m)
            .map(|(r, _)| r[m..].to_vec());
        Self::span(m, rows)
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.rows.iter().all(|r| other.contains(r))
    }

    /// dim(self / sub); `sub` must be contained in `self`.
    pub fn quotient_dim(&self, sub: &Self) -> Result<usize> {
        if !sub.is_subspace_of(self) {
            return Err(Error::Usage("quotient by a non-subspace".into()));
        }
        Ok(self.dim() - sub.dim())
    }

    /// Vectors of this basis that extend a basis of `sub` to one of `self`,
    /// in pivot order. Their classes form a basis of self / sub.
    pub fn complement_basis(&self, sub: &Self) -> Result<Vec<Vec<Scalar>>> {
        if !sub.is_subspace_of(self) {
            return Err(Error::Usage("complement of a non-subspace".into()));
        }
        let mut acc = sub.clone();
        let mut out = Vec::new();
        for r in &self.rows {
            if acc.insert(r.clone())? {
                out.push(r.clone());
            }
        }
        Ok(out)
    }

    /// Image under the projection onto the listed coordinates.
    pub fn project(&self, coords: &[usize]) -> Result<Self> {
        let rows = self
            .rows
            .iter()
            .map(|r| coords.iter().map(|&c| r[c].clone()).collect());
        Self::span(coords.len(), rows)
    }

    /// The subspace of members whose listed coordinates all vanish.
    pub fn vanishing_on(&self, coords: &[usize]) -> Result<Self> {
        // Combinations c of the basis with sum_k c_k row_k[coords] = 0.
        let constraint_rows: Vec<Vec<Scalar>> = coords
            .iter()
            .map(|&col| self.rows.iter().map(|r| r[col].clone()).collect())
            .collect();
        let combos = kernel(&constraint_rows, self.dim())?;
        let vecs = combos.rows.iter().map(|c| self.combine(c));
        Self::span(self.ambient, vecs)
    }

    /// sum_k c_k · basis_k.
    pub fn combine(&self, c: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.ambient];
        for (ck, row) in c.iter().zip(&self.rows) {
            if !ck.is_zero() {
                axpy(&mut out, &-ck, row);
            }
        }
        out
    }
}

pub fn unit(ambient: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); ambient];
    v[i] = Scalar::one();
    v
}

/// Null space {x in K^ncols : rows · x = 0}.
pub fn kernel(rows: &[Vec<Scalar>], ncols: usize) -> Result<LinearSpace> {
    let reduced = LinearSpace::span(ncols, rows.iter().cloned())?;
    let pivot_set: Vec<bool> = {
        let mut s = vec![false; ncols];
        for &p in &reduced.pivots {
            s[p] = true;
        }
        s
    };
    let mut out = LinearSpace::zero(ncols);
    for f in (0..ncols).filter(|&f| !pivot_set[f]) {
        let mut x = unit(ncols, f);
        for (row, &p) in reduced.rows.iter().zip(&reduced.pivots) {
            x[p] = -row[f].clone();
        }
        out.insert(x)?;
    }
    Ok(out)
}

/// Coefficients c with sum_k c_k · generators_k = target, taking every free
/// variable to be zero. `None` when target is outside the span.
pub fn solve(generators: &[Vec<Scalar>], target: &[Scalar]) -> Option<Vec<Scalar>> {
    let g = generators.len();
    let m = target.len();
    if generators.iter().any(|v| v.len() != m) {
        return None;
    }
    // One equation per ambient coordinate, unknowns c_0..c_{g-1}, then rhs.
    let equations = (0..m).map(|i| {
        let mut row: Vec<Scalar> = generators.iter().map(|v| v[i].clone()).collect();
        row.push(target[i].clone());
        row
    });
    let system = LinearSpace::span(g + 1, equations).ok()?;
    if system.pivots.last() == Some(&g) {
        return None;
    }
    let mut c = vec![Scalar::zero(); g];
    for (row, &p) in system.rows.iter().zip(&system.pivots) {
        c[p] = row[g].clone();
    }
    Some(c)
}

pub fn rank(rows: &[Vec<Scalar>], ncols: usize) -> Result<usize> {
    Ok(LinearSpace::span(ncols, rows.iter().cloned())?.dim())
}
