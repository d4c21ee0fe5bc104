//! The engine shared by stars and deformations.
//!
//! An element of ∏ (K[x]/x^D)[t]/t^{T_i} is a flat vector: component i
//! occupies a block of D·T_i entries starting at D·Σ_{k<i} T_k, and inside
//! the block the coefficient of x^e t^b sits at `e * T_i + b` (the `BiPoly`
//! layout). Stars are the case D = 1.

use std::ops::Range;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::bipoly::mul_into;
use crate::kernel::linspace::{kernel, solve};
use crate::kernel::{BiPoly, LinearSpace, Scalar, TruncSeries};

pub(crate) type Vector = Vec<Scalar>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Star,
    Deformation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Layout {
    pub xdeg: usize,
    pub trunc: Vec<usize>,
    offsets: Vec<usize>,
}

impl Layout {
    pub fn new(xdeg: usize, trunc: Vec<usize>) -> Result<Self> {
        if xdeg == 0 || trunc.contains(&0) {
            return Err(Error::Usage(
                "x-degree and truncations must be positive".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(trunc.len() + 1);
        let mut acc = 0;
        for &q in &trunc {
            offsets.push(acc);
            acc += xdeg * q;
        }
        offsets.push(acc);
        Ok(Layout {
            xdeg,
            trunc,
            offsets,
        })
    }

    pub fn n(&self) -> usize {
        self.trunc.len()
    }

    pub fn dim(&self) -> usize {
        self.offsets[self.n()]
    }

    pub fn block(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn index(&self, i: usize, e: usize, b: usize) -> usize {
        self.offsets[i] + e * self.trunc[i] + b
    }

    pub fn with_trunc(&self, trunc: Vec<usize>) -> Result<Self> {
        Layout::new(self.xdeg, trunc)
    }

    pub fn headroom(&self, h: usize) -> Self {
        self.with_trunc(self.trunc.iter().map(|q| q + h).collect())
            .expect("positive truncations")
    }

    pub fn zero(&self) -> Vector {
        vec![Scalar::zero(); self.dim()]
    }

    /// Σ c x^e t^b placed in every component.
    pub fn diagonal_monomial(&self, c: &Scalar, e: usize, b: usize) -> Vector {
        let mut v = self.zero();
        if e < self.xdeg {
            for i in 0..self.n() {
                if b < self.trunc[i] {
                    v[self.index(i, e, b)] = c.clone();
                }
            }
        }
        v
    }

    pub fn one(&self) -> Vector {
        self.diagonal_monomial(&Scalar::one(), 0, 0)
    }

    pub fn pi_pow(&self, k: usize) -> Vector {
        self.diagonal_monomial(&Scalar::one(), 0, k)
    }

    pub fn pi(&self) -> Vector {
        self.pi_pow(1)
    }

    /// x^e t^b in component i only.
    pub fn component_monomial(&self, i: usize, e: usize, b: usize) -> Vector {
        let mut v = self.zero();
        if e < self.xdeg && b < self.trunc[i] {
            v[self.index(i, e, b)] = Scalar::one();
        }
        v
    }

    pub fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Vector {
        let mut out = self.zero();
        for i in 0..self.n() {
            let r = self.block(i);
            mul_into(
                &a[r.clone()],
                &b[r.clone()],
                self.xdeg,
                self.trunc[i],
                &mut out[r],
            );
        }
        out
    }

    /// Reads `v` (laid out by `self`) as polynomials and re-truncates into
    /// `to`, which must share n and D.
    pub fn retrunc(&self, v: &[Scalar], to: &Layout) -> Vector {
        debug_assert_eq!(self.n(), to.n());
        debug_assert_eq!(self.xdeg, to.xdeg);
        let mut out = to.zero();
        for i in 0..self.n() {
            let keep = self.trunc[i].min(to.trunc[i]);
            for e in 0..self.xdeg {
                for b in 0..keep {
                    out[to.index(i, e, b)] = v[self.index(i, e, b)].clone();
                }
            }
        }
        out
    }

    pub fn component(&self, v: &[Scalar], i: usize) -> BiPoly {
        BiPoly::new(self.xdeg, self.trunc[i], v[self.block(i)].to_vec())
            .expect("block matches layout")
    }

    pub fn series(&self, v: &[Scalar], i: usize) -> TruncSeries {
        self.component(v, i).x_free_part()
    }

    pub fn from_components(&self, comps: &[BiPoly]) -> Result<Vector> {
        if comps.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: comps.len(),
            });
        }
        let mut v = self.zero();
        for (i, c) in comps.iter().enumerate() {
            let c = c.rexdeg(self.xdeg).retrunc(self.trunc[i]);
            v[self.block(i)].clone_from_slice(c.coeffs());
        }
        Ok(v)
    }

    pub fn from_series(&self, comps: &[TruncSeries]) -> Result<Vector> {
        let bip: Vec<BiPoly> = comps
            .iter()
            .map(|s| BiPoly::from_series(s, self.xdeg))
            .collect();
        self.from_components(&bip)
    }

    /// All coordinates of component i.
    pub fn coords_of(&self, i: usize) -> Vec<usize> {
        self.block(i).collect()
    }

    /// Coordinates holding x^e t^b for b < k in component i.
    pub fn low_coords(&self, i: usize, k: usize) -> Vec<usize> {
        let k = k.min(self.trunc[i]);
        (0..self.xdeg)
            .flat_map(|e| (0..k).map(move |b| (e, b)))
            .map(|(e, b)| self.index(i, e, b))
            .collect()
    }

    /// First t-order at which components i and j of v differ, capped at
    /// the smaller truncation.
    pub fn agreement_order(&self, v: &[Scalar], i: usize, j: usize) -> usize {
        let cap = self.trunc[i].min(self.trunc[j]);
        (0..cap)
            .find(|&b| (0..self.xdeg).any(|e| v[self.index(i, e, b)] != v[self.index(j, e, b)]))
            .unwrap_or(cap)
    }

    /// t-valuation of component i, `None` if it vanishes.
    pub fn valuation(&self, v: &[Scalar], i: usize) -> Option<usize> {
        self.component(v, i).t_valuation()
    }
}

/// A finite image algebra: a subspace of the layout's ambient space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Model {
    pub kind: Kind,
    pub layout: Layout,
    pub space: LinearSpace,
}

/// Outcome of validating a model; each field is a witness for a failure.
#[derive(Clone, Debug, Default)]
pub(crate) struct ModelChecks {
    pub closure: Option<(usize, usize)>,
    pub has_one: bool,
    pub has_pi: bool,
    pub x_stable: Option<usize>,
    pub agreement: Option<usize>,
}

impl Model {
    pub fn new(kind: Kind, layout: Layout, vectors: Vec<Vector>) -> Result<Self> {
        let space = LinearSpace::span(layout.dim(), vectors)?;
        Ok(Model {
            kind,
            layout,
            space,
        })
    }

    pub fn invalid(&self, msg: impl Into<String>) -> Error {
        match self.kind {
            Kind::Star => Error::InvalidStar(msg.into()),
            Kind::Deformation => Error::InvalidDeformation(msg.into()),
        }
    }

    pub fn n(&self) -> usize {
        self.layout.n()
    }

    pub fn q(&self) -> &[usize] {
        &self.layout.trunc
    }

    pub fn basis(&self) -> &[Vector] {
        self.space.basis()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.space.contains(v)
    }

    /// The algebra at larger truncations: lifted basis plus the padding
    /// vectors x^e t^k e_i for q_i ≤ k < new_i.
    pub fn lift(&self, trunc: Vec<usize>) -> Result<Model> {
        if trunc.len() != self.n() || trunc.iter().zip(self.q()).any(|(a, b)| a < b) {
            return Err(Error::Usage("lift must not lower any truncation".into()));
        }
        let to = self.layout.with_trunc(trunc)?;
        let mut vectors: Vec<Vector> = self
            .basis()
            .iter()
            .map(|b| self.layout.retrunc(b, &to))
            .collect();
        for i in 0..self.n() {
            for k in self.q()[i]..to.trunc[i] {
                for e in 0..to.xdeg {
                    vectors.push(to.component_monomial(i, e, k));
                }
            }
        }
        Model::new(self.kind, to, vectors)
    }

    pub fn headroom(&self, h: usize) -> Model {
        let trunc = self.layout.headroom(h).trunc;
        self.lift(trunc).expect("raising truncations")
    }

    pub fn checks(&self) -> ModelChecks {
        let l = &self.layout;
        let basis = self.basis();
        let mut out = ModelChecks {
            has_one: self.contains(&l.one()),
            has_pi: self.contains(&l.pi()),
            ..Default::default()
        };
        'outer: for a in 0..basis.len() {
            for b in a..basis.len() {
                if !self.contains(&l.mul(&basis[a], &basis[b])) {
                    out.closure = Some((a, b));
                    break 'outer;
                }
            }
        }
        if l.xdeg > 1 {
            let x = l.diagonal_monomial(&Scalar::one(), 1, 0);
            out.x_stable = (0..basis.len()).find(|&k| !self.contains(&l.mul(&x, &basis[k])));
        }
        out.agreement = (0..basis.len()).find(|&k| {
            let b = &basis[k];
            (1..l.n()).any(|i| (0..l.xdeg).any(|e| b[l.index(i, e, 0)] != b[l.index(0, e, 0)]))
        });
        out
    }

    /// p_ij = the largest p ≤ min(q_i, q_j) with b_i ≡ b_j mod t^p for every
    /// basis element b.
    pub fn spectrum(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut p = vec![vec![0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = self
                    .basis()
                    .iter()
                    .map(|b| self.layout.agreement_order(b, i, j))
                    .min()
                    .unwrap_or(self.q()[i].min(self.q()[j]));
                p[i][j] = v;
                p[j][i] = v;
            }
        }
        p
    }

    /// J = B ∩ top slice, flattened to vectors in K^n (one per basis element
    /// of J and x-power), and the normal vector with first entry 1.
    pub fn lambda(&self) -> Result<Vec<Scalar>> {
        let l = &self.layout;
        let n = self.n();
        let lower: Vec<usize> = (0..n)
            .flat_map(|i| l.low_coords(i, l.trunc[i] - 1))
            .collect();
        let j_space = self.space.vanishing_on(&lower)?;
        let rows: Vec<Vector> = j_space
            .basis()
            .iter()
            .flat_map(|v| {
                (0..l.xdeg).map(move |e| {
                    (0..n)
                        .map(|i| v[l.index(i, e, l.trunc[i] - 1)].clone())
                        .collect::<Vector>()
                })
            })
            .collect();
        let flat = LinearSpace::span(n, rows)?;
        if flat.dim() + 1 != n {
            return Err(self.invalid(format!(
                "top slice J has dimension {} instead of {}",
                flat.dim(),
                n - 1
            )));
        }
        let normal = kernel(flat.basis(), n)?;
        let mut lambda = normal.basis()[0].clone();
        if let Some(i) = lambda.iter().position(Zero::is_zero) {
            return Err(self.invalid(format!("lambda has a zero coordinate at {}", i + 1)));
        }
        let s = lambda[0].recip();
        for c in lambda.iter_mut() {
            *c *= &s;
        }
        Ok(lambda)
    }

    /// The element of this algebra with component i zero and component j
    /// exactly t^p, reduced modulo the elements vanishing on both.
    pub fn element_with(&self, i: usize, j: usize, p: usize) -> Result<Vector> {
        let l = &self.layout;
        let mut coords = l.coords_of(i);
        coords.extend(l.coords_of(j));
        let target_full = l.component_monomial(j, 0, p);
        let gens: Vec<Vector> = self
            .basis()
            .iter()
            .map(|b| coords.iter().map(|&c| b[c].clone()).collect())
            .collect();
        let target: Vector = coords.iter().map(|&c| target_full[c].clone()).collect();
        let c = solve(&gens, &target).ok_or_else(|| {
            self.invalid(format!(
                "no element vanishes on component {} and equals t^{p} on component {}",
                i + 1,
                j + 1
            ))
        })?;
        let v = self.space.combine(&c);
        let ambiguity = self.space.vanishing_on(&coords)?;
        Ok(ambiguity.reduce(&v))
    }

    /// span{g·b : g in gens, b in basis}.
    pub fn ideal_span(&self, gens: &[Vector]) -> Result<LinearSpace> {
        let l = &self.layout;
        let mut s = LinearSpace::zero(l.dim());
        for g in gens {
            for b in self.basis() {
                s.insert(l.mul(g, b))?;
            }
        }
        Ok(s)
    }

    /// Elements vanishing on every listed component.
    pub fn vanishing_ideal(&self, comps: &[usize]) -> Result<LinearSpace> {
        let coords: Vec<usize> = comps
            .iter()
            .flat_map(|&i| self.layout.coords_of(i))
            .collect();
        self.space.vanishing_on(&coords)
    }

    /// Re-reads a polynomial tuple at this model's truncations and tests
    /// membership.
    pub fn contains_components(&self, comps: &[BiPoly]) -> Result<bool> {
        let v = self.layout.from_components(comps)?;
        Ok(self.contains(&v))
    }
}

/// The unit β with v_m = β t^{p} on component m, as a `BiPoly` at
/// truncation (T_m − p).
pub(crate) fn divide_component(
    layout: &Layout,
    v: &[Scalar],
    m: usize,
    p: usize,
) -> Option<BiPoly> {
    let c = layout.component(v, m);
    let t = layout.trunc[m];
    if p >= t {
        return None;
    }
    if (0..layout.xdeg).any(|e| (0..p).any(|b| !c.coeff(e, b).is_zero())) {
        return None;
    }
    let mut out = BiPoly::zero(layout.xdeg, t - p);
    for e in 0..layout.xdeg {
        for b in p..t {
            out.set(e, b - p, c.coeff(e, b).clone());
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::int;

    #[test]
    fn layout_indexing_matches_bipoly_grid() {
        let l = Layout::new(2, vec![2, 3]).unwrap();
        assert_eq!(l.dim(), 10);
        assert_eq!(l.index(1, 1, 2), 4 + 3 + 2);
        let v = l.component_monomial(1, 1, 2);
        assert_eq!(l.component(&v, 1).coeff(1, 2), &int(1));
    }

    #[test]
    fn componentwise_product() {
        let l = Layout::new(1, vec![2, 3]).unwrap();
        let pi = l.pi();
        let sq = l.mul(&pi, &pi);
        assert_eq!(sq, l.pi_pow(2));
        assert_eq!(l.series(&sq, 0), TruncSeries::zero(2));
    }

    #[test]
    fn lifting_adds_padding() {
        let l = Layout::new(1, vec![1, 1]).unwrap();
        let m = Model::new(Kind::Star, l.clone(), vec![l.one()]).unwrap();
        let up = m.headroom(1);
        assert_eq!(up.dim(), 3);
        assert!(up.contains(&up.layout.component_monomial(0, 0, 1)));
    }
}
