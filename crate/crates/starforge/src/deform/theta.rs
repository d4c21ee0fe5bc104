//! Local automorphisms θ of (K[x]/(x^D))[t]/(t^{p+1}) and the ribbon they
//! induce on a congruence pair.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::scalar::factorial;
use crate::kernel::{BiPoly, LinearSpace, Scalar};

/// θ_μ: f ↦ Σ_{m ≤ p} (μt)^m/m! · ∂_x^m f, the substitution x ↦ x + μt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaAutomorphism {
    pub p: usize,
    pub mu: BiPoly,
}

impl ThetaAutomorphism {
    /// μ is kept modulo t^p; only that part acts.
    pub fn new(p: usize, mu: &BiPoly) -> Self {
        ThetaAutomorphism {
            p,
            mu: mu.retrunc(p.max(1)),
        }
    }

    pub fn apply(&self, f: &BiPoly) -> Result<BiPoly> {
        theta_apply(self, f)
    }

    /// θ_{−μ}, the inverse when μ does not depend on x.
    pub fn inverse(&self) -> Option<Self> {
        self.mu.is_x_free().then(|| ThetaAutomorphism {
            p: self.p,
            mu: self.mu.neg(),
        })
    }
}

pub fn theta_apply(a: &ThetaAutomorphism, f: &BiPoly) -> Result<BiPoly> {
    let n = a.p + 1;
    if f.trunc() != n {
        return Err(Error::TruncationMismatch {
            left: f.trunc(),
            right: n,
        });
    }
    if f.xdeg() != a.mu.xdeg() {
        return Err(Error::DimensionMismatch {
            expected: a.mu.xdeg(),
            got: f.xdeg(),
        });
    }
    let mt = a.mu.retrunc(n).shift_t(1);
    let mut out = f.clone();
    let mut power = BiPoly::one(f.xdeg(), n);
    let mut deriv = f.clone();
    for m in 1..=a.p {
        power = power.mul(&mt)?;
        deriv = deriv.deriv_x();
        if deriv.is_zero() || power.is_zero() {
            break;
        }
        let term = power.mul(&deriv)?.scale(&factorial(m).recip());
        out = out.add(&term)?;
    }
    Ok(out)
}

/// g + h·z in (K[x]/(x^D))[z]/(z²); g and h are x-polynomials of length D.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RibbonElement {
    #[serde(with = "crate::kernel::wire::scalars")]
    pub base: Vec<Scalar>,
    #[serde(with = "crate::kernel::wire::scalars")]
    pub nilpotent: Vec<Scalar>,
}

fn xmul(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let d = a.len();
    let mut out = vec![Scalar::zero(); d];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().take(d - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn xderiv(a: &[Scalar]) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); a.len()];
    for k in 1..a.len() {
        out[k - 1] = &a[k] * Scalar::from_integer((k as i64).into());
    }
    out
}

impl RibbonElement {
    pub fn mul(&self, other: &Self) -> Self {
        let cross: Vec<Scalar> = xmul(&self.base, &other.nilpotent)
            .into_iter()
            .zip(xmul(&self.nilpotent, &other.base))
            .map(|(a, b)| a + b)
            .collect();
        RibbonElement {
            base: xmul(&self.base, &other.base),
            nilpotent: cross,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.base.iter().chain(&self.nilpotent).all(Zero::is_zero)
    }

    /// g + hz ↦ g + (h + τ g')z, the first-order substitution x ↦ x + τz.
    pub fn shear(&self, tau: &[Scalar]) -> Self {
        let dg = xmul(tau, &xderiv(&self.base));
        RibbonElement {
            base: self.base.clone(),
            nilpotent: self.nilpotent.iter().zip(dg).map(|(h, s)| h + s).collect(),
        }
    }

    fn flat(&self) -> Vec<Scalar> {
        self.base.iter().chain(&self.nilpotent).cloned().collect()
    }
}

/// (a + αt^p, a + βt^p) ↦ a|_{t=0} + (β − α)z.
pub fn ribbon_quotient(p: usize, first: &BiPoly, second: &BiPoly) -> Result<RibbonElement> {
    if p == 0 {
        return Err(Error::Usage("the pair order p must be positive".into()));
    }
    for f in [first, second] {
        if f.trunc() != p + 1 {
            return Err(Error::TruncationMismatch {
                left: f.trunc(),
                right: p + 1,
            });
        }
    }
    let diff = second.sub(first)?;
    if let Some(b) = diff.t_valuation().filter(|&b| b < p) {
        return Err(Error::Usage(format!(
            "the pair differs at t^{b}, below t^{p}"
        )));
    }
    Ok(RibbonElement {
        base: first.eval_t0(),
        nilpotent: diff.t_coeff(p),
    })
}

/// A basis of the pair algebra {(α₁, α₂) : α₁ ≡ α₂ mod t^p} at truncation
/// p + 1: the diagonal x^e t^b and x^e t^p on the first factor.
pub fn pair_algebra_basis(p: usize, xdeg: usize) -> Vec<(BiPoly, BiPoly)> {
    let one = Scalar::from_integer(1.into());
    let mut out = Vec::new();
    for e in 0..xdeg {
        for b in 0..=p {
            let m = BiPoly::monomial(one.clone(), e, b, xdeg, p + 1);
            out.push((m.clone(), m));
        }
        out.push((
            BiPoly::monomial(one.clone(), e, p, xdeg, p + 1),
            BiPoly::zero(xdeg, p + 1),
        ));
    }
    out
}

/// The ring-map certificates of `ribbon_quotient` on the pair algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RibbonCheck {
    pub multiplicative: bool,
    pub unital: bool,
    pub surjective: bool,
    /// The kernel is the ideal generated by (t, t).
    pub kernel_is_pi: bool,
    pub z_squared_zero: bool,
}

impl RibbonCheck {
    pub fn certified(&self) -> bool {
        self.multiplicative
            && self.unital
            && self.surjective
            && self.kernel_is_pi
            && self.z_squared_zero
    }
}

pub fn ribbon_check(p: usize, xdeg: usize) -> Result<RibbonCheck> {
    let basis = pair_algebra_basis(p, xdeg);
    let images: Vec<RibbonElement> = basis
        .iter()
        .map(|(a, b)| ribbon_quotient(p, a, b))
        .collect::<Result<_>>()?;
    let mut multiplicative = true;
    for (i, (a1, a2)) in basis.iter().enumerate() {
        for (j, (b1, b2)) in basis.iter().enumerate().skip(i) {
            let prod = ribbon_quotient(p, &a1.mul(b1)?, &a2.mul(b2)?)?;
            multiplicative &= prod == images[i].mul(&images[j]);
        }
    }
    let one = BiPoly::one(xdeg, p + 1);
    let unit_image = ribbon_quotient(p, &one, &one)?;
    let unital = unit_image.base == one.eval_t0() && unit_image.nilpotent.iter().all(Zero::is_zero);

    let width = 2 * xdeg;
    let rows: Vec<Vec<Scalar>> = images.iter().map(RibbonElement::flat).collect();
    let image = LinearSpace::span(width, rows.clone())?;
    let surjective = image.dim() == width;
    // the basis is independent, so rank-nullity gives the kernel dimension
    let kernel_dim = basis.len() - image.dim();
    // (t, t)·O_Z is spanned by the products of π with the basis
    let pi = BiPoly::monomial(Scalar::from_integer(1.into()), 0, 1, xdeg, p + 1);
    let coords = |a: &BiPoly, b: &BiPoly| -> Vec<Scalar> {
        let mut v = a.coeffs().to_vec();
        v.extend(b.coeffs().iter().cloned());
        v
    };
    let flat_basis =
        LinearSpace::span(2 * xdeg * (p + 1), basis.iter().map(|(a, b)| coords(a, b)))?;
    let mut ideal = LinearSpace::zero(2 * xdeg * (p + 1));
    let mut in_kernel = true;
    for (a, b) in &basis {
        let (pa, pb) = (pi.mul(a)?, pi.mul(b)?);
        in_kernel &= ribbon_quotient(p, &pa, &pb)?.is_zero();
        ideal.insert(coords(&pa, &pb))?;
    }
    let kernel_is_pi = in_kernel && ideal.dim() == kernel_dim && ideal.is_subspace_of(&flat_basis);

    let z = RibbonElement {
        base: vec![Scalar::zero(); xdeg],
        nilpotent: unit_image.base.clone(),
    };
    Ok(RibbonCheck {
        multiplicative,
        unital,
        surjective,
        kernel_is_pi,
        z_squared_zero: z.mul(&z).is_zero(),
    })
}

/// The outcome of comparing ribbon ∘ (θ_{μ1} × θ_{μ2}) with the shear by τ
/// on a basis of the pair algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CocycleRecord {
    pub p: usize,
    /// The coefficient of t^{p−1} in μ2 − μ1.
    #[serde(with = "crate::kernel::wire::scalars")]
    pub tau: Vec<Scalar>,
    pub pairs_checked: usize,
    /// Index of the first basis pair where the two sides differ.
    pub mismatch: Option<usize>,
}

impl CocycleRecord {
    pub fn holds(&self) -> bool {
        self.mismatch.is_none()
    }
}

pub fn induced_cocycle(p: usize, mu1: &BiPoly, mu2: &BiPoly) -> Result<CocycleRecord> {
    if p == 0 {
        return Err(Error::Usage("the pair order p must be positive".into()));
    }
    let xdeg = mu1.xdeg();
    let width = p.max(1);
    let diff = mu2.rexdeg(xdeg).retrunc(width).sub(&mu1.retrunc(width))?;
    if let Some(b) = diff.t_valuation().filter(|&b| b + 1 < p) {
        return Err(Error::Usage(format!(
            "mu1 and mu2 differ at t^{b}, below t^{}",
            p - 1
        )));
    }
    let tau = diff.t_coeff(p - 1);
    let th1 = ThetaAutomorphism::new(p, mu1);
    let th2 = ThetaAutomorphism::new(p, &mu2.rexdeg(xdeg));
    let basis = pair_algebra_basis(p, xdeg);
    let mut mismatch = None;
    for (k, (a, b)) in basis.iter().enumerate() {
        let left = ribbon_quotient(p, &th1.apply(a)?, &th2.apply(b)?)?;
        let right = ribbon_quotient(p, a, b)?.shear(&tau);
        if left != right {
            mismatch = Some(k);
            break;
        }
    }
    Ok(CocycleRecord {
        p,
        tau,
        pairs_checked: basis.len(),
        mismatch,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::kernel::{frac, int};

    fn poly(xdeg: usize, trunc: usize, rows: &[&[i64]]) -> BiPoly {
        BiPoly::from_int_rows(xdeg, trunc, rows)
    }

    #[test]
    fn theta_is_the_substitution() {
        let th = ThetaAutomorphism::new(2, &BiPoly::one(3, 2));
        // x ↦ x + t
        let x = poly(3, 3, &[&[0], &[1]]);
        assert_eq!(th.apply(&x).unwrap(), poly(3, 3, &[&[0, 1], &[1]]));
        // x² ↦ x² + 2xt + t²
        let x2 = poly(3, 3, &[&[0], &[0], &[1]]);
        assert_eq!(
            th.apply(&x2).unwrap(),
            poly(3, 3, &[&[0, 0, 1], &[0, 2], &[1]])
        );
    }

    #[test]
    fn theta_with_mu_x_scales() {
        let mu = poly(3, 2, &[&[0], &[1]]);
        let th = ThetaAutomorphism::new(2, &mu);
        let x2 = poly(3, 3, &[&[0], &[0], &[1]]);
        assert_eq!(
            th.apply(&x2).unwrap(),
            poly(3, 3, &[&[0], &[0], &[1, 2, 1]])
        );
    }

    #[test]
    fn theta_rejects_wrong_truncation() {
        let th = ThetaAutomorphism::new(2, &BiPoly::one(3, 2));
        assert!(matches!(
            th.apply(&BiPoly::one(3, 2)),
            Err(Error::TruncationMismatch { .. })
        ));
    }

    #[test]
    fn ribbon_examples() {
        let p = 2;
        let t = poly(2, 3, &[&[0, 1]]);
        assert!(ribbon_quotient(p, &t, &t).unwrap().is_zero());
        let a = poly(2, 3, &[&[0, 0, 1], &[1]]);
        let b = poly(2, 3, &[&[0, 0, 2], &[1]]);
        let r = ribbon_quotient(p, &a, &b).unwrap();
        assert_eq!(r.base, vec![int(0), int(1)]);
        assert_eq!(r.nilpotent, vec![int(1), int(0)]);
        let one = BiPoly::one(2, 3);
        let r = ribbon_quotient(p, &one, &one).unwrap();
        assert_eq!(r.base, vec![int(1), int(0)]);
        assert!(r.nilpotent.iter().all(Zero::is_zero));
    }

    #[test]
    fn ribbon_refuses_non_congruent_pairs() {
        let a = poly(2, 3, &[&[0, 1]]);
        let b = poly(2, 3, &[&[0, 2]]);
        assert!(matches!(ribbon_quotient(2, &a, &b), Err(Error::Usage(_))));
    }

    #[test]
    fn ribbon_is_a_ring_map() {
        for p in 1..=3 {
            for d in 1..=3 {
                let c = ribbon_check(p, d).unwrap();
                assert!(c.certified(), "p={p} D={d}: {c:?}");
            }
        }
    }

    #[test]
    fn cocycle_examples() {
        let zero = BiPoly::zero(3, 2);
        let rec = induced_cocycle(2, &zero, &zero).unwrap();
        assert!(rec.holds());
        assert!(rec.tau.iter().all(Zero::is_zero));

        let t = poly(3, 2, &[&[0, 1]]);
        let rec = induced_cocycle(2, &zero, &t).unwrap();
        assert_eq!(rec.tau, vec![int(1), int(0), int(0)]);
        assert!(rec.holds());

        let xt = poly(3, 2, &[&[0], &[0, 1]]);
        let rec = induced_cocycle(2, &xt, &zero).unwrap();
        assert_eq!(rec.tau, vec![int(0), int(-1), int(0)]);
        assert!(rec.holds());
    }

    #[test]
    fn shear_acts_on_x_and_x_squared() {
        let tau = vec![int(1), int(0), int(0)];
        let x = RibbonElement {
            base: vec![int(0), int(1), int(0)],
            nilpotent: vec![int(0); 3],
        };
        assert_eq!(x.shear(&tau).nilpotent, vec![int(1), int(0), int(0)]);
        let x2 = x.mul(&x);
        assert_eq!(x2.shear(&tau).nilpotent, vec![int(0), int(2), int(0)]);
        let half = vec![frac(1, 2), int(0), int(0)];
        assert_eq!(x2.shear(&half).nilpotent, vec![int(0), int(1), int(0)]);
    }

    fn grid(xdeg: usize, trunc: usize, v: &[i64]) -> BiPoly {
        BiPoly::new(xdeg, trunc, v.iter().map(|&c| int(c)).collect()).unwrap()
    }

    proptest! {
        // θ(fg) = θ(f)θ(g) whenever fg needs no x-truncation
        #[test]
        fn theta_is_multiplicative(
            p in 1usize..5,
            mu in proptest::collection::vec(-3i64..4, 30),
            f in proptest::collection::vec(-3i64..4, 30),
            g in proptest::collection::vec(-3i64..4, 30),
            split in 1usize..5,
        ) {
            let d = 6;
            let df = split;
            let dg = d - split;
            let n = p + 1;
            let f = grid(df, n, &f[..df * n]).rexdeg(d);
            let g = grid(dg, n, &g[..dg * n]).rexdeg(d);
            let mu = grid(2, p, &mu[..2 * p]).rexdeg(d);
            let th = ThetaAutomorphism::new(p, &mu);
            let lhs = th.apply(&f.mul(&g).unwrap()).unwrap();
            let rhs = th.apply(&f).unwrap().mul(&th.apply(&g).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            let t = BiPoly::monomial(int(1), 0, 1, d, n);
            prop_assert_eq!(th.apply(&t).unwrap(), t);
        }

        #[test]
        fn x_free_theta_inverts(
            p in 1usize..5,
            mu in proptest::collection::vec(-3i64..4, 4),
            f in proptest::collection::vec(-3i64..4, 20),
        ) {
            let d = 4;
            let n = p + 1;
            let mu = grid(1, p, &mu[..p]).rexdeg(d);
            let f = grid(d, n, &f[..d * n]);
            let th = ThetaAutomorphism::new(p, &mu);
            let back = th.inverse().unwrap();
            prop_assert_eq!(back.apply(&th.apply(&f).unwrap()).unwrap(), f);
        }
    }

    #[test]
    fn cocycle_refuses_far_apart_mus() {
        let zero = BiPoly::zero(2, 3);
        let one = BiPoly::one(2, 3);
        assert!(matches!(
            induced_cocycle(3, &zero, &one),
            Err(Error::Usage(_))
        ));
    }
}
