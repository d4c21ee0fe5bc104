//! Fragmented deformations, presented by the image of the local ring at a
//! point of C inside ∏ (K[x]/(x^D))[t]/(t^{q_i}).
//!
//! The x-window D is a fixed knob: every identity checked here is a
//! coefficient-wise polynomial identity, so fixed-degree inputs lose
//! nothing by truncating in x.

mod theta;

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::build::{self, ExtensionStep, QuotientReport, SamplerStats};
use crate::compare;
use crate::error::{Error, Result};
use crate::invariants::{self, Check, SpectrumMatrix, UnitConstantTable, ValidationReport};
use crate::kernel::linspace::solve;
use crate::kernel::{BiPoly, DeformGerm, LinearSpace, MultiGerm, Scalar, TruncSeries};
use crate::model::{divide_component, Kind, Layout, Model, Vector};
use crate::star::StarPresentation;

pub use theta::{
    induced_cocycle, pair_algebra_basis, ribbon_check, ribbon_quotient, theta_apply, CocycleRecord,
    RibbonCheck, RibbonElement, ThetaAutomorphism,
};

/// Default x-window.
pub const DEFAULT_XDEG: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformPresentation {
    pub(crate) model: Model,
}

/// u_ij with component i zero and component j exactly t^{p_ij}, at
/// truncations q + 1, with its unit row and the constants a_ij^(m).
#[derive(Clone, Debug)]
pub struct DeformPairGenerator {
    pub i: usize,
    pub j: usize,
    pub p: usize,
    pub element: DeformGerm,
    pub units: Vec<Option<BiPoly>>,
    pub constants: Vec<Scalar>,
}

/// One extension step with units depending on x.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformStep {
    pub p_new: Vec<usize>,
    pub beta: Vec<BiPoly>,
}

impl DeformStep {
    /// The x-constant step with the same data as a star step.
    pub fn from_star_step(step: &ExtensionStep, xdeg: usize) -> Self {
        DeformStep {
            p_new: step.p_new.clone(),
            beta: step
                .beta
                .iter()
                .map(|b| BiPoly::from_series(b, xdeg))
                .collect(),
        }
    }
}

/// The quotient certificates of a step and, when Q is free over
/// (K[x]/(x^D))[π_n]/(π_n^{q_n}) with basis x^e π^k, the completed
/// n-component deformation.
#[derive(Clone, Debug)]
pub struct DeformExtension {
    pub report: QuotientReport,
    pub completion: Option<DeformPresentation>,
}

/// v ≡ (P_1(π_1), …, P_n(π_n)) mod (π_1^{m_1}) × ⋯ × (π_n^{m_n}).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasicDecomposition {
    pub order: Vec<usize>,
    /// P_i, truncated at m_i.
    pub polys: Vec<TruncSeries>,
}

/// The first coefficient x^a t^b (a ≥ 1, b < m_i) that keeps a coordinate
/// from being a polynomial in π_i.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixedTerm {
    pub component: usize,
    pub x_power: usize,
    pub t_power: usize,
    #[serde(with = "crate::kernel::wire::scalar")]
    pub coeff: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasicVerdict {
    Basic(BasicDecomposition),
    NotBasic(MixedTerm),
}

impl BasicVerdict {
    pub fn decomposition(self) -> Option<BasicDecomposition> {
        match self {
            BasicVerdict::Basic(d) => Some(d),
            BasicVerdict::NotBasic(_) => None,
        }
    }
}

/// The t-only slice of a deformation, with the checks that tie it back to
/// the deformation.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub star: StarPresentation,
    pub checks: Vec<Check>,
}

impl Extraction {
    pub fn certified(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn dgerm(l: &Layout, v: &[Scalar]) -> DeformGerm {
    MultiGerm::new((0..l.n()).map(|i| l.component(v, i)).collect())
}

/// Functions on the n planes y = c_i t of (x, y, t)-space, glued along the
/// line y = t = 0: the images of x^e t^a y^b with a + b ≤ n − 2.
pub fn planes(c: &[Scalar], xdeg: usize) -> Result<DeformPresentation> {
    let n = c.len();
    if n < 2 {
        return Err(Error::Usage(
            "a deformation needs at least two components".into(),
        ));
    }
    for i in 0..n {
        if let Some(j) = (i + 1..n).find(|&j| c[j] == c[i]) {
            return Err(Error::DegenerateInput(format!(
                "planes {} and {} have the same slope",
                i + 1,
                j + 1
            )));
        }
    }
    let layout = Layout::new(xdeg, vec![n - 1; n])?;
    let mut vectors = Vec::new();
    for e in 0..xdeg {
        for total in 0..n - 1 {
            for b in 0..=total {
                let mut v = layout.zero();
                for (i, ci) in c.iter().enumerate() {
                    let mut coeff = Scalar::one();
                    for _ in 0..b {
                        coeff *= ci;
                    }
                    v[layout.index(i, e, total)] = coeff;
                }
                vectors.push(v);
            }
        }
    }
    Ok(DeformPresentation {
        model: Model::new(Kind::Deformation, layout, vectors)?,
    })
}

impl DeformPresentation {
    /// A deformation from its x-window, level vector and a spanning set.
    pub fn new(xdeg: usize, q: Vec<usize>, basis: Vec<DeformGerm>) -> Result<Self> {
        if q.len() < 2 {
            return Err(Error::Usage(
                "a deformation needs at least two components".into(),
            ));
        }
        let layout = Layout::new(xdeg, q.clone())?;
        let mut vectors = Vec::with_capacity(basis.len());
        for g in &basis {
            if g.n() != q.len() {
                return Err(Error::DimensionMismatch {
                    expected: q.len(),
                    got: g.n(),
                });
            }
            for (c, &qi) in g.components.iter().zip(&q) {
                if c.trunc() != qi {
                    return Err(Error::TruncationMismatch {
                        left: c.trunc(),
                        right: qi,
                    });
                }
                if c.xdeg() != xdeg {
                    return Err(Error::DimensionMismatch {
                        expected: xdeg,
                        got: c.xdeg(),
                    });
                }
            }
            vectors.push(layout.from_components(&g.components)?);
        }
        Ok(DeformPresentation {
            model: Model::new(Kind::Deformation, layout, vectors)?,
        })
    }

    fn from_model(model: Model) -> Self {
        DeformPresentation {
            model: Model {
                kind: Kind::Deformation,
                ..model
            },
        }
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    pub fn xdeg(&self) -> usize {
        self.model.layout.xdeg
    }

    pub fn q(&self) -> &[usize] {
        self.model.q()
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn basis(&self) -> Vec<DeformGerm> {
        let l = &self.model.layout;
        self.model.basis().iter().map(|v| dgerm(l, v)).collect()
    }

    pub fn one(&self) -> DeformGerm {
        dgerm(&self.model.layout, &self.model.layout.one())
    }

    pub fn pi(&self) -> DeformGerm {
        dgerm(&self.model.layout, &self.model.layout.pi())
    }

    /// The element x·1.
    pub fn x(&self) -> DeformGerm {
        let l = &self.model.layout;
        dgerm(l, &l.diagonal_monomial(&Scalar::one(), 1, 0))
    }

    /// Membership of a tuple, each component read modulo t^{q_i} and x^D.
    pub fn membership(&self, g: &DeformGerm) -> Result<bool> {
        if g.n() != self.n() {
            return Err(Error::Usage(format!(
                "expected {} components, got {}",
                self.n(),
                g.n()
            )));
        }
        self.model.contains_components(&g.components)
    }

    pub fn validate(&self) -> ValidationReport {
        invariants::validate(&self.model)
    }

    pub fn spectrum_matrix(&self) -> SpectrumMatrix {
        SpectrumMatrix(self.model.spectrum())
    }

    pub fn spectrum(&self) -> Result<SpectrumMatrix> {
        let p = self.spectrum_matrix();
        if let Some(i) = p.consistency_violation(self.q()) {
            return Err(Error::InvalidDeformation(format!(
                "row {} of {p} sums to {} but q_{} = {}",
                i + 1,
                p.row_sums()[i],
                i + 1,
                self.q()[i]
            )));
        }
        Ok(p)
    }

    pub fn lambda(&self) -> Result<Vec<Scalar>> {
        self.model.lambda()
    }

    fn head(&self) -> Model {
        self.model.headroom(1)
    }

    /// Fails with `InvalidDeformation` when a unit constant depends on x.
    pub fn pair_generator(&self, i: usize, j: usize) -> Result<DeformPairGenerator> {
        let p = self.spectrum()?;
        let head = self.head();
        let raw = invariants::pair_generator(&head, &p, i, j)?;
        Ok(DeformPairGenerator {
            i,
            j,
            p: p.get(i, j),
            element: dgerm(&head.layout, &raw.element),
            units: raw.units,
            constants: raw.constants,
        })
    }

    pub fn unit_constant_table(&self) -> Result<UnitConstantTable> {
        let p = self.spectrum()?;
        invariants::unit_table(&self.head(), &p)
    }

    /// The table of a_ij^(m) with every law asserted.
    pub fn unit_constants(&self) -> Result<UnitConstantTable> {
        let table = self.unit_constant_table()?;
        let lambda = self.lambda()?;
        let bad = table.violations(Some(&lambda));
        if let Some(first) = bad.first() {
            return Err(Error::InvalidDeformation(format!(
                "{} unit-constant law violations, first: {first}",
                bad.len()
            )));
        }
        Ok(table)
    }

    /// Span equality of the vanishing ideal of the components in `subset`
    /// with the ideal of its single generator, at truncations q + 1.
    pub fn substar_ideal_check(&self, subset: &[usize]) -> Result<Check> {
        let p = self.spectrum()?;
        let raw = invariants::substar_ideal(&self.head(), &p, subset)?;
        let name = format!(
            "ideal of components {:?} is principal",
            subset.iter().map(|i| i + 1).collect::<Vec<_>>()
        );
        Ok(if raw.ideal == raw.vanishing {
            Check::pass(name)
        } else {
            Check::fail(
                name,
                format!(
                    "generated ideal has dimension {}, vanishing ideal {}",
                    raw.ideal.dim(),
                    raw.vanishing.dim()
                ),
            )
        })
    }

    /// I_C = (u_ij) + (π): the functions vanishing on C against the ideal of
    /// the pair generators and π.
    pub fn curve_ideal_check(&self) -> Result<Check> {
        let n = self.n();
        let p = self.spectrum()?;
        let head = self.head();
        let l = &self.model.layout;
        let mut gens = vec![l.pi()];
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let raw = invariants::pair_generator(&head, &p, i, j)?;
                gens.push(head.layout.retrunc(&raw.element, l));
            }
        }
        let generated = self.model.ideal_span(&gens)?;
        let at_c: Vec<usize> = (0..n)
            .flat_map(|i| (0..l.xdeg).map(move |e| (i, e)))
            .map(|(i, e)| l.index(i, e, 0))
            .collect();
        let vanishing = self.model.space.vanishing_on(&at_c)?;
        let name = "I_C = (u_ij) + (pi)";
        Ok(if generated == vanishing {
            Check::pass(name)
        } else {
            Check::fail(
                name,
                format!(
                    "generated ideal has dimension {}, I_C has dimension {}",
                    generated.dim(),
                    vanishing.dim()
                ),
            )
        })
    }

    /// Elements of B whose first `k` coordinates carry no x-terms.
    pub(crate) fn t_only_on(&self, comps: &[usize]) -> Result<LinearSpace> {
        let l = &self.model.layout;
        let coords: Vec<usize> = comps
            .iter()
            .flat_map(|&i| (1..l.xdeg).flat_map(move |e| (0..l.trunc[i]).map(move |b| (i, e, b))))
            .map(|(i, e, b)| l.index(i, e, b))
            .collect();
        self.model.space.vanishing_on(&coords)
    }

    pub(crate) fn germ(&self, v: &[Scalar]) -> DeformGerm {
        dgerm(&self.model.layout, v)
    }

    pub(crate) fn vector(&self, g: &DeformGerm) -> Result<Vector> {
        self.model.layout.from_components(&g.components)
    }
}

/// Σ λ_i/β_i restricted to C, as a polynomial in x.
pub fn deform_nondegeneracy(d: &DeformPresentation, step: &DeformStep) -> Result<Vec<Scalar>> {
    build::check_step(&d.model, &step.p_new, &step.beta)?;
    build::nondegeneracy_raw(&d.model, &step.beta)
}

/// Q = B_ext/(u) with its certificates. Degenerate and non-transverse
/// steps are refused; the completion is emitted only in the free case.
pub fn extend_deformation(d: &DeformPresentation, step: &DeformStep) -> Result<DeformExtension> {
    let raw = build::analyze_raw(&d.model, &step.p_new, &step.beta)?;
    let rep = raw.report;
    if !build::is_unit_poly(&rep.socle_pairing) {
        return Err(Error::DegenerateExtension {
            value: rep.socle_pairing[0].clone(),
        });
    }
    if !rep.transverse {
        return Err(Error::StepNotTransverse(format!(
            "u = {} lies in I^2 + (pi)",
            build::germ_display(
                &raw.ext.layout,
                &build::element_u(&raw.ext.layout, &step.p_new, &step.beta)?
            )
        )));
    }
    if !(rep.top_power_zero && rep.below_top_nonzero && rep.flat == Some(true)) {
        return Err(Error::Contradiction(format!(
            "nondegenerate step failed its quotient certificates: {rep:?}"
        )));
    }
    let completion = if rep.monomial_basis {
        let (m, _) = build::extend_raw(&d.model, &step.p_new, &step.beta, Kind::Deformation)?;
        Some(DeformPresentation::from_model(m))
    } else {
        None
    };
    Ok(DeformExtension {
        report: rep,
        completion,
    })
}

/// A nondegenerate, transverse step whose units may depend on x.
pub fn random_deform_step<R: Rng>(
    d: &DeformPresentation,
    rng: &mut R,
    p_max: usize,
) -> Result<DeformStep> {
    let mut stats = SamplerStats::default();
    let (p_new, beta) = build::sample_raw(&d.model, rng, p_max, false, &mut stats)?;
    Ok(DeformStep { p_new, beta })
}

fn small_ints<R: Rng>(rng: &mut R, k: usize, r: i64) -> Vec<Scalar> {
    (0..k)
        .map(|_| crate::kernel::int(rng.gen_range(-r..=r)))
        .collect()
}

/// A random member of B whose coordinates in `comps` carry no x-terms.
pub fn random_t_only_member<R: Rng>(
    d: &DeformPresentation,
    rng: &mut R,
    comps: &[usize],
) -> Result<DeformGerm> {
    let space = d.t_only_on(comps)?;
    let c = small_ints(rng, space.dim(), 3);
    Ok(d.germ(&space.combine(&c)))
}

/// A pair (u, v) with u basic at order q and v carrying x-terms that u
/// kills, so uv is basic while v need not be.
pub fn random_cancellation_pair<R: Rng>(
    d: &DeformPresentation,
    rng: &mut R,
) -> Result<(DeformGerm, DeformGerm)> {
    let n = d.n();
    let all: Vec<usize> = (0..n).collect();
    let t_only = d.t_only_on(&all)?;
    let l = &d.model.layout;
    let u = t_only.combine(&small_ints(rng, t_only.dim(), 2));
    let mut v = t_only.combine(&small_ints(rng, t_only.dim(), 2));
    let low: Vec<usize> = (0..n)
        .flat_map(|i| {
            let k = l.valuation(&u, i).unwrap_or(l.trunc[i]);
            l.low_coords(i, l.trunc[i] - k.min(l.trunc[i]))
        })
        .collect();
    let junk = d.model.space.vanishing_on(&low)?;
    for (a, b) in v
        .iter_mut()
        .zip(junk.combine(&small_ints(rng, junk.dim(), 2)))
    {
        *a += b;
    }
    Ok((d.germ(&u), d.germ(&v)))
}

/// A deformation with `n` components: two planes through distinct random
/// slopes, extended by random steps with free quotients. With
/// `x_free_units` the steps are star steps on the matching lines star, so
/// the result stays the x-fibered copy of a star; otherwise the units may
/// depend on x and the free completion need not keep the t-only slice a
/// star.
pub fn random_deformation(
    seed: u64,
    n: usize,
    xdeg: usize,
    p_max: usize,
    x_free_units: bool,
) -> Result<DeformPresentation> {
    use rand::SeedableRng;
    if n < 2 || p_max == 0 || xdeg == 0 {
        return Err(Error::Usage("need n >= 2, p_max >= 1 and xdeg >= 1".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let a = rng.gen_range(-3i64..=3);
    let b = a + rng.gen_range(1i64..=3);
    let c = [crate::kernel::int(a), crate::kernel::int(b)];
    let mut d = planes(&c, xdeg)?;
    let mut s = crate::star::lines(&c)?;
    let mut attempts = 0;
    while d.n() < n {
        attempts += 1;
        if attempts > 50 {
            return Err(Error::GenerationFailed {
                attempts,
                degenerate: 0,
                rejected: attempts,
            });
        }
        if x_free_units {
            let step = build::random_step(&s, &mut rng, p_max)?;
            if let Some(next) =
                extend_deformation(&d, &DeformStep::from_star_step(&step, xdeg))?.completion
            {
                d = next;
                s = build::extend_star(&s, &step)?;
            }
        } else {
            let step = random_deform_step(&d, &mut rng, p_max)?;
            if let Some(next) = extend_deformation(&d, &step)?.completion {
                d = next;
            }
        }
    }
    Ok(d)
}

/// Decides whether `v` is basic at order `m`.
pub fn is_basic(d: &DeformPresentation, v: &DeformGerm, m: &[usize]) -> Result<BasicVerdict> {
    if !d.membership(v)? {
        return Err(Error::Usage(format!("{v} is not in the algebra")));
    }
    basic_at(d, v, m)
}

fn basic_at(d: &DeformPresentation, v: &DeformGerm, m: &[usize]) -> Result<BasicVerdict> {
    let n = d.n();
    if m.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.len(),
        });
    }
    if let Some(i) = (0..n).find(|&i| m[i] == 0 || m[i] > d.q()[i]) {
        return Err(Error::Usage(format!(
            "order m_{} = {} must lie in 1..={}",
            i + 1,
            m[i],
            d.q()[i]
        )));
    }
    let l = &d.model.layout;
    let v = l.from_components(&v.components)?;
    let mut polys = Vec::with_capacity(n);
    for (i, &mi) in m.iter().enumerate() {
        let c = l.component(&v, i);
        for b in 0..mi {
            for a in 1..l.xdeg {
                if !c.coeff(a, b).is_zero() {
                    return Ok(BasicVerdict::NotBasic(MixedTerm {
                        component: i,
                        x_power: a,
                        t_power: b,
                        coeff: c.coeff(a, b).clone(),
                    }));
                }
            }
        }
        polys.push(c.x_free_part().retrunc(mi));
    }
    Ok(BasicVerdict::Basic(BasicDecomposition {
        order: m.to_vec(),
        polys,
    }))
}

/// If the first n − 1 coordinates of `v` are polynomials in π_i modulo
/// π_i^{q_i}, so is the last one; returns its P_n.
pub fn check_basic_completion(d: &DeformPresentation, v: &DeformGerm) -> Result<TruncSeries> {
    if !d.membership(v)? {
        return Err(Error::Usage(format!("{v} is not in the algebra")));
    }
    let n = d.n();
    let q = d.q();
    let head: Vec<usize> = (0..n).map(|i| if i + 1 < n { q[i] } else { 1 }).collect();
    if let BasicVerdict::NotBasic(w) = basic_at(d, v, &head)? {
        if w.component + 1 < n {
            return Err(Error::Usage(format!(
                "coordinate {} has the term {} x^{} t^{}",
                w.component + 1,
                crate::kernel::scalar::display_scalar(&w.coeff),
                w.x_power,
                w.t_power
            )));
        }
    }
    match basic_at(d, v, q)? {
        BasicVerdict::Basic(mut dec) => Ok(dec.polys.pop().expect("n >= 2")),
        BasicVerdict::NotBasic(w) => Err(Error::Contradiction(format!(
            "coordinate {} is not a polynomial in pi: coefficient {} at x^{} t^{}",
            w.component + 1,
            crate::kernel::scalar::display_scalar(&w.coeff),
            w.x_power,
            w.t_power
        ))),
    }
}

/// Cancellation for basic elements: with w = uv, u and w basic at order q
/// and no coordinate of w zero, v is basic at order q_i − val(u_i).
pub fn cancel_basic(
    d: &DeformPresentation,
    u: &DeformGerm,
    v: &DeformGerm,
) -> Result<BasicDecomposition> {
    for g in [u, v] {
        if !d.membership(g)? {
            return Err(Error::Usage(format!("{g} is not in the algebra")));
        }
    }
    let l = &d.model.layout;
    let w = d.germ(&l.mul(&d.vector(u)?, &d.vector(v)?));
    if let Some(i) = w.components.iter().position(BiPoly::is_zero) {
        return Err(Error::Usage(format!("coordinate {} of uv vanishes", i + 1)));
    }
    let q = d.q();
    let pu = basic_at(d, u, q)?
        .decomposition()
        .ok_or_else(|| Error::Usage("u is not basic at order q".into()))?;
    basic_at(d, &w, q)?
        .decomposition()
        .ok_or_else(|| Error::Usage("uv is not basic at order q".into()))?;
    let order: Vec<usize> = pu
        .polys
        .iter()
        .zip(q)
        .map(|(p, &qi)| qi - p.valuation().unwrap_or(qi))
        .collect();
    match basic_at(d, v, &order)? {
        BasicVerdict::Basic(dec) => Ok(dec),
        BasicVerdict::NotBasic(t) => Err(Error::Contradiction(format!(
            "u and uv are basic but v has the term x^{} t^{} on coordinate {}",
            t.x_power,
            t.t_power,
            t.component + 1
        ))),
    }
}

/// P_0, P_1, … with v ≡ Σ_j P_j(π)·u^j modulo π^m, where u generates the
/// ideal of component `i` and has t-only coordinates.
pub fn basic_expansion(
    d: &DeformPresentation,
    v: &DeformGerm,
    i: usize,
    m: &[usize],
) -> Result<Option<Vec<TruncSeries>>> {
    if !d.membership(v)? {
        return Err(Error::Usage(format!("{v} is not in the algebra")));
    }
    let n = d.n();
    if m.len() != n || (0..n).any(|k| m[k] == 0 || m[k] > d.q()[k]) {
        return Err(Error::Usage("orders must lie in 1..=q_i".into()));
    }
    let ext = extract_raw(d)?;
    let gen = ext.substar_ideal(&[i])?.generator.retrunc(d.q());
    let l = &d.model.layout;
    let u = l.from_series(&gen.components)?;
    let top = *m.iter().max().expect("n >= 2");
    let coords: Vec<usize> = (0..n).flat_map(|k| l.low_coords(k, m[k])).collect();
    let restrict = |w: &[Scalar]| -> Vector { coords.iter().map(|&c| w[c].clone()).collect() };
    let mut gens = Vec::new();
    let mut upow = l.one();
    for _ in 0..top {
        for a in 0..top {
            gens.push(restrict(&l.mul(&l.pi_pow(a), &upow)));
        }
        upow = l.mul(&upow, &u);
    }
    let target = restrict(&d.vector(v)?);
    let Some(c) = solve(&gens, &target) else {
        return Ok(None);
    };
    Ok(Some(
        c.chunks(top)
            .map(|row| TruncSeries::new(row.to_vec()).expect("top >= 1"))
            .collect(),
    ))
}

/// (α_1 π^{m_1}, …) in B gives ((1/α_1) π^{M − m_1}, …) in B, M = Σ m_i.
pub fn reciprocal_element(d: &DeformPresentation, v: &DeformGerm) -> Result<DeformGerm> {
    if !d.membership(v)? {
        return Err(Error::Usage(format!("{v} is not in the algebra")));
    }
    let l = &d.model.layout;
    let vec = d.vector(v)?;
    let n = d.n();
    let mut orders = Vec::with_capacity(n);
    let mut units = Vec::with_capacity(n);
    for i in 0..n {
        let Some(m) = l.valuation(&vec, i) else {
            return Err(Error::Usage(format!(
                "coordinate {} vanishes, so it is not a unit times a power of t",
                i + 1
            )));
        };
        let alpha = divide_component(l, &vec, i, m).expect("valuation below truncation");
        if !alpha.is_unit() {
            return Err(Error::Usage(format!(
                "coordinate {} is not a unit times t^{m}",
                i + 1
            )));
        }
        orders.push(m);
        units.push(alpha);
    }
    let total: usize = orders.iter().sum();
    if let Some(i) = (0..n).find(|&i| 2 * orders[i] > total) {
        return Err(Error::Usage(format!(
            "coordinate {} has order {} above half of M = {total}; its unit is not known to enough precision",
            i + 1,
            orders[i]
        )));
    }
    let comps: Vec<BiPoly> = (0..n)
        .map(|i| {
            let qi = l.trunc[i];
            Ok(units[i].retrunc(qi).inverse()?.shift_t(total - orders[i]))
        })
        .collect::<Result<_>>()?;
    let r = MultiGerm::new(comps);
    if !d.membership(&r)? {
        return Err(Error::Contradiction(format!(
            "the reciprocal {r} of {v} is not in the algebra"
        )));
    }
    Ok(r)
}

fn extract_raw(d: &DeformPresentation) -> Result<StarPresentation> {
    let l = &d.model.layout;
    let slice = d.t_only_on(&(0..d.n()).collect::<Vec<_>>())?;
    let sl = Layout::new(1, l.trunc.clone())?;
    let vectors: Vec<Vector> = slice
        .basis()
        .iter()
        .map(|b| {
            let comps: Vec<TruncSeries> = (0..d.n()).map(|i| l.series(b, i)).collect();
            sl.from_series(&comps)
        })
        .collect::<Result<_>>()?;
    Ok(StarPresentation::from_model(Model::new(
        Kind::Star,
        sl,
        vectors,
    )?))
}

/// The star of t-only members, checked against the deformation: validity,
/// oblateness, equal spectra, and for every component k a t-only
/// generator of its vanishing ideal and a certified ideal filtration.
///
/// After a step whose units depend on x the t-only members are usually
/// too few to form a star, and this reports a contradiction.
pub fn extract_star(d: &DeformPresentation) -> Result<Extraction> {
    let star = extract_raw(d)?;
    let mut checks = Vec::new();
    let val = star.validate();
    checks.push(Check::from_option(
        "extracted star is valid",
        val.failures().next().map(|c| c.to_string()),
    ));
    if !val.is_valid() {
        return Err(Error::Contradiction(format!(
            "the t-only slice is not a star: {}",
            checks[0]
        )));
    }
    checks.push(Check::from_option(
        "extracted star is oblate",
        (!star.is_oblate()?).then(|| {
            format!(
                "embedding dimension {}",
                star.embedding_dimension().unwrap_or(0)
            )
        }),
    ));
    let ps = star.spectrum_matrix();
    let pd = d.spectrum_matrix();
    checks.push(Check::from_option(
        "spectra agree",
        (ps != pd).then(|| format!("star {ps}, deformation {pd}")),
    ));
    let head = d.head();
    let hl = &head.layout;
    for k in 0..d.n() {
        let ideal = star.substar_ideal(&[k])?;
        let g = hl.from_series(&ideal.generator.components)?;
        let generated = head.ideal_span(std::slice::from_ref(&g))?;
        let vanishing = head.vanishing_ideal(&[k])?;
        checks.push(Check::from_option(
            format!("ideal of component {} has a t-only generator", k + 1),
            (generated != vanishing).then(|| {
                format!(
                    "generated {} vs vanishing {}",
                    generated.dim(),
                    vanishing.dim()
                )
            }),
        ));
        let filt = compare::ideal_filtration(&star, &[ideal.generator.retrunc(d.q())])?;
        checks.push(Check::from_option(
            format!("filtration of the ideal of component {}", k + 1),
            (!filt.certified()).then(|| format!("levels {:?}", filt.levels())),
        ));
    }
    if let Some(bad) = checks.iter().find(|c| !c.passed) {
        return Err(Error::Contradiction(bad.to_string()));
    }
    Ok(Extraction { star, checks })
}
