//! Building an n-star from an (n−1)-star and one extension step.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::linspace::{kernel, solve, unit};
use crate::kernel::{int, BiPoly, LinearSpace, MultiGerm, Scalar, TruncSeries};
use crate::model::{Kind, Layout, Model};
use crate::star::{self, StarPresentation};

/// The data (p_in, β_i) of one extension: u = (β_i t^{p_in})_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionStep {
    pub p_new: Vec<usize>,
    pub beta: Vec<TruncSeries>,
}

impl ExtensionStep {
    pub fn new(p_new: Vec<usize>, beta: Vec<TruncSeries>) -> Self {
        ExtensionStep { p_new, beta }
    }

    /// Constant β given by integers, at truncation 1.
    pub fn constant(p_new: Vec<usize>, beta: &[i64]) -> Self {
        ExtensionStep {
            p_new,
            beta: beta.iter().map(|&b| TruncSeries::from_ints(&[b])).collect(),
        }
    }

    pub(crate) fn bipolys(&self) -> Vec<BiPoly> {
        self.beta
            .iter()
            .map(|b| BiPoly::from_series(b, 1))
            .collect()
    }
}

/// Certificates for Q = B_ext / (u).
#[derive(Clone, Debug, Serialize)]
pub struct QuotientReport {
    pub dim: usize,
    pub q_new: usize,
    /// Σ λ_i/β_i(P), as an x-polynomial (a single scalar for stars).
    #[serde(with = "crate::kernel::wire::scalars")]
    pub nondegeneracy: Vec<Scalar>,
    /// Σ λ_i·[t^{q_i + p_in − q_n}](1/β_i), the socle functional evaluated
    /// on π^{q_n − 1}. Agrees with `nondegeneracy` when every q_i + p_in
    /// equals q_n, and decides t_n^{q_n − 1} = 0 in general.
    #[serde(with = "crate::kernel::wire::scalars")]
    pub socle_pairing: Vec<Scalar>,
    /// u generates I/(I² + (π)), I the functions vanishing at t = 0.
    pub transverse: bool,
    /// π^{q_n} lies in (u).
    pub top_power_zero: bool,
    /// π^{q_n − 1} does not lie in (u).
    pub below_top_nonzero: bool,
    /// The classes of x^e π^k (e < D, k < q_n) form a basis of Q.
    pub monomial_basis: bool,
    /// Flatness over K[t_n]/(t_n^{q_n}); `None` if t_n^{q_n} ≠ 0.
    pub flat: Option<bool>,
    pub dim_ext: usize,
    pub dim_ideal: usize,
}

impl QuotientReport {
    pub fn certified(&self) -> bool {
        self.top_power_zero
            && self.below_top_nonzero
            && self.monomial_basis
            && self.flat == Some(true)
    }
}

pub(crate) struct RawQuotient {
    pub report: QuotientReport,
    pub ext: Model,
    /// Rows [u·b | 0] and [x^e π^k | −tag]; present when the monomials are
    /// independent modulo (u).
    decomposer: Option<LinearSpace>,
}

pub(crate) fn check_step(model: &Model, p_new: &[usize], beta: &[BiPoly]) -> Result<()> {
    let n = model.n();
    if p_new.len() != n || beta.len() != n {
        return Err(Error::Usage(format!(
            "a step on {n} components needs {n} orders and {n} units"
        )));
    }
    if p_new.contains(&0) {
        return Err(Error::Usage("the orders p_in must be positive".into()));
    }
    if beta.iter().any(|b| !b.is_unit()) {
        return Err(Error::NotAUnit);
    }
    Ok(())
}

/// Σ λ_i / β_i restricted to t = 0, as a polynomial in x.
pub(crate) fn nondegeneracy_raw(model: &Model, beta: &[BiPoly]) -> Result<Vec<Scalar>> {
    let lambda = model.lambda()?;
    let d = model.layout.xdeg;
    let mut sum = BiPoly::zero(d, 1);
    for (l, b) in lambda.iter().zip(beta) {
        let at_c = b.rexdeg(d).retrunc(1);
        sum = sum.add(&at_c.inverse()?.scale(l))?;
    }
    Ok(sum.eval_t0())
}

/// The functional b ↦ Σ λ_i [t^{q_i + p_in − 1}](b_i/β_i) vanishes on (u)
/// and is evaluated here on π^{q_n − 1}.
pub(crate) fn socle_raw(model: &Model, p_new: &[usize], beta: &[BiPoly]) -> Result<Vec<Scalar>> {
    let lambda = model.lambda()?;
    let d = model.layout.xdeg;
    let q_new: usize = p_new.iter().sum();
    let mut sum = vec![Scalar::zero(); d];
    for (i, b) in beta.iter().enumerate() {
        let level = model.q()[i] + p_new[i];
        if level < q_new {
            continue;
        }
        let k = level - q_new;
        let inv = b.rexdeg(d).retrunc(k + 1).inverse()?;
        for (acc, c) in sum.iter_mut().zip(inv.t_coeff(k)) {
            *acc += &lambda[i] * c;
        }
    }
    Ok(sum)
}

pub(crate) fn analyze_raw(model: &Model, p_new: &[usize], beta: &[BiPoly]) -> Result<RawQuotient> {
    check_step(model, p_new, beta)?;
    let nondegeneracy = nondegeneracy_raw(model, beta)?;
    let socle_pairing = socle_raw(model, p_new, beta)?;
    let big: Vec<usize> = model.q().iter().zip(p_new).map(|(q, p)| q + p).collect();
    let ext = model.lift(big)?;
    let l = ext.layout.clone();
    let d = l.xdeg;
    let u = element_u(&l, p_new, beta)?;
    if !ext.contains(&u) {
        return Err(Error::StepNotInAlgebra(format!(
            "u = {} is not in the algebra",
            germ_display(&l, &u)
        )));
    }
    let transverse = transverse(&ext, &u)?;
    let ideal = ext.ideal_span(std::slice::from_ref(&u))?;
    let q_new: usize = p_new.iter().sum();
    let dim = ext.dim() - ideal.dim();
    let top_power_zero = ideal.contains(&l.pi_pow(q_new));
    let below_top_nonzero = !ideal.contains(&l.pi_pow(q_new - 1));

    let tags = d * q_new;
    let width = l.dim() + tags;
    let mut dec = LinearSpace::zero(width);
    for r in ideal.basis() {
        let mut row = r.clone();
        row.extend(std::iter::repeat_n(Scalar::zero(), tags));
        dec.insert(row)?;
    }
    let mut independent = true;
    for e in 0..d {
        for k in 0..q_new {
            let mut row = l.diagonal_monomial(&Scalar::one(), e, k);
            row.extend(std::iter::repeat_n(Scalar::zero(), tags));
            row[l.dim() + e * q_new + k] = -Scalar::one();
            if !ext.contains(&row[..l.dim()]) {
                independent = false;
            }
            dec.insert(row)?;
        }
    }
    independent &= dec.pivots().iter().all(|&p| p < l.dim());
    let monomial_basis = independent && dim == tags;

    let flat = match line_module_of_quotient(&ext, &ideal, &l.pi(), q_new)? {
        Some(m) => flatness_over_line(&m).ok(),
        None => None,
    };

    Ok(RawQuotient {
        report: QuotientReport {
            dim,
            q_new,
            nondegeneracy,
            socle_pairing,
            transverse,
            top_power_zero,
            below_top_nonzero,
            monomial_basis,
            flat,
            dim_ext: ext.dim(),
            dim_ideal: ideal.dim(),
        },
        ext,
        decomposer: monomial_basis.then_some(dec),
    })
}

pub(crate) fn element_u(l: &Layout, p_new: &[usize], beta: &[BiPoly]) -> Result<Vec<Scalar>> {
    let comps: Vec<BiPoly> = beta
        .iter()
        .zip(p_new)
        .enumerate()
        .map(|(i, (b, &p))| b.rexdeg(l.xdeg).retrunc(l.trunc[i]).shift_t(p))
        .collect();
    l.from_components(&comps)
}

pub(crate) fn refuse(rep: &QuotientReport, u: impl FnOnce() -> String) -> Result<()> {
    if !is_unit_poly(&rep.socle_pairing) {
        return Err(Error::DegenerateExtension {
            value: rep.socle_pairing[0].clone(),
        });
    }
    if !rep.transverse {
        return Err(Error::StepNotTransverse(format!(
            "u = {} lies in I^2 + (pi)",
            u()
        )));
    }
    if !rep.certified() {
        return Err(Error::Contradiction(format!(
            "nondegenerate step failed its quotient certificates: {rep:?}"
        )));
    }
    Ok(())
}

/// Whether u generates I/(I² + (π)), where I is the ideal of functions
/// vanishing at t = 0 (the ideal of P for stars, of C for deformations).
/// Exact at the extension truncations because
/// t^{q_i + p_in} e_i = π·t^{q_i + p_in − 1} e_i.
pub(crate) fn transverse(ext: &Model, u: &[Scalar]) -> Result<bool> {
    let l = &ext.layout;
    let consts: Vec<usize> = (0..l.n())
        .flat_map(|i| (0..l.xdeg).map(move |e| (i, e)))
        .map(|(i, e)| l.index(i, e, 0))
        .collect();
    let m = ext.space.vanishing_on(&consts)?;
    let one = Scalar::one();
    let mut acc = LinearSpace::zero(l.dim());
    for e in 0..l.xdeg {
        acc.insert(l.diagonal_monomial(&one, e, 1))?;
    }
    let mb = m.basis();
    for a in 0..mb.len() {
        for b in a..mb.len() {
            acc.insert(l.mul(&mb[a], &mb[b]))?;
        }
    }
    for e in 0..l.xdeg {
        acc.insert(l.mul(&l.diagonal_monomial(&one, e, 0), u))?;
    }
    Ok(acc.dim() == m.dim() && m.contains(u))
}

pub(crate) fn germ_display(l: &Layout, v: &[Scalar]) -> String {
    let comps: Vec<String> = (0..l.n()).map(|i| l.component(v, i).to_string()).collect();
    format!("({})", comps.join(", "))
}

/// The action of `t` (multiplication by the given element) on
/// ext/ideal, in a basis of the quotient.
fn line_module_of_quotient(
    ext: &Model,
    ideal: &LinearSpace,
    t: &[Scalar],
    q: usize,
) -> Result<Option<LineModule>> {
    let l = &ext.layout;
    let comp = ext.space.complement_basis(ideal)?;
    let d = comp.len();
    let width = l.dim() + d;
    let mut dec = LinearSpace::zero(width);
    for r in ideal.basis() {
        let mut row = r.clone();
        row.extend(std::iter::repeat_n(Scalar::zero(), d));
        dec.insert(row)?;
    }
    for (k, c) in comp.iter().enumerate() {
        let mut row = c.clone();
        row.extend(std::iter::repeat_n(Scalar::zero(), d));
        row[l.dim() + k] = -Scalar::one();
        dec.insert(row)?;
    }
    let mut action = Vec::with_capacity(d);
    for c in &comp {
        let mut row = l.mul(t, c);
        row.extend(std::iter::repeat_n(Scalar::zero(), d));
        let r = dec.reduce(&row);
        if r[..l.dim()].iter().any(|x| !x.is_zero()) {
            return Ok(None);
        }
        action.push(r[l.dim()..].to_vec());
    }
    Ok(Some(LineModule { q, action }))
}

pub(crate) fn extend_raw(
    model: &Model,
    p_new: &[usize],
    beta: &[BiPoly],
    kind: Kind,
) -> Result<(Model, QuotientReport)> {
    let raw = analyze_raw(model, p_new, beta)?;
    let rep = &raw.report;
    let l = &raw.ext.layout;
    refuse(rep, || {
        germ_display(l, &element_u(l, p_new, beta).expect("shapes checked"))
    })?;
    let dec = raw
        .decomposer
        .as_ref()
        .expect("certified quotients decompose");
    let d = l.xdeg;
    let q_new = rep.q_new;
    let mut trunc = l.trunc.clone();
    trunc.push(q_new);
    let to = Layout::new(d, trunc)?;
    let mut vectors = Vec::with_capacity(raw.ext.dim());
    for b in raw.ext.basis() {
        let mut row = b.clone();
        row.extend(std::iter::repeat_n(Scalar::zero(), d * q_new));
        let r = dec.reduce(&row);
        let mut v = b.clone();
        v.extend(r[l.dim()..].iter().cloned());
        debug_assert_eq!(v.len(), to.dim());
        vectors.push(v);
    }
    Ok((Model::new(kind, to, vectors)?, raw.report))
}

pub(crate) fn is_unit_poly(v: &[Scalar]) -> bool {
    !v[0].is_zero()
}

/// Σ λ_i / β_i(P) for the (n−1)-star `s`.
pub fn nondegeneracy(s: &StarPresentation, step: &ExtensionStep) -> Result<Scalar> {
    let beta = step.bipolys();
    check_step(&s.model, &step.p_new, &beta)?;
    Ok(nondegeneracy_raw(&s.model, &beta)?.remove(0))
}

/// All certificates of the quotient, whether or not the step is degenerate.
pub fn analyze_quotient(s: &StarPresentation, step: &ExtensionStep) -> Result<QuotientReport> {
    Ok(analyze_raw(&s.model, &step.p_new, &step.bipolys())?.report)
}

pub fn quotient(s: &StarPresentation, step: &ExtensionStep) -> Result<QuotientReport> {
    let rep = analyze_quotient(s, step)?;
    refuse(&rep, || {
        step_element(s, step)
            .map(|g| g.to_string())
            .unwrap_or_default()
    })?;
    Ok(rep)
}

pub fn extend_star(s: &StarPresentation, step: &ExtensionStep) -> Result<StarPresentation> {
    let (m, _) = extend_raw(&s.model, &step.p_new, &step.bipolys(), Kind::Star)?;
    Ok(StarPresentation::from_model(m))
}

/// The element u of a step, at the extension truncations q_i + p_in.
pub fn step_element(s: &StarPresentation, step: &ExtensionStep) -> Result<MultiGerm> {
    let big: Vec<usize> = s.q().iter().zip(&step.p_new).map(|(q, p)| q + p).collect();
    let comps = step
        .beta
        .iter()
        .zip(&step.p_new)
        .zip(&big)
        .map(|((b, &p), &t)| b.retrunc(t).shift(p))
        .collect();
    Ok(MultiGerm::new(comps))
}

/// A finite-dimensional module over K[t]/(t^q): `action[r]` holds the
/// coordinates of t·e_r.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineModule {
    pub q: usize,
    pub action: Vec<Vec<Scalar>>,
}

impl LineModule {
    pub fn dim(&self) -> usize {
        self.action.len()
    }

    /// Images of the basis vectors under t^k.
    pub fn power(&self, k: usize) -> Vec<Vec<Scalar>> {
        let d = self.dim();
        let mut images: Vec<Vec<Scalar>> = (0..d)
            .map(|r| crate::kernel::linspace::unit(d, r))
            .collect();
        for _ in 0..k {
            images = images.iter().map(|v| self.apply(v)).collect();
        }
        images
    }

    /// t·v for a coordinate vector v.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        let d = self.dim();
        let mut out = vec![Scalar::zero(); d];
        for (c, row) in v.iter().zip(&self.action) {
            if c.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(row) {
                if !a.is_zero() {
                    *o += c * a;
                }
            }
        }
        out
    }

    fn image(&self, k: usize) -> Result<LinearSpace> {
        LinearSpace::span(self.dim(), self.power(k))
    }

    fn kernel_of_power(&self, k: usize) -> Result<LinearSpace> {
        let images = self.power(k);
        let d = self.dim();
        // c with Σ c_r images_r = 0: one equation per output coordinate
        let eqs: Vec<Vec<Scalar>> = (0..d)
            .map(|s| images.iter().map(|img| img[s].clone()).collect())
            .collect();
        kernel(&eqs, d)
    }
}

/// Free (hence flat) over K[t]/(t^q) iff ker t^k = im t^{q−k} for
/// 1 ≤ k < q.
pub fn flatness_over_line(m: &LineModule) -> Result<bool> {
    if m.q == 0 {
        return Err(Error::Usage("q must be positive".into()));
    }
    if m.action.iter().any(|r| r.len() != m.dim()) {
        return Err(Error::Usage("the action matrix must be square".into()));
    }
    if m.power(m.q).iter().flatten().any(|c| !c.is_zero()) {
        return Err(Error::Usage(format!("t^{} does not act as zero", m.q)));
    }
    for k in 1..m.q {
        if m.kernel_of_power(k)? != m.image(m.q - k)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Where a tower starts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StarBase {
    Pair { p: usize },
    Lines { c: Vec<Scalar> },
}

impl StarBase {
    pub fn build(&self) -> Result<StarPresentation> {
        match self {
            StarBase::Pair { p } => star::congruence_pair(*p),
            StarBase::Lines { c } => star::lines(c),
        }
    }
}

/// A base star plus the steps that extend it; the reproducible form of a
/// tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerScript {
    pub base: StarBase,
    pub steps: Vec<ExtensionStep>,
}

impl TowerScript {
    pub fn build(&self) -> Result<StarPresentation> {
        let mut s = self.base.build()?;
        for step in &self.steps {
            s = extend_star(&s, step)?;
        }
        Ok(s)
    }

    /// Every intermediate star, base first.
    pub fn build_all(&self) -> Result<Vec<StarPresentation>> {
        let mut out = vec![self.base.build()?];
        for step in &self.steps {
            let next = extend_star(out.last().expect("nonempty"), step)?;
            out.push(next);
        }
        Ok(out)
    }
}

/// Tallies from the step sampler.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SamplerStats {
    pub attempts: usize,
    pub degenerate: usize,
    pub rejected: usize,
}

const STEP_BUDGET: usize = 400;

fn small_int<R: Rng>(rng: &mut R, bound: i64) -> Scalar {
    int(rng.gen_range(-bound..=bound))
}

fn small_unit<R: Rng>(rng: &mut R) -> Scalar {
    let v = rng.gen_range(1..=3);
    int(if rng.gen_bool(0.5) { v } else { -v })
}

/// Orders p_in = q_n − q_i putting every old component at the new level
/// q_n, when such integers exist.
fn balanced_orders(model: &Model) -> Option<Vec<usize>> {
    let q = model.q();
    let total: usize = q.iter().sum();
    let n = q.len();
    if !total.is_multiple_of(n - 1) {
        return None;
    }
    let q_new = total / (n - 1);
    q.iter()
        .map(|&qi| (q_new > qi).then(|| q_new - qi))
        .collect()
}

fn on_degeneracy_locus(lambda: &[Scalar], c: &[Scalar]) -> bool {
    c.iter().all(|x| !x.is_zero())
        && lambda
            .iter()
            .zip(c)
            .map(|(l, x)| l / x)
            .sum::<Scalar>()
            .is_zero()
}

/// Whether `degenerate_constants` can succeed at all.
fn has_rational_degenerate_point(lambda: &[Scalar], reachable: &LinearSpace) -> bool {
    let n = lambda.len();
    let one = vec![Scalar::one(); n];
    (0..n).any(|m| !lambda[m].is_zero() && reachable.contains(&unit(n, m)))
        || (reachable.contains(&one) && on_degeneracy_locus(lambda, &one))
}

/// Units c_i in `reachable` with Σ λ_i/c_i = 0, or `None` when none was
/// found. A slot whose unit vector is reachable is solved for directly;
/// otherwise the diagonal is tried, and with three slots the chord through
/// it in a random reachable direction gives a second point.
fn degenerate_constants<R: Rng>(
    rng: &mut R,
    lambda: &[Scalar],
    reachable: &LinearSpace,
) -> Option<Vec<Scalar>> {
    let n = lambda.len();
    let random_point = |rng: &mut R| {
        let coeffs: Vec<Scalar> = (0..reachable.dim()).map(|_| small_int(rng, 3)).collect();
        reachable.combine(&coeffs)
    };
    let free: Vec<usize> = (0..n)
        .filter(|&m| !lambda[m].is_zero() && reachable.contains(&unit(n, m)))
        .collect();
    if !free.is_empty() {
        let m = free[rng.gen_range(0..free.len())];
        let mut c = random_point(rng);
        let mut rest = Scalar::zero();
        for k in (0..n).filter(|&k| k != m) {
            if c[k].is_zero() {
                return None;
            }
            rest += &lambda[k] / &c[k];
        }
        if rest.is_zero() {
            return None;
        }
        c[m] = -(&lambda[m] / &rest);
        return Some(c);
    }
    let one = vec![Scalar::one(); n];
    if !reachable.contains(&one) || !on_degeneracy_locus(lambda, &one) {
        return None;
    }
    let scale = small_unit(rng);
    if n != 3 || rng.gen_bool(0.5) {
        return Some(one.iter().map(|c| c * &scale).collect());
    }
    let dir = random_point(rng);
    // Σ λ_i/(1 + s d_i) = 0 clears to s·(a + s·b) = 0
    let a: Scalar = (0..n)
        .map(|i| {
            let others: Scalar = (0..n).filter(|&k| k != i).map(|k| dir[k].clone()).sum();
            &lambda[i] * others
        })
        .sum();
    let b: Scalar = (0..n)
        .map(|i| {
            let others: Scalar = (0..n).filter(|&k| k != i).map(|k| dir[k].clone()).product();
            &lambda[i] * others
        })
        .sum();
    if b.is_zero() {
        return None;
    }
    let s0 = -(a / b);
    let c: Vec<Scalar> = dir
        .iter()
        .map(|d| (Scalar::one() + &s0 * d) * &scale)
        .collect();
    on_degeneracy_locus(lambda, &c).then_some(c)
}

/// Draws one step for `model`. With `degenerate`, the orders are balanced
/// and the constants β_i(P) are prescribed on the locus Σ λ_i/β_i(P) = 0;
/// such steps need not be transverse (u = π is the basic example).
pub(crate) fn sample_raw<R: Rng>(
    model: &Model,
    rng: &mut R,
    p_max: usize,
    degenerate: bool,
    stats: &mut SamplerStats,
) -> Result<(Vec<usize>, Vec<BiPoly>)> {
    let n = model.n();
    let d = model.layout.xdeg;
    let lambda = model.lambda()?;
    let balanced = if degenerate {
        Some(balanced_orders(model).ok_or_else(|| {
            Error::Usage(format!("no balanced orders over levels {:?}", model.q()))
        })?)
    } else {
        None
    };
    while stats.attempts < STEP_BUDGET {
        stats.attempts += 1;
        let p: Vec<usize> = match &balanced {
            Some(p) => p.clone(),
            None => (0..n).map(|_| rng.gen_range(1..=p_max)).collect(),
        };
        let big: Vec<usize> = model.q().iter().zip(&p).map(|(q, p)| q + p).collect();
        let ext = model.lift(big)?;
        let l = &ext.layout;
        let mut pinned = Vec::new();
        for m in 0..n {
            let q = model.q()[m];
            pinned.extend(l.low_coords(m, p[m].min(q)));
            if p[m] < q {
                pinned.extend((1..d).map(|e| l.index(m, e, p[m])));
            }
        }
        let w_space = ext.space.vanishing_on(&pinned)?;
        let coeffs: Vec<Scalar> = (0..w_space.dim()).map(|_| small_int(rng, 3)).collect();
        let mut w = w_space.combine(&coeffs);
        let constants = if degenerate {
            let slots: Vec<usize> = (0..n)
                .filter(|&m| p[m] < model.q()[m])
                .map(|m| l.index(m, 0, p[m]))
                .collect();
            let gens: Vec<Vec<Scalar>> = w_space
                .basis()
                .iter()
                .map(|r| slots.iter().map(|&k| r[k].clone()).collect())
                .collect();
            // the constants β_m(P) that some element of W can carry
            let mut reachable = LinearSpace::zero(n);
            for r in w_space.basis() {
                let v: Vec<Scalar> = (0..n)
                    .map(|m| {
                        if p[m] < model.q()[m] {
                            r[l.index(m, 0, p[m])].clone()
                        } else {
                            Scalar::zero()
                        }
                    })
                    .collect();
                reachable.insert(v)?;
            }
            for m in (0..n).filter(|&m| p[m] >= model.q()[m]) {
                reachable.insert(unit(n, m))?;
            }
            if !has_rational_degenerate_point(&lambda, &reachable) {
                break;
            }
            let Some(c) = degenerate_constants(rng, &lambda, &reachable) else {
                stats.rejected += 1;
                continue;
            };
            // move w inside W so that its t^{p_m} coefficients are c_m
            let residual: Vec<Scalar> = (0..n)
                .filter(|&m| p[m] < model.q()[m])
                .zip(&slots)
                .map(|(m, &k)| &c[m] - &w[k])
                .collect();
            let Some(delta) = solve(&gens, &residual) else {
                stats.rejected += 1;
                continue;
            };
            for (x, y) in w.iter_mut().zip(w_space.combine(&delta)) {
                *x += y;
            }
            Some(c)
        } else {
            None
        };
        let mut beta = Vec::with_capacity(n);
        let mut ok = true;
        for m in 0..n {
            let q = model.q()[m];
            if p[m] < q {
                let c = l.component(&w, m);
                let mut b = BiPoly::zero(d, q);
                for e in 0..d {
                    for k in 0..q {
                        b.set(e, k, c.coeff(e, k + p[m]).clone());
                    }
                }
                if !b.is_unit() {
                    ok = false;
                    break;
                }
                beta.push(b);
            } else {
                let mut b = BiPoly::zero(d, q);
                let c0 = match &constants {
                    Some(c) => c[m].clone(),
                    None => small_unit(rng),
                };
                b.set(0, 0, c0);
                for e in 0..d {
                    for k in 1..q {
                        b.set(e, k, small_int(rng, 2));
                    }
                }
                beta.push(b);
            }
        }
        if !ok {
            stats.rejected += 1;
            continue;
        }
        let value = socle_raw(model, &p, &beta)?;
        if degenerate != !is_unit_poly(&value) {
            stats.degenerate += 1;
            continue;
        }
        let u = element_u(l, &p, &beta)?;
        if !ext.contains(&u) || (!degenerate && !transverse(&ext, &u)?) {
            stats.rejected += 1;
            continue;
        }
        return Ok((p, beta));
    }
    Err(Error::GenerationFailed {
        attempts: stats.attempts,
        degenerate: stats.degenerate,
        rejected: stats.rejected,
    })
}

fn to_step(p: Vec<usize>, beta: Vec<BiPoly>) -> ExtensionStep {
    ExtensionStep {
        p_new: p,
        beta: beta.iter().map(BiPoly::x_free_part).collect(),
    }
}

/// A nondegenerate step with orders p_in ≤ p_max whose element u lies in
/// the algebra.
pub fn random_step<R: Rng>(
    s: &StarPresentation,
    rng: &mut R,
    p_max: usize,
) -> Result<ExtensionStep> {
    let mut stats = SamplerStats::default();
    let (p, beta) = sample_raw(&s.model, rng, p_max, false, &mut stats)?;
    Ok(to_step(p, beta))
}

/// A step on the degeneracy hyperplane Σ λ_i/β_i(P) = 0, with the
/// balanced orders p_in = q_n − q_i (so the p_max bound does not apply).
pub fn degenerate_step<R: Rng>(s: &StarPresentation, rng: &mut R) -> Result<ExtensionStep> {
    let mut stats = SamplerStats::default();
    let (p, beta) = sample_raw(&s.model, rng, 1, true, &mut stats)?;
    Ok(to_step(p, beta))
}

/// The script of a random tower with exactly `n_max` components, starting
/// from a congruence pair star.
pub fn random_tower_script(seed: u64, n_max: usize, p_max: usize) -> Result<TowerScript> {
    if n_max < 2 || p_max == 0 {
        return Err(Error::Usage("need n_max >= 2 and p_max >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = StarBase::Pair {
        p: rng.gen_range(1..=p_max),
    };
    let mut s = base.build()?;
    let mut steps = Vec::new();
    while s.n() < n_max {
        let step = random_step(&s, &mut rng, p_max)?;
        s = extend_star(&s, &step)?;
        steps.push(step);
    }
    Ok(TowerScript { base, steps })
}

pub fn random_tower(seed: u64, n_max: usize, p_max: usize) -> Result<StarPresentation> {
    random_tower_script(seed, n_max, p_max)?.build()
}

#[cfg(test)]
mod tests;
