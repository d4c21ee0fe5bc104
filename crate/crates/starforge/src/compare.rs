//! Inclusions between star algebras with the same components, the tensor
//! obstruction to flatness of a strict inclusion, and filtrations of
//! ideals by cyclic pieces.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{Check, SpectrumMatrix};
use crate::kernel::{LinearSpace, MultiGerm, Scalar, TruncSeries};
use crate::model::{Kind, Layout, Model, Vector};
use crate::star::{germ_of, StarPresentation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Identical,
    FirstInSecond,
    SecondInFirst,
    Incomparable,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub verdict: Verdict,
    pub spectra: [SpectrumMatrix; 2],
    pub first_in_second: bool,
    pub second_in_first: bool,
    pub equal_spectra: bool,
    /// (i, j) with the smaller algebra's p_ij strictly above the larger's,
    /// when the inclusion is strict.
    pub witness: Option<(usize, usize)>,
    pub checks: Vec<Check>,
}

impl ComparisonReport {
    /// The strictly smaller algebra and the larger one, as indices into
    /// the compared pair.
    pub fn strict_pair(&self) -> Option<(usize, usize)> {
        match self.verdict {
            Verdict::FirstInSecond => Some((0, 1)),
            Verdict::SecondInFirst => Some((1, 0)),
            _ => None,
        }
    }
}

/// Whether every element of `sub` lies in `sup`. The algebra of a
/// presentation is the preimage of its image, so it is enough to test the
/// lifted basis and the padding t^k e_i up to the larger truncation.
pub fn includes(sub: &StarPresentation, sup: &StarPresentation) -> Result<bool> {
    if sub.n() != sup.n() {
        return Err(Error::Usage(format!(
            "cannot compare a {}-star with a {}-star",
            sub.n(),
            sup.n()
        )));
    }
    let top: Vec<usize> = sub
        .q()
        .iter()
        .zip(sup.q())
        .map(|(a, b)| *a.max(b))
        .collect();
    let lifted = sub.model.lift(top)?;
    let to = &sup.model.layout;
    Ok(lifted
        .basis()
        .iter()
        .all(|b| sup.model.contains(&lifted.layout.retrunc(b, to))))
}

pub fn compare_stars(a: &StarPresentation, b: &StarPresentation) -> Result<ComparisonReport> {
    let first_in_second = includes(a, b)?;
    let second_in_first = includes(b, a)?;
    let pa = a.spectrum()?;
    let pb = b.spectrum()?;
    let equal_spectra = pa == pb;
    let verdict = match (first_in_second, second_in_first) {
        (true, true) => Verdict::Identical,
        (true, false) => Verdict::FirstInSecond,
        (false, true) => Verdict::SecondInFirst,
        (false, false) => Verdict::Incomparable,
    };
    let n = a.n();
    let pairs = || (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    let mut checks = Vec::new();
    let mut witness = None;
    if let Some((small, large)) = match verdict {
        Verdict::FirstInSecond => Some((&pa, &pb)),
        Verdict::SecondInFirst => Some((&pb, &pa)),
        Verdict::Identical => Some((&pa, &pb)),
        Verdict::Incomparable => None,
    } {
        let below = pairs().find(|&(i, j)| small.get(i, j) < large.get(i, j));
        checks.push(Check::from_option(
            "spectrum dominance",
            below.map(|(i, j)| {
                format!(
                    "p_{}{} = {} in the smaller algebra but {} in the larger",
                    i + 1,
                    j + 1,
                    small.get(i, j),
                    large.get(i, j)
                )
            }),
        ));
        if verdict != Verdict::Identical {
            witness = pairs().find(|&(i, j)| small.get(i, j) > large.get(i, j));
            checks.push(if witness.is_some() {
                Check::pass("strict spectrum gap")
            } else {
                Check::fail("strict spectrum gap", "strict inclusion with equal spectra")
            });
        }
    }
    let equal_spans = equal_spectra && a.model.space == b.model.space;
    checks.push(if equal_spans == (verdict == Verdict::Identical) {
        Check::pass("identical iff equal spectra and spans")
    } else {
        Check::fail(
            "identical iff equal spectra and spans",
            format!("verdict {verdict:?}, equal spectra and spans: {equal_spans}"),
        )
    });
    Ok(ComparisonReport {
        verdict,
        spectra: [pa, pb],
        first_in_second,
        second_in_first,
        equal_spectra,
        witness,
        checks,
    })
}

/// u ⊗ v ≠ 0 in (u) ⊗_{sub} sup although uv = 0.
#[derive(Clone, Debug, Serialize)]
pub struct NonflatnessWitness {
    /// The component k with q_k(sup) < q_k(sub).
    pub component: usize,
    /// Generator of the ideal of S_k in the smaller algebra.
    pub u: MultiGerm,
    /// (0, …, t^{q_k(sup)}, …, 0) in the larger algebra.
    pub v: MultiGerm,
    pub uv_zero: bool,
    /// The bilinear form (λu, w) ↦ λ_k w_k mod t^{q_k(sub)} needs every
    /// element of the smaller algebra vanishing off component k to vanish
    /// mod t^{q_k(sub)} there; equivalently that ideal is zero in the
    /// presentation.
    pub form_well_defined: bool,
    /// φ(u ⊗ v) = t^{q_k(sup)} mod t^{q_k(sub)}.
    pub phi: TruncSeries,
}

impl NonflatnessWitness {
    pub fn certified(&self) -> bool {
        self.uv_zero && self.form_well_defined && !self.phi.is_zero()
    }
}

pub fn nonflatness_witness(
    sub: &StarPresentation,
    sup: &StarPresentation,
) -> Result<NonflatnessWitness> {
    let rep = compare_stars(sub, sup)?;
    if rep.verdict != Verdict::FirstInSecond {
        return Err(Error::NotApplicable(format!(
            "the first star is not strictly included in the second (verdict {:?})",
            rep.verdict
        )));
    }
    let k = (0..sub.n())
        .find(|&k| sup.q()[k] < sub.q()[k])
        .ok_or_else(|| Error::NotApplicable("no component with a level gap".into()))?;
    let ideal = sub.substar_ideal(&[k])?;
    let u = ideal.generator;
    let q_sup = sup.q()[k];
    let q_sub = sub.q()[k];
    let mut v_comps: Vec<TruncSeries> = u
        .components
        .iter()
        .map(|c| TruncSeries::zero(c.trunc()))
        .collect();
    v_comps[k] = TruncSeries::monomial(Scalar::one(), q_sup, u.components[k].trunc());
    let v = MultiGerm::new(v_comps);
    let uv_zero = u.mul(&v)?.is_zero();
    let others: Vec<usize> = (0..sub.n()).filter(|&j| j != k).collect();
    let form_well_defined = sub.model.vanishing_ideal(&others)?.dim() == 0;
    let phi = TruncSeries::monomial(Scalar::one(), q_sup, q_sub);
    Ok(NonflatnessWitness {
        component: k,
        u,
        v,
        uv_zero,
        form_well_defined,
        phi,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FiltrationStep {
    pub component: usize,
    /// Minimal t-valuation on the component among elements of I_i.
    pub level: usize,
    /// An element of I_i with that valuation on the component and zero on
    /// the components already peeled.
    pub generator: MultiGerm,
    /// I_i = (u) + I_{i+1}.
    pub cyclic: bool,
    /// I_{S_j}·I_i ⊆ I_{i+1}.
    pub annihilated: bool,
    /// I_i ⊄ I_{S_j}.
    pub not_contained: bool,
    /// dim I_i/I_{i+1}, equal to T_j − level at working truncation T.
    pub quotient_dim: usize,
}

impl FiltrationStep {
    pub fn certified(&self) -> bool {
        self.cyclic && self.annihilated && self.not_contained
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiltrationReport {
    /// Components in the order they were examined.
    pub order: Vec<usize>,
    /// Working truncations: I contains t^{T_i} e_i whenever it is nonzero
    /// on component i.
    pub truncations: Vec<usize>,
    pub steps: Vec<FiltrationStep>,
    /// Σ span{u_k·b} equals the ideal.
    pub reassembles: bool,
}

impl FiltrationReport {
    pub fn certified(&self) -> bool {
        self.reassembles && self.steps.iter().all(FiltrationStep::certified)
    }

    /// (component, level) pairs.
    pub fn levels(&self) -> Vec<(usize, usize)> {
        self.steps.iter().map(|s| (s.component, s.level)).collect()
    }
}

/// Filtration I = I_1 ⊋ I_2 ⊋ … with cyclic quotients I_i/I_{i+1} ≅ O_{S_j},
/// peeling components in ascending order.
pub fn ideal_filtration(s: &StarPresentation, gens: &[MultiGerm]) -> Result<FiltrationReport> {
    let n = s.n();
    let q = s.q();
    if gens.iter().any(|g| g.n() != n) {
        return Err(Error::Usage(format!("generators must have {n} components")));
    }
    if gens
        .iter()
        .any(|g| g.components.iter().any(|c| !c.coeff(0).is_zero()))
    {
        return Err(Error::NotAProperIdeal);
    }
    for (k, g) in gens.iter().enumerate() {
        if !s.membership(g)? {
            return Err(Error::Usage(format!(
                "generator {} is not in the algebra",
                k + 1
            )));
        }
    }
    // g·t^{q_i} e_i ∈ I, so I ⊇ t^{q_i + v_i} e_i with v_i the least
    // valuation of a generator on component i; one more unit keeps that
    // bottom piece visible
    let truncations: Vec<usize> = (0..n)
        .map(|i| {
            gens.iter()
                .filter_map(|g| g.components[i].valuation())
                .min()
                .map_or(q[i], |v| q[i] + v + 1)
        })
        .collect();
    let ext = s.model.lift(truncations.clone())?;
    let l = ext.layout.clone();
    let vectors: Vec<Vector> = gens
        .iter()
        .map(|g| l.from_series(&g.retrunc(&truncations).components))
        .collect::<Result<_>>()?;
    let ideal = ext.ideal_span(&vectors)?;

    let mut current = ideal.clone();
    let mut steps = Vec::new();
    let mut reassembled = LinearSpace::zero(l.dim());
    let order: Vec<usize> = (0..n).collect();
    for &j in &order {
        let Some((level, u)) = least_valuation(&l, &current, j) else {
            continue;
        };
        let next = current.intersect(&ext.vanishing_ideal(&[j])?)?;
        let principal = ext.ideal_span(std::slice::from_ref(&u))?;
        let cyclic = principal.sum(&next)? == current && principal.is_subspace_of(&current);
        let vanishing = ext.vanishing_ideal(&[j])?;
        let annihilated = products_within(&l, &vanishing, &current, &next)?;
        let not_contained = !current.is_subspace_of(&vanishing);
        reassembled = reassembled.sum(&principal)?;
        steps.push(FiltrationStep {
            component: j,
            level,
            generator: germ_of(&l, &u),
            cyclic,
            annihilated,
            not_contained,
            quotient_dim: current.dim() - next.dim(),
        });
        current = next;
    }
    if current.dim() != 0 {
        return Err(Error::Contradiction(format!(
            "{} dimensions of the ideal survive every component",
            current.dim()
        )));
    }
    Ok(FiltrationReport {
        order,
        truncations,
        steps,
        reassembles: reassembled == ideal,
    })
}

/// The least valuation on component j among elements of `space`, with an
/// element attaining it.
fn least_valuation(l: &Layout, space: &LinearSpace, j: usize) -> Option<(usize, Vector)> {
    space
        .basis()
        .iter()
        .filter_map(|b| l.valuation(b, j).map(|v| (v, b)))
        .min_by_key(|(v, _)| *v)
        .map(|(v, b)| (v, b.clone()))
}

fn products_within(
    l: &Layout,
    left: &LinearSpace,
    right: &LinearSpace,
    target: &LinearSpace,
) -> Result<bool> {
    for a in left.basis() {
        for b in right.basis() {
            if !target.contains(&l.mul(a, b)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The subalgebra K[[π, π·w]] of `s` for w in the maximal ideal. It is
/// generated by two elements, so it is again oblate, and when w attains
/// every p_ij it raises each of them by one. For planar curves y = φ_i(x)
/// and w = y this is the star of the curves y = x·φ_i(x).
pub fn shrink(s: &StarPresentation, w: &MultiGerm) -> Result<StarPresentation> {
    let n = s.n();
    if !s.membership(w)? {
        return Err(Error::Usage("w is not in the algebra".into()));
    }
    if w.components.iter().any(|c| !c.coeff(0).is_zero()) {
        return Err(Error::Usage("w must vanish at P".into()));
    }
    // every order rises by at most one when w attains it
    let room: Vec<usize> = s.q().iter().map(|q| q + n).collect();
    let l = Layout::new(1, room.clone())?;
    let pi = l.pi();
    let pw = l.mul(&pi, &l.from_series(&w.retrunc(&room).components)?);
    let top = *room.iter().max().expect("n >= 2");
    let mut span = LinearSpace::zero(l.dim());
    let mut pi_a = l.one();
    for a in 0..top {
        let mut mono = pi_a.clone();
        for _ in 0..top - a {
            span.insert(mono.clone())?;
            mono = l.mul(&mono, &pw);
        }
        pi_a = l.mul(&pi_a, &pi);
    }
    let wide = Model::new(Kind::Star, l.clone(), span.basis().to_vec())?;
    let levels: Vec<usize> = wide.spectrum().iter().map(|row| row.iter().sum()).collect();
    if levels.iter().zip(&room).any(|(q, t)| q >= t) {
        return Err(Error::Usage(
            "w does not attain the orders p_ij; the subalgebra leaves the window".into(),
        ));
    }
    let to = Layout::new(1, levels)?;
    let narrow: Vec<Vector> = wide.basis().iter().map(|v| l.retrunc(v, &to)).collect();
    let star = StarPresentation::from_model(Model::new(Kind::Star, to, narrow)?);
    let report = star.validate();
    if !report.is_valid() {
        return Err(Error::Contradiction(format!(
            "K[[pi, pi w]] is not a star: {}",
            report
                .failures()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }
    Ok(star)
}

/// A random element of the maximal ideal of `s` with small integer
/// coordinates in a basis; it may be zero.
pub fn random_maximal_ideal_element<R: rand::Rng>(
    s: &StarPresentation,
    rng: &mut R,
) -> Result<MultiGerm> {
    let l = &s.model.layout;
    let consts: Vec<usize> = (0..s.n()).map(|i| l.index(i, 0, 0)).collect();
    let m = s.model.space.vanishing_on(&consts)?;
    let c: Vec<Scalar> = (0..m.dim())
        .map(|_| crate::kernel::int(rng.gen_range(-3..=3)))
        .collect();
    Ok(germ_of(l, &m.combine(&c)))
}

/// A random w in the maximal ideal of `s` with small integer coordinates
/// in the basis, redrawn until it attains every p_ij.
pub fn random_transverse_element<R: rand::Rng>(
    s: &StarPresentation,
    rng: &mut R,
) -> Result<MultiGerm> {
    let l = &s.model.layout;
    let consts: Vec<usize> = (0..s.n()).map(|i| l.index(i, 0, 0)).collect();
    let m = s.model.space.vanishing_on(&consts)?;
    let p = s.spectrum()?;
    for _ in 0..100 {
        let c: Vec<Scalar> = (0..m.dim())
            .map(|_| crate::kernel::int(rng.gen_range(-3..=3)))
            .collect();
        let w = m.combine(&c);
        let attains = (0..s.n())
            .flat_map(|i| (i + 1..s.n()).map(move |j| (i, j)))
            .all(|(i, j)| l.agreement_order(&w, i, j) == p.get(i, j));
        if attains {
            return Ok(germ_of(l, &w));
        }
    }
    Err(Error::GenerationFailed {
        attempts: 100,
        degenerate: 0,
        rejected: 100,
    })
}
