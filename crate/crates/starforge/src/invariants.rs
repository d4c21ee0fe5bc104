//! Invariants shared by stars and deformations: validation reports, the
//! spectrum, unit constants, sub-component ideals and connector maps.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::kernel::scalar::display_scalar;
use crate::kernel::{BiPoly, LinearSpace, Scalar};
use crate::model::{divide_component, Model, Vector};

/// One named pass/fail entry with an optional witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: true,
            witness: None,
        }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: false,
            witness: Some(witness.into()),
        }
    }

    pub fn from_option(name: impl Into<String>, witness: Option<String>) -> Self {
        match witness {
            None => Check::pass(name),
            Some(w) => Check::fail(name, w),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "ok  " } else { "FAIL" };
        write!(f, "[{mark}] {}", self.name)?;
        if let Some(w) = &self.witness {
            write!(f, ": {w}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    /// dim_K of the image algebra, measured rather than asserted.
    pub dim: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// The symmetric matrix of contact orders p_ij (indices are 0-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct SpectrumMatrix(pub Vec<Vec<usize>>);

impl SpectrumMatrix {
    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.0[i][j]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.0
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.0.iter().map(|r| r.iter().sum()).collect()
    }

    /// Symmetric with zero diagonal and positive off-diagonal entries.
    pub fn shape_violation(&self) -> Option<(usize, usize)> {
        let n = self.n();
        for i in 0..n {
            if self.0[i][i] != 0 {
                return Some((i, i));
            }
            for j in 0..n {
                if i != j && (self.0[i][j] == 0 || self.0[i][j] != self.0[j][i]) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// A triple of distinct indices with p_ij < p_jk but p_ik ≠ p_ij.
    pub fn ultrametric_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let p = &self.0;
                    if p[i][j] < p[j][k] && p[i][k] != p[i][j] {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// First index whose level differs from its row sum.
    pub fn consistency_violation(&self, q: &[usize]) -> Option<usize> {
        self.row_sums().iter().zip(q).position(|(s, qi)| s != qi)
    }

    /// The restriction to the listed components.
    pub fn restrict(&self, comps: &[usize]) -> SpectrumMatrix {
        SpectrumMatrix(
            comps
                .iter()
                .map(|&i| comps.iter().map(|&j| self.0[i][j]).collect())
                .collect(),
        )
    }

    /// Σ_{i<j} p_ij.
    pub fn upper_sum(&self) -> usize {
        let n = self.n();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.0[i][j])
            .sum()
    }
}

impl fmt::Display for SpectrumMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .0
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Table of b_ij^(m) (0-based indices), with b_ij^(i) = 0 and b_ij^(j) = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitConstantTable {
    n: usize,
    entries: Vec<Scalar>,
}

impl UnitConstantTable {
    pub(crate) fn new(n: usize) -> Self {
        UnitConstantTable {
            n,
            entries: vec![Scalar::zero(); n * n * n],
        }
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, m: usize, v: Scalar) {
        self.entries[(i * self.n + j) * self.n + m] = v;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, m: usize) -> &Scalar {
        &self.entries[(i * self.n + j) * self.n + m]
    }

    /// Every violated instance of the three laws and, when λ is given, of the
    /// product law λ_i/λ_j = −∏_{m≠i,j} b_mi^(j). Indices in the messages are
    /// 1-based.
    pub fn violations(&self, lambda: Option<&[Scalar]>) -> Vec<String> {
        let n = self.n;
        let b = |i, j, m| self.get(i, j, m);
        let mut out = Vec::new();
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                for k in (0..n).filter(|&k| k != i) {
                    for m in 0..n {
                        for q in 0..n {
                            if b(i, k, m) * b(i, j, q) != b(i, k, q) * b(i, j, m) {
                                out.push(format!(
                                    "b_{0}{2}^({3}) b_{0}{1}^({4}) != b_{0}{2}^({4}) b_{0}{1}^({3})",
                                    i + 1,
                                    j + 1,
                                    k + 1,
                                    m + 1,
                                    q + 1
                                ));
                            }
                        }
                    }
                }
                for m in (0..n).filter(|&m| m != i) {
                    if !(b(i, j, m) * b(i, m, j)).is_one() {
                        out.push(format!(
                            "b_{0}{1}^({2}) b_{0}{2}^({1}) != 1",
                            i + 1,
                            j + 1,
                            m + 1
                        ));
                    }
                }
                for k in (0..n).filter(|&k| k != i && k != j) {
                    if *b(k, i, j) != -(b(i, k, j) * b(j, i, k)) {
                        out.push(format!(
                            "b_{2}{0}^({1}) != -b_{0}{2}^({1}) b_{1}{0}^({2})",
                            i + 1,
                            j + 1,
                            k + 1
                        ));
                    }
                }
                if let Some(l) = lambda {
                    let mut prod = -Scalar::one();
                    for m in (0..n).filter(|&m| m != i && m != j) {
                        prod *= b(m, i, j);
                    }
                    if &l[i] / &l[j] != prod {
                        out.push(format!(
                            "lambda_{0}/lambda_{1} = {2} but -prod b_m{0}^({1}) = {3}",
                            i + 1,
                            j + 1,
                            display_scalar(&(&l[i] / &l[j])),
                            display_scalar(&prod)
                        ));
                    }
                }
            }
        }
        out
    }
}

pub(crate) fn validate(model: &Model) -> ValidationReport {
    let c = model.checks();
    let l = &model.layout;
    let mut checks = Vec::new();
    checks.push(Check::from_option(
        "multiplicatively closed",
        c.closure.map(|(a, b)| {
            format!(
                "product of basis elements {} and {} leaves the span: {:?}",
                a + 1,
                b + 1,
                l.mul(&model.basis()[a], &model.basis()[b])
                    .iter()
                    .map(display_scalar)
                    .collect::<Vec<_>>()
            )
        }),
    ));
    checks.push(Check::from_option(
        "contains one",
        (!c.has_one).then(|| "(1,...,1) is not in the span".to_string()),
    ));
    checks.push(Check::from_option(
        "contains pi",
        (!c.has_pi).then(|| "(t,...,t) is not in the span".to_string()),
    ));
    if l.xdeg > 1 {
        checks.push(Check::from_option(
            "stable under x",
            c.x_stable
                .map(|k| format!("x times basis element {} leaves the span", k + 1)),
        ));
    }
    checks.push(Check::from_option(
        "coordinates agree at t=0",
        c.agreement
            .map(|k| format!("basis element {} has differing constant terms", k + 1)),
    ));
    let p = SpectrumMatrix(model.spectrum());
    checks.push(Check::from_option(
        "spectrum shape",
        p.shape_violation()
            .map(|(i, j)| format!("entry ({},{}) of {p}", i + 1, j + 1)),
    ));
    checks.push(Check::from_option(
        "consistency q_i = sum_j p_ij",
        p.consistency_violation(model.q()).map(|i| {
            format!(
                "row {}: q = {} but the row sums to {}",
                i + 1,
                model.q()[i],
                p.row_sums()[i]
            )
        }),
    ));
    checks.push(Check::from_option(
        "ultrametric law",
        p.ultrametric_violation().map(|(i, j, k)| {
            format!(
                "p_{0}{1} = {3} < p_{1}{2} = {4} but p_{0}{2} = {5}",
                i + 1,
                j + 1,
                k + 1,
                p.get(i, j),
                p.get(j, k),
                p.get(i, k)
            )
        }),
    ));
    let qmax = model.q().iter().copied().max().unwrap_or(0);
    let count = model.q().iter().filter(|&&q| q == qmax).count();
    checks.push(Check::from_option(
        "maximal level attained twice",
        (count < 2).then(|| format!("q = {:?} attains its maximum {qmax} once", model.q())),
    ));
    ValidationReport {
        checks,
        dim: model.dim(),
    }
}

/// A pair generator at headroom 1 with its unit row.
#[derive(Clone, Debug)]
pub(crate) struct RawPairGenerator {
    pub element: Vector,
    pub units: Vec<Option<BiPoly>>,
    pub constants: Vec<Scalar>,
}

/// `head` is the algebra at headroom 1, `p` the spectrum of the algebra.
pub(crate) fn pair_generator(
    head: &Model,
    p: &SpectrumMatrix,
    i: usize,
    j: usize,
) -> Result<RawPairGenerator> {
    let n = head.n();
    if i == j || i >= n || j >= n {
        return Err(crate::Error::Usage(format!(
            "pair generator needs two distinct components below {n}"
        )));
    }
    let element = head.element_with(i, j, p.get(i, j))?;
    let l = &head.layout;
    let mut units = Vec::with_capacity(n);
    let mut constants = Vec::with_capacity(n);
    for m in 0..n {
        if m == i {
            units.push(None);
            constants.push(Scalar::zero());
            continue;
        }
        let beta = divide_component(l, &element, m, p.get(i, m)).ok_or_else(|| {
            head.invalid(format!(
                "component {} of v_{}{} is not divisible by t^{}",
                m + 1,
                i + 1,
                j + 1,
                p.get(i, m)
            ))
        })?;
        let at_c = beta.eval_t0();
        if at_c[1..].iter().any(|c| !c.is_zero()) {
            return Err(head.invalid(format!(
                "unit constant of v_{}{} at component {} depends on x",
                i + 1,
                j + 1,
                m + 1
            )));
        }
        if at_c[0].is_zero() {
            return Err(head.invalid(format!(
                "component {} of v_{}{} has valuation above p_{}{}",
                m + 1,
                i + 1,
                j + 1,
                i + 1,
                m + 1
            )));
        }
        constants.push(at_c[0].clone());
        units.push(Some(beta));
    }
    Ok(RawPairGenerator {
        element,
        units,
        constants,
    })
}

pub(crate) fn unit_table(head: &Model, p: &SpectrumMatrix) -> Result<UnitConstantTable> {
    let n = head.n();
    let mut table = UnitConstantTable::new(n);
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let g = pair_generator(head, p, i, j)?;
            for (m, c) in g.constants.into_iter().enumerate() {
                table.set(i, j, m, c);
            }
        }
    }
    Ok(table)
}

#[derive(Clone, Debug)]
pub(crate) struct RawSubstarIdeal {
    pub base: usize,
    pub generator: Vector,
    pub ideal: LinearSpace,
    pub vanishing: LinearSpace,
}

/// v_{I,i} = ∏_{j∈I} v_ji for the first i outside I, and the ideal it
/// generates, both at headroom 1.
pub(crate) fn substar_ideal(
    head: &Model,
    p: &SpectrumMatrix,
    subset: &[usize],
) -> Result<RawSubstarIdeal> {
    let n = head.n();
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.is_empty() || sorted.len() >= n || sorted.iter().any(|&j| j >= n) {
        return Err(crate::Error::Usage(
            "the index set must be a proper nonempty subset".into(),
        ));
    }
    let base = (0..n).find(|i| !sorted.contains(i)).expect("proper subset");
    let l = &head.layout;
    let mut generator = l.one();
    for &j in &sorted {
        let v = head.element_with(j, base, p.get(j, base))?;
        generator = l.mul(&generator, &v);
    }
    let ideal = head.ideal_span(std::slice::from_ref(&generator))?;
    let vanishing = head.vanishing_ideal(&sorted)?;
    Ok(RawSubstarIdeal {
        base,
        generator,
        ideal,
        vanishing,
    })
}

/// The connector for component i at level truncations.
#[derive(Clone, Debug)]
pub(crate) struct RawConnector {
    pub other: Vec<usize>,
    pub augmented: LinearSpace,
    pub well_defined: bool,
    pub projected: LinearSpace,
}

pub(crate) fn connector(model: &Model, i: usize) -> Result<RawConnector> {
    let l = &model.layout;
    let own = l.coords_of(i);
    let other: Vec<usize> = (0..l.dim()).filter(|c| !own.contains(c)).collect();
    let order: Vec<usize> = other.iter().chain(own.iter()).copied().collect();
    let augmented = LinearSpace::span(
        order.len(),
        model
            .basis()
            .iter()
            .map(|b| order.iter().map(|&c| b[c].clone()).collect()),
    )?;
    let well_defined = augmented.pivots().iter().all(|&p| p < other.len());
    let projected = model.space.project(&other)?;
    Ok(RawConnector {
        other,
        augmented,
        well_defined,
        projected,
    })
}

impl RawConnector {
    /// Ψ_i of a projected element, as the coefficient block of component i.
    pub fn apply(&self, k: &[Scalar]) -> Option<Vector> {
        let mut v = k.to_vec();
        let tail = self.augmented.ambient() - self.other.len();
        v.extend(std::iter::repeat_n(Scalar::zero(), tail));
        let r = self.augmented.reduce(&v);
        if r[..self.other.len()].iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(r[self.other.len()..].iter().map(|c| -c).collect())
    }
}
