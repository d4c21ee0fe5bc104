//! Oblate n-stars presented by their image algebra B ⊆ ∏ K[t]/(t^{q_i}).
//!
//! Component indices in the API are 0-based; reports and error messages
//! print them 1-based.

mod fixtures;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{self, Check, SpectrumMatrix, UnitConstantTable, ValidationReport};
use crate::kernel::{LinearSpace, MultiGerm, Scalar, TruncSeries};
use crate::model::{Kind, Layout, Model, Vector};

pub use fixtures::{congruence_pair, curves, initial, lines};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarPresentation {
    pub(crate) model: Model,
}

/// v_ij with component i zero and component j exactly t^{p_ij}, computed
/// at truncations q + 1, with its unit row β_ij^(m) and the constants
/// b_ij^(m) = β_ij^(m)(P).
#[derive(Clone, Debug)]
pub struct PairGenerator {
    pub i: usize,
    pub j: usize,
    pub p: usize,
    pub element: MultiGerm,
    pub units: Vec<Option<TruncSeries>>,
    pub constants: Vec<Scalar>,
}

#[derive(Clone, Debug)]
pub struct SubstarIdeal {
    pub subset: Vec<usize>,
    /// The component i ∉ I used to build v_{I,i}.
    pub base: usize,
    pub generator: MultiGerm,
    /// t-valuation of each coordinate of the generator (`None` for zero).
    pub valuations: Vec<Option<usize>>,
    pub dim: usize,
    pub(crate) ideal: LinearSpace,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    pub dim: usize,
    pub principal: bool,
    pub nilpotency_index: Option<usize>,
    pub oblate: bool,
}

/// Ψ_i: K_i → K[t]/(t^{q_i}).
#[derive(Clone, Debug)]
pub struct ConnectorMap {
    pub i: usize,
    pub checks: Vec<Check>,
    pub kernel_dim: usize,
    raw: invariants::RawConnector,
    layout: Layout,
}

impl ConnectorMap {
    /// Applies Ψ_i to the tuple of the other components (in order, with
    /// component i left out).
    pub fn apply(&self, others: &[TruncSeries]) -> Result<TruncSeries> {
        let n = self.layout.n();
        if others.len() + 1 != n {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                got: others.len(),
            });
        }
        let mut full: Vec<TruncSeries> = others.to_vec();
        full.insert(self.i, TruncSeries::zero(self.layout.trunc[self.i]));
        let v = self.layout.from_series(&full)?;
        let k: Vector = self.raw.other.iter().map(|&c| v[c].clone()).collect();
        let out = self
            .raw
            .apply(&k)
            .ok_or_else(|| Error::Usage("the tuple is not in K_i".into()))?;
        TruncSeries::new(out)
    }

    pub fn is_well_defined(&self) -> bool {
        self.raw.well_defined
    }
}

impl StarPresentation {
    /// A star from its level vector and a spanning set of B. Basis elements
    /// must already sit at the level truncations.
    pub fn new(q: Vec<usize>, basis: Vec<MultiGerm>) -> Result<Self> {
        if q.len() < 2 {
            return Err(Error::Usage("a star needs at least two components".into()));
        }
        let layout = Layout::new(1, q.clone())?;
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
            }
            vectors.push(layout.from_series(&g.components)?);
        }
        Ok(StarPresentation {
            model: Model::new(Kind::Star, layout, vectors)?,
        })
    }

    pub(crate) fn from_model(model: Model) -> Self {
        debug_assert_eq!(model.layout.xdeg, 1);
        StarPresentation {
            model: Model {
                kind: Kind::Star,
                ..model
            },
        }
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    pub fn q(&self) -> &[usize] {
        self.model.q()
    }

    /// dim_K B.
    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// The canonical (reduced row-echelon) basis of B.
    pub fn basis(&self) -> Vec<MultiGerm> {
        self.model.basis().iter().map(|v| self.germ(v)).collect()
    }

    pub(crate) fn germ(&self, v: &[Scalar]) -> MultiGerm {
        germ_of(&self.model.layout, v)
    }

    pub fn one(&self) -> MultiGerm {
        self.germ(&self.model.layout.one())
    }

    pub fn pi(&self) -> MultiGerm {
        self.germ(&self.model.layout.pi())
    }

    /// Membership of a tuple of polynomials: each component is reduced
    /// modulo t^{q_i} and the result tested against B.
    pub fn membership(&self, g: &MultiGerm) -> Result<bool> {
        if g.n() != self.n() {
            return Err(Error::Usage(format!(
                "expected {} components, got {}",
                self.n(),
                g.n()
            )));
        }
        let v = self.model.layout.from_series(&g.components)?;
        Ok(self.model.contains(&v))
    }

    pub fn validate(&self) -> ValidationReport {
        invariants::validate(&self.model)
    }

    /// The spectrum without the consistency check.
    pub fn spectrum_matrix(&self) -> SpectrumMatrix {
        SpectrumMatrix(self.model.spectrum())
    }

    pub fn spectrum(&self) -> Result<SpectrumMatrix> {
        let p = self.spectrum_matrix();
        if let Some(i) = p.consistency_violation(self.q()) {
            return Err(Error::InvalidStar(format!(
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

    pub(crate) fn head(&self) -> Model {
        self.model.headroom(1)
    }

    pub fn pair_generator(&self, i: usize, j: usize) -> Result<PairGenerator> {
        let p = self.spectrum()?;
        let head = self.head();
        let raw = invariants::pair_generator(&head, &p, i, j)?;
        Ok(PairGenerator {
            i,
            j,
            p: p.get(i, j),
            element: germ_of(&head.layout, &raw.element),
            units: raw
                .units
                .into_iter()
                .map(|u| u.map(|b| b.x_free_part()))
                .collect(),
            constants: raw.constants,
        })
    }

    /// The raw table, without asserting any law.
    pub fn unit_constant_table(&self) -> Result<UnitConstantTable> {
        let p = self.spectrum()?;
        invariants::unit_table(&self.head(), &p)
    }

    /// The table of b_ij^(m), with every law (including the λ product law)
    /// asserted.
    pub fn unit_constants(&self) -> Result<UnitConstantTable> {
        let table = self.unit_constant_table()?;
        let lambda = self.lambda()?;
        let bad = table.violations(Some(&lambda));
        if let Some(first) = bad.first() {
            return Err(Error::InvalidStar(format!(
                "{} unit-constant law violations, first: {first}",
                bad.len()
            )));
        }
        Ok(table)
    }

    /// The ideal of the components in `subset`, generated by v_{I,i}.
    pub fn substar_ideal(&self, subset: &[usize]) -> Result<SubstarIdeal> {
        let p = self.spectrum()?;
        let head = self.head();
        let raw = invariants::substar_ideal(&head, &p, subset)?;
        if raw.ideal != raw.vanishing {
            return Err(Error::InvalidStar(format!(
                "the ideal generated by v_I has dimension {} but the vanishing ideal of {:?} has dimension {}",
                raw.ideal.dim(),
                subset.iter().map(|i| i + 1).collect::<Vec<_>>(),
                raw.vanishing.dim()
            )));
        }
        let l = &head.layout;
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        Ok(SubstarIdeal {
            subset: sorted,
            base: raw.base,
            valuations: (0..self.n())
                .map(|i| l.valuation(&raw.generator, i))
                .collect(),
            generator: germ_of(l, &raw.generator),
            dim: raw.ideal.dim(),
            ideal: raw.ideal,
        })
    }

    pub fn connector(&self, i: usize) -> Result<ConnectorMap> {
        if i >= self.n() {
            return Err(Error::Usage(format!("no component {}", i + 1)));
        }
        let l = &self.model.layout;
        let raw = invariants::connector(&self.model, i)?;
        if !raw.well_defined {
            return Err(Error::InvalidStar(format!(
                "component {} is not determined by the others",
                i + 1
            )));
        }
        let mut checks = Vec::new();

        let mut at_p = None;
        for k in raw.projected.basis() {
            let psi = raw.apply(k).expect("member of K_i");
            // every other coordinate agrees at P; read the first one
            let other0 = if i == 0 { 1 } else { 0 };
            let pos = raw
                .other
                .iter()
                .position(|&c| c == l.index(other0, 0, 0))
                .expect("coordinate present");
            if psi[0] != k[pos] {
                at_p = Some("a basis element of K_i changes its value at P".to_string());
                break;
            }
        }
        checks.push(Check::from_option("value at P preserved", at_p));

        let pi = l.pi();
        let pi_proj: Vector = raw.other.iter().map(|&c| pi[c].clone()).collect();
        let psi_pi = raw.apply(&pi_proj).expect("pi is a member");
        let t = TruncSeries::t_pow(1, self.q()[i]);
        checks.push(Check::from_option(
            "Psi(pi) = t",
            (psi_pi.as_slice() != t.coeffs()).then(|| {
                format!(
                    "Psi(pi) = {}",
                    TruncSeries::new(psi_pi.clone()).expect("nonempty")
                )
            }),
        ));

        let kernel = self.model.vanishing_ideal(&[i])?.project(&raw.other)?;
        let p = self.spectrum()?;
        let head = self.head();
        let mut ker_witness = None;
        for j in (0..self.n()).filter(|&j| j != i) {
            let v = head.element_with(i, j, p.get(i, j))?;
            let v = head.layout.retrunc(&v, l);
            let span = self.model.ideal_span(&[v])?.project(&raw.other)?;
            if span != kernel {
                ker_witness = Some(format!(
                    "kernel has dimension {} but v_{}{}·K_i has dimension {}",
                    kernel.dim(),
                    i + 1,
                    j + 1,
                    span.dim()
                ));
                break;
            }
        }
        checks.push(Check::from_option("kernel generated by v_ij", ker_witness));

        if let Some(c) = checks.iter().find(|c| !c.passed) {
            return Err(Error::InvalidStar(format!(
                "connector for component {}: {c}",
                i + 1
            )));
        }
        Ok(ConnectorMap {
            i,
            checks,
            kernel_dim: kernel.dim(),
            raw,
            layout: l.clone(),
        })
    }

    /// F = B⁺/πB⁺ at truncations q + 1.
    pub fn fiber_algebra(&self) -> Result<FiberReport> {
        let head = self.head();
        let l = &head.layout;
        let pi_b = head.ideal_span(&[l.pi()])?;
        let dim = head.dim() - pi_b.dim();
        let consts: Vec<usize> = (0..self.n()).map(|i| l.index(i, 0, 0)).collect();
        let m = head.space.vanishing_on(&consts)?;
        let mut m2 = pi_b.clone();
        let mb = m.basis();
        for a in 0..mb.len() {
            for b in a..mb.len() {
                m2.insert(l.mul(&mb[a], &mb[b]))?;
            }
        }
        let cotangent = m.dim() - m2.dim();
        let principal = cotangent <= 1;
        let nilpotency_index = if dim <= 1 || cotangent == 0 {
            Some(1)
        } else if principal {
            let x = m.complement_basis(&m2)?.remove(0);
            let mut power = x.clone();
            let mut k = 1;
            while !pi_b.contains(&power) {
                power = l.mul(&power, &x);
                k += 1;
            }
            Some(k)
        } else {
            None
        };
        Ok(FiberReport {
            dim,
            principal,
            nilpotency_index,
            oblate: dim == self.n() && principal && nilpotency_index == Some(self.n()),
        })
    }

    /// dim m/m² computed at truncations q + 1.
    pub fn embedding_dimension(&self) -> Result<usize> {
        let head = self.head();
        let l = &head.layout;
        let consts: Vec<usize> = (0..self.n()).map(|i| l.index(i, 0, 0)).collect();
        let m = head.space.vanishing_on(&consts)?;
        let mut m2 = LinearSpace::zero(l.dim());
        let mb = m.basis();
        for a in 0..mb.len() {
            for b in a..mb.len() {
                m2.insert(l.mul(&mb[a], &mb[b]))?;
            }
        }
        Ok(m.dim() - m2.dim())
    }

    pub fn is_oblate(&self) -> Result<bool> {
        Ok(self.embedding_dimension()? <= 2)
    }

    /// Restriction to a subset of components (the sub-star).
    pub fn restrict(&self, comps: &[usize]) -> Result<StarPresentation> {
        let p = self.spectrum()?;
        let sub = p.restrict(comps);
        let q: Vec<usize> = sub.row_sums();
        let layout = Layout::new(1, q)?;
        let vectors = self
            .model
            .basis()
            .iter()
            .map(|b| {
                let comps: Vec<TruncSeries> = comps
                    .iter()
                    .map(|&i| self.model.layout.series(b, i))
                    .collect();
                layout.from_series(&comps)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StarPresentation::from_model(Model::new(
            Kind::Star,
            layout,
            vectors,
        )?))
    }
}

pub(crate) fn germ_of(layout: &Layout, v: &[Scalar]) -> MultiGerm {
    MultiGerm::new((0..layout.n()).map(|i| layout.series(v, i)).collect())
}

impl SubstarIdeal {
    pub fn contains(&self, star: &StarPresentation, g: &MultiGerm) -> Result<bool> {
        let head = star.model.layout.headroom(1);
        let v = head.from_series(&g.components)?;
        Ok(self.ideal.contains(&v))
    }
}

#[cfg(test)]
mod tests;
