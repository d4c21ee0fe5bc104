//! Presentation documents: stars, deformations and builder scripts as JSON
//! with rational-string scalars.
//!
//! Emitting a presentation writes its canonical (row-reduced) basis, so
//! parse ∘ emit is the identity on emitted documents.

use serde::{Deserialize, Serialize};

use crate::build::{extend_star, ExtensionStep, StarBase, TowerScript};
use crate::deform::{extend_deformation, planes, DeformPresentation, DeformStep};
use crate::error::{Error, Result};
use crate::kernel::{BiPoly, DeformGerm, MultiGerm, Scalar, TruncSeries};
use crate::star::{self, StarPresentation};

pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Document {
    Star(StarDocument),
    Deformation(DeformDocument),
    BuilderScript(ScriptDocument),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarDocument {
    pub version: u32,
    pub levels: Vec<usize>,
    pub basis: Vec<MultiGerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformDocument {
    pub version: u32,
    pub xdeg: usize,
    pub levels: Vec<usize>,
    pub basis: Vec<DeformGerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptDocument {
    pub version: u32,
    pub base: BaseSpec,
    #[serde(default)]
    pub steps: Vec<StepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// The script that produced the presentation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub base: BaseSpec,
    pub steps: Vec<StepSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "fixture", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BaseSpec {
    Pair {
        p: usize,
    },
    Lines {
        #[serde(with = "crate::kernel::wire::scalars")]
        slopes: Vec<Scalar>,
    },
    Initial {
        n: usize,
    },
    Planes {
        #[serde(with = "crate::kernel::wire::scalars")]
        slopes: Vec<Scalar>,
        xdeg: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    pub orders: Vec<usize>,
    pub beta: Vec<UnitSpec>,
}

/// A unit is a t-series (stars) or a list of x-rows (deformations).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UnitSpec {
    Series(TruncSeries),
    Poly(BiPoly),
}

/// What a document denotes once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Presentation {
    Star(StarPresentation),
    Deformation(DeformPresentation),
}

fn parse_error(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

fn parse_body<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        parse_error(
            if path == "." { "document".into() } else { path },
            e.into_inner().to_string(),
        )
    })
}

/// Syntax errors are located by line and column, shape errors by their
/// path inside the document (such as `basis[0][1][0]`).
pub fn parse_document(text: &str) -> Result<Document> {
    let mut value: serde_json::Value = serde_json::from_str(text).map_err(|e| {
        parse_error(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let kind = value
        .as_object_mut()
        .ok_or_else(|| parse_error("document", "expected a JSON object"))?
        .remove("kind")
        .ok_or_else(|| parse_error("kind", "missing field `kind`"))?;
    let doc = match kind.as_str() {
        Some("star") => Document::Star(parse_body(value)?),
        Some("deformation") => Document::Deformation(parse_body(value)?),
        Some("builder-script") => Document::BuilderScript(parse_body(value)?),
        _ => {
            return Err(parse_error(
                "kind",
                format!("unknown kind {kind}, expected star, deformation or builder-script"),
            ))
        }
    };
    let version = match &doc {
        Document::Star(d) => d.version,
        Document::Deformation(d) => d.version,
        Document::BuilderScript(d) => d.version,
    };
    if version != VERSION {
        return Err(parse_error(
            "version",
            format!("unsupported version {version}, expected {VERSION}"),
        ));
    }
    Ok(doc)
}

pub fn emit_document(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

impl Document {
    pub fn from_star(s: &StarPresentation, metadata: Option<Metadata>) -> Self {
        Document::Star(StarDocument {
            version: VERSION,
            levels: s.q().to_vec(),
            basis: s.basis(),
            metadata,
        })
    }

    pub fn from_deformation(d: &DeformPresentation, metadata: Option<Metadata>) -> Self {
        Document::Deformation(DeformDocument {
            version: VERSION,
            xdeg: d.xdeg(),
            levels: d.q().to_vec(),
            basis: d.basis(),
            metadata,
        })
    }

    pub fn from_presentation(p: &Presentation, metadata: Option<Metadata>) -> Self {
        match p {
            Presentation::Star(s) => Self::from_star(s, metadata),
            Presentation::Deformation(d) => Self::from_deformation(d, metadata),
        }
    }

    /// The presentation a document denotes; scripts are executed.
    pub fn presentation(&self) -> Result<Presentation> {
        match self {
            Document::Star(d) => Ok(Presentation::Star(StarPresentation::new(
                d.levels.clone(),
                d.basis.clone(),
            )?)),
            Document::Deformation(d) => Ok(Presentation::Deformation(DeformPresentation::new(
                d.xdeg,
                d.levels.clone(),
                d.basis.clone(),
            )?)),
            Document::BuilderScript(s) => s.build(),
        }
    }
}

impl ScriptDocument {
    pub fn new(base: BaseSpec, steps: Vec<StepSpec>, seed: Option<u64>) -> Self {
        ScriptDocument {
            version: VERSION,
            base,
            steps,
            metadata: seed.map(|s| Metadata {
                seed: Some(s),
                provenance: None,
            }),
        }
    }

    pub fn from_tower(t: &TowerScript, seed: Option<u64>) -> Self {
        let base = match &t.base {
            StarBase::Pair { p } => BaseSpec::Pair { p: *p },
            StarBase::Lines { c } => BaseSpec::Lines { slopes: c.clone() },
        };
        let steps = t.steps.iter().map(StepSpec::from_star_step).collect();
        Self::new(base, steps, seed)
    }

    /// The star tower this script describes, when its base is a star.
    pub fn tower(&self) -> Result<Option<TowerScript>> {
        let base = match &self.base {
            BaseSpec::Pair { p } => StarBase::Pair { p: *p },
            BaseSpec::Lines { slopes } => StarBase::Lines { c: slopes.clone() },
            BaseSpec::Initial { .. } | BaseSpec::Planes { .. } => return Ok(None),
        };
        let steps = self
            .steps
            .iter()
            .map(StepSpec::star_step)
            .collect::<Result<_>>()?;
        Ok(Some(TowerScript { base, steps }))
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            base: self.base.clone(),
            steps: self.steps.clone(),
        }
    }

    pub fn build(&self) -> Result<Presentation> {
        match &self.base {
            BaseSpec::Planes { slopes, xdeg } => {
                let mut d = planes(slopes, *xdeg)?;
                for (k, step) in self.steps.iter().enumerate() {
                    let ext = extend_deformation(&d, &step.deform_step(*xdeg))?;
                    d = ext.completion.ok_or_else(|| {
                        Error::NotApplicable(format!(
                            "step {} gives a quotient that is not free, so there is no canonical completion",
                            k + 1
                        ))
                    })?;
                }
                Ok(Presentation::Deformation(d))
            }
            base => {
                let mut s = match base {
                    BaseSpec::Pair { p } => star::congruence_pair(*p)?,
                    BaseSpec::Lines { slopes } => star::lines(slopes)?,
                    BaseSpec::Initial { n } => star::initial(*n)?,
                    BaseSpec::Planes { .. } => unreachable!("handled above"),
                };
                for step in &self.steps {
                    s = extend_star(&s, &step.star_step()?)?;
                }
                Ok(Presentation::Star(s))
            }
        }
    }
}

impl StepSpec {
    pub fn from_star_step(step: &ExtensionStep) -> Self {
        StepSpec {
            orders: step.p_new.clone(),
            beta: step.beta.iter().cloned().map(UnitSpec::Series).collect(),
        }
    }

    pub fn from_deform_step(step: &DeformStep) -> Self {
        StepSpec {
            orders: step.p_new.clone(),
            beta: step.beta.iter().cloned().map(UnitSpec::Poly).collect(),
        }
    }

    pub fn star_step(&self) -> Result<ExtensionStep> {
        let beta = self
            .beta
            .iter()
            .map(|b| match b {
                UnitSpec::Series(s) => Ok(s.clone()),
                UnitSpec::Poly(p) if p.is_x_free() => Ok(p.x_free_part()),
                UnitSpec::Poly(_) => Err(Error::Usage(
                    "a star step cannot use units that depend on x".into(),
                )),
            })
            .collect::<Result<_>>()?;
        Ok(ExtensionStep::new(self.orders.clone(), beta))
    }

    pub fn deform_step(&self, xdeg: usize) -> DeformStep {
        DeformStep {
            p_new: self.orders.clone(),
            beta: self
                .beta
                .iter()
                .map(|b| match b {
                    UnitSpec::Series(s) => BiPoly::from_series(s, xdeg),
                    UnitSpec::Poly(p) => p.rexdeg(xdeg),
                })
                .collect(),
        }
    }
}
