//! JSON documents: quasimorphism specs, manifold specs, and reports.
//!
//! Rationals are strings, `"p/q"` or an integer; matrices are row-major
//! arrays of rows. Inputs also accept plain JSON integers where a rational is
//! expected.

use qmform_core::extract::{ConvergenceReport, ExtendabilityVerdict, Extraction};
use qmform_core::form::{format_rational, parse_rational};
use qmform_core::qm::{self, BrooksTerm, QmError, QmSpec};
use qmform_core::sympl::{
    BlowupSpec, CommutingVerdict, Decision, ManifoldSpec, PredictedForm, ReznikovVerdict,
    SurfaceSpec, SymplError, Warning,
};
use qmform_core::words::{parse_word, Word, WordError};
use qmform_core::{AltForm, FormError, Rational};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Marker for matrix entries that are not determined.
pub const UNKNOWN: &str = "UNKNOWN";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Form(#[from] FormError),
    #[error("{0}")]
    Word(#[from] WordError),
    #[error("{0}")]
    Qm(#[from] QmError),
    #[error("{0}")]
    Sympl(#[from] SymplError),
    #[error("invalid document: {0}")]
    Invalid(String),
}

impl FormatError {
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, FormatError::Qm(QmError::ResourceLimit { .. }))
    }
}

/// A rational given either as a string or as a JSON integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Text(String),
    Int(i64),
}

impl RationalText {
    pub fn parse(&self) -> Result<Rational, FormatError> {
        match self {
            RationalText::Text(s) => Ok(parse_rational(s)?),
            RationalText::Int(n) => Ok(qmform_core::form::rat(*n)),
        }
    }
}

pub fn rational_string(r: &Rational) -> String {
    format_rational(r)
}

pub fn matrix_strings(form: &AltForm) -> Vec<Vec<String>> {
    form.rows().map(|r| r.iter().map(rational_string).collect()).collect()
}

pub fn parse_matrix(rows: &[Vec<RationalText>]) -> Result<AltForm, FormatError> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(RationalText::parse).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AltForm::from_rows(rows)?)
}

pub fn parse_vector(v: &[RationalText]) -> Result<Vec<Rational>, FormatError> {
    v.iter().map(RationalText::parse).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrooksDoc {
    pub pattern: String,
    pub weight: RationalText,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QmSpecDoc {
    pub rank: u32,
    pub core: Vec<Vec<RationalText>>,
    #[serde(default)]
    pub brooks: Vec<BrooksDoc>,
    #[serde(default)]
    pub homog_depth: Option<u32>,
    #[serde(default)]
    pub defect_bound: Option<RationalText>,
}

impl QmSpecDoc {
    /// Validates the document. A missing `defect_bound` is derived from an
    /// exhaustive search, which can hit `ball_cap`.
    pub fn into_spec(self, ball_cap: usize) -> Result<QmSpec, FormatError> {
        let core = parse_matrix(&self.core)?;
        if core.rank() != self.rank as usize {
            return Err(FormatError::Invalid(format!(
                "core is {0}x{0} but rank is {1}",
                core.rank(),
                self.rank
            )));
        }
        let brooks = self
            .brooks
            .iter()
            .map(|b| BrooksTerm::new(parse_word(&b.pattern, self.rank)?, b.weight.parse()?).map_err(FormatError::from))
            .collect::<Result<Vec<_>, FormatError>>()?;
        let depth = self.homog_depth.unwrap_or(qm::DEFAULT_HOMOG_DEPTH);
        let spec = QmSpec::new(core, brooks, depth, Rational::from_integer(0.into()))?;
        match self.defect_bound {
            Some(d) => Ok(spec.with_defect_bound(d.parse()?)?),
            None => {
                let d = qm::default_defect_bound(&spec, ball_cap)?;
                Ok(spec.with_defect_bound(d)?)
            }
        }
    }
}

pub fn spec_to_doc(spec: &QmSpec) -> QmSpecDoc {
    let text = |r: &Rational| RationalText::Text(rational_string(r));
    QmSpecDoc {
        rank: spec.rank(),
        core: spec.core().rows().map(|r| r.iter().map(text).collect()).collect(),
        brooks: spec
            .brooks()
            .iter()
            .map(|t| BrooksDoc { pattern: t.pattern().to_string(), weight: text(t.weight()) })
            .collect(),
        homog_depth: Some(spec.homog_depth()),
        defect_bound: Some(text(spec.defect_bound())),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDoc {
    pub genus: u32,
    pub area: RationalText,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupDoc {
    pub radii: Vec<RationalText>,
    pub rho: RationalText,
    pub r: RationalText,
    #[serde(rename = "curvature_A", default)]
    pub curvature_a: Option<RationalText>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldDoc {
    pub kind: String,
    #[serde(default)]
    pub surfaces: Vec<SurfaceDoc>,
    #[serde(default)]
    pub extra_volume: Option<RationalText>,
    #[serde(default)]
    pub extra_curvature: Option<RationalText>,
    #[serde(default)]
    pub extra_half_dim: Option<u32>,
    #[serde(default)]
    pub extra_betti1: Option<usize>,
    #[serde(default)]
    pub blowup: Option<BlowupDoc>,
}

impl ManifoldDoc {
    pub fn into_spec(self) -> Result<ManifoldSpec, FormatError> {
        let surfaces = self
            .surfaces
            .iter()
            .map(|s| Ok(SurfaceSpec::new(s.genus, s.area.parse()?)?))
            .collect::<Result<Vec<_>, FormatError>>()?;
        let missing = |f: &str| FormatError::Invalid(format!("{} requires {f}", self.kind));
        let spec = match self.kind.as_str() {
            "product_of_surfaces" => ManifoldSpec::ProductOfSurfaces(surfaces),
            "surface_times_manifold" => {
                let [surface] = <[SurfaceSpec; 1]>::try_from(surfaces).map_err(|_| {
                    FormatError::Invalid("surface_times_manifold takes exactly one surface".into())
                })?;
                ManifoldSpec::SurfaceTimesManifold {
                    surface,
                    extra_volume: self.extra_volume.as_ref().ok_or_else(|| missing("extra_volume"))?.parse()?,
                    extra_curvature: self
                        .extra_curvature
                        .as_ref()
                        .ok_or_else(|| missing("extra_curvature"))?
                        .parse()?,
                    extra_half_dim: self.extra_half_dim.ok_or_else(|| missing("extra_half_dim"))?,
                    extra_betti1: self.extra_betti1.unwrap_or(0),
                }
            }
            "torus_blowup" => {
                let b = self.blowup.as_ref().ok_or_else(|| missing("blowup"))?;
                ManifoldSpec::TorusBlowup(BlowupSpec {
                    radii: parse_vector(&b.radii)?,
                    rho: b.rho.parse()?,
                    r: b.r.parse()?,
                    curvature_a: b.curvature_a.as_ref().map(RationalText::parse).transpose()?,
                })
            }
            other => return Err(FormatError::Invalid(format!("unknown manifold kind {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDoc {
    pub i: usize,
    pub j: usize,
    pub gamma1: Vec<i64>,
    pub gamma2: Vec<i64>,
    pub k: Vec<u64>,
    pub estimates: Vec<String>,
    pub envelope: Vec<String>,
    pub final_estimate: String,
    pub certified_radius: String,
}

impl PairDoc {
    pub fn new(i: usize, j: usize, r: &ConvergenceReport) -> Self {
        PairDoc {
            i: i + 1,
            j: j + 1,
            gamma1: r.gamma1.entries().to_vec(),
            gamma2: r.gamma2.entries().to_vec(),
            k: r.estimates.iter().map(|(k, _)| *k).collect(),
            estimates: r.estimates.iter().map(|(_, e)| rational_string(e)).collect(),
            envelope: r.envelope.iter().map(rational_string).collect(),
            final_estimate: rational_string(&r.final_estimate),
            certified_radius: rational_string(&r.certified_radius),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractBody {
    pub rank: u32,
    pub representatives: Vec<String>,
    pub schedule: Vec<u64>,
    pub homog_depth: u32,
    pub defect_bound: String,
    pub envelope_constant: String,
    pub form: Vec<Vec<String>>,
    pub pairs: Vec<PairDoc>,
}

impl ExtractBody {
    pub fn new(spec: &QmSpec, reps: &[Word], schedule: &[u64], ex: &Extraction) -> Self {
        ExtractBody {
            rank: spec.rank(),
            representatives: reps.iter().map(ToString::to_string).collect(),
            schedule: schedule.to_vec(),
            homog_depth: spec.homog_depth(),
            defect_bound: rational_string(spec.defect_bound()),
            envelope_constant: rational_string(&spec.envelope_constant()),
            form: matrix_strings(&ex.form),
            pairs: ex.pairs.iter().map(|p| PairDoc::new(p.i, p.j, &p.report)).collect(),
        }
    }

    /// `(i, j, k, estimate, envelope)` rows with 1-based indices.
    pub fn csv(&self) -> String {
        let mut out = String::from("i,j,k,estimate,envelope\n");
        for p in &self.pairs {
            for ((k, e), r) in p.k.iter().zip(&p.estimates).zip(&p.envelope) {
                out.push_str(&format!("{},{},{k},{e},{r}\n", p.i, p.j));
            }
        }
        out
    }
}

fn warning_text(w: &Warning) -> String {
    match w {
        Warning::GenusOneFactor { factor } => format!(
            "factor {} has genus 1: outside the genus >= 2 hypothesis, block is zero",
            factor + 1
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictBody {
    pub kind: String,
    pub half_dim: u32,
    pub betti1: usize,
    pub volume: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scalar_curvature: Option<String>,
    pub known_dim: usize,
    /// Entries outside the known block are the string `UNKNOWN`.
    pub form: Vec<Vec<String>>,
    pub warnings: Vec<String>,
}

impl PredictBody {
    pub fn new(
        kind: &str,
        spec: &ManifoldSpec,
        volume: &Rational,
        curvature: Option<&Rational>,
        p: &PredictedForm,
    ) -> Self {
        let form = (0..p.form.rank())
            .map(|i| {
                (0..p.form.rank())
                    .map(|j| {
                        if p.is_known(i, j) {
                            rational_string(p.form.get(i, j))
                        } else {
                            UNKNOWN.to_string()
                        }
                    })
                    .collect()
            })
            .collect();
        PredictBody {
            kind: kind.to_string(),
            half_dim: spec.half_dim(),
            betti1: spec.betti1(),
            volume: rational_string(volume),
            scalar_curvature: curvature.map(rational_string),
            known_dim: p.known_dim,
            form,
            warnings: p.warnings.iter().map(warning_text).collect(),
        }
    }
}

/// Reads a form from a bare matrix or from any object with a `form` field.
/// `UNKNOWN` entries are rejected.
pub fn form_from_value(v: &Value) -> Result<AltForm, FormatError> {
    let m = match v {
        Value::Object(o) => o
            .get("form")
            .ok_or_else(|| FormatError::Invalid("object has no \"form\" field".into()))?,
        other => other,
    };
    if m.to_string().contains(UNKNOWN) {
        return Err(FormatError::Invalid("form has undetermined entries".into()));
    }
    let rows: Vec<Vec<RationalText>> = serde_json::from_value(m.clone())?;
    parse_matrix(&rows)
}

fn vec_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(rational_string).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub u: Vec<String>,
    pub v: Vec<String>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ExtendableDoc {
    Extendable,
    NotExtendable { witness: WitnessDoc },
}

impl From<&ExtendabilityVerdict> for ExtendableDoc {
    fn from(v: &ExtendabilityVerdict) -> Self {
        match v {
            ExtendabilityVerdict::Extendable => ExtendableDoc::Extendable,
            ExtendabilityVerdict::NotExtendable { u, v, value } => ExtendableDoc::NotExtendable {
                witness: WitnessDoc { u: vec_strings(u), v: vec_strings(v), value: rational_string(value) },
            },
        }
    }
}

pub const CONDITION_IC1: &str = "condition_1_ic1_nonzero";
pub const CONDITION_FORM: &str = "condition_2_form_nonzero_on_subspace";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ReznikovDoc {
    Trivial,
    Nontrivial {
        failing_conditions: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<WitnessDoc>,
    },
}

impl From<&ReznikovVerdict> for ReznikovDoc {
    fn from(v: &ReznikovVerdict) -> Self {
        match v {
            ReznikovVerdict::Trivial => ReznikovDoc::Trivial,
            ReznikovVerdict::Nontrivial { ic1_nonzero, form_witness } => {
                let mut failing = Vec::new();
                if *ic1_nonzero {
                    failing.push(CONDITION_IC1.to_string());
                }
                let witness = match form_witness {
                    Some(w) => {
                        failing.push(CONDITION_FORM.to_string());
                        match ExtendableDoc::from(w) {
                            ExtendableDoc::NotExtendable { witness } => Some(witness),
                            ExtendableDoc::Extendable => None,
                        }
                    }
                    None => None,
                };
                ReznikovDoc::Nontrivial { failing_conditions: failing, witness }
            }
        }
    }
}

fn decision_text(d: Decision) -> &'static str {
    match d {
        Decision::Obstructed => "obstructed",
        Decision::NotObstructed => "not_obstructed",
        Decision::Undecided => "undecided",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommuteDoc {
    pub value: String,
    pub universal_cover: String,
    pub base: String,
}

impl From<&CommutingVerdict> for CommuteDoc {
    fn from(v: &CommutingVerdict) -> Self {
        CommuteDoc {
            value: rational_string(&v.value),
            universal_cover: decision_text(v.universal_cover).to_string(),
            base: decision_text(v.base).to_string(),
        }
    }
}
