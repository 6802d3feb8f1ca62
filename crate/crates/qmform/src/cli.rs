//! Command-line front end. Exit codes: 0 ok, 1 I/O or failed self-test,
//! 2 invalid input, 3 resource cap.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use qmform_core::extract::{self, ExtractError, HarnessConfig, KSchedule, Limits};
use qmform_core::form::parse_rational;
use qmform_core::qm::{self, DefectSearch, QmError, QmSpec};
use qmform_core::reference::{self, OracleConfig};
use qmform_core::sympl::{self, FluxVector, Ic1Model, SymplError};
use qmform_core::words::{parse_word, Word};
use qmform_core::{AltForm, FormError, Rational};
use serde::Serialize;
use serde_json::Value;

use crate::formats::{self, FormatError, ManifoldDoc, QmSpecDoc};
use crate::manifest::{ManifestBuilder, Report};
use crate::parallel;

#[derive(Debug, Parser)]
#[command(name = "qmform", version, about = "Alternating forms from invariant quasimorphisms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the form of a quasimorphism spec by the limit formula.
    Extract(ExtractArgs),
    /// Closed-form prediction for a manifold spec.
    Predict(PredictArgs),
    /// Extendability, Reznikov triviality, or commuting obstruction.
    Decide {
        #[command(subcommand)]
        which: DecideCommand,
    },
    /// Lower bound on the defect over a ball in the commutator subgroup.
    Defect(DefectArgs),
    #[command(hide = true)]
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Representatives `w1;w2;...` of the standard basis; defaults to the generators.
    #[arg(long)]
    pub reps: Option<String>,
    /// Largest k; the schedule is 1, 2, 4, ... up to it.
    #[arg(long, default_value_t = extract::DEFAULT_KMAX)]
    pub kmax: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = extract::DEFAULT_MAX_LETTERS)]
    pub max_letters: usize,
    /// Cap on the ball used when the spec omits `defect_bound`.
    #[arg(long, default_value_t = qm::DEFAULT_BALL_CAP)]
    pub ball_cap: usize,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub manifold: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct FormSource {
    /// JSON matrix, or any report with a `form` field.
    #[arg(long)]
    pub form: Option<PathBuf>,
    /// Manifold spec; its predicted form is used.
    #[arg(long)]
    pub manifold: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum DecideCommand {
    Extendable {
        #[command(flatten)]
        source: FormSource,
        /// Subspace basis as `1,0,0,0;0,0,1,0`.
        #[arg(long)]
        basis: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Reznikov {
        #[command(flatten)]
        source: FormSource,
        #[arg(long)]
        basis: String,
        /// `zero` or `nonzero`.
        #[arg(long)]
        ic1: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Commute {
        #[command(flatten)]
        source: FormSource,
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
        /// `zero`, `cyclic:P/Q`, or `dense_unknown`.
        #[arg(long, default_value = "zero")]
        ic1: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct DefectArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = qm::DEFAULT_DEFECT_RADIUS)]
    pub radius: usize,
    /// Sample this many random pairs instead of the whole ball.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = qm::DEFAULT_BALL_CAP)]
    pub ball_cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    Io(String),
    Validation(String),
    Resource(String),
    Check(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) | Failure::Check(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Resource(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Validation(m) | Failure::Resource(m) | Failure::Check(m) => m,
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        if e.is_resource_limit() {
            Failure::Resource(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

impl From<ExtractError> for Failure {
    fn from(e: ExtractError) -> Self {
        if e.is_resource_limit() {
            Failure::Resource(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

impl From<QmError> for Failure {
    fn from(e: QmError) -> Self {
        FormatError::from(e).into()
    }
}

impl From<SymplError> for Failure {
    fn from(e: SymplError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<FormError> for Failure {
    fn from(e: FormError) -> Self {
        Failure::Validation(e.to_string())
    }
}

fn read_input(path: &Path, manifest: &mut ManifestBuilder) -> Result<Vec<u8>, Failure> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
    manifest.input(path, &bytes);
    Ok(bytes)
}

fn parse_json<T: serde::de::DeserializeOwned>(bytes: &[u8], path: &Path) -> Result<T, Failure> {
    serde_json::from_slice(bytes)
        .map_err(|e| Failure::Validation(format!("{}: malformed JSON: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn emit<B: Serialize>(
    body: &B,
    out: Option<&Path>,
    mut manifest: ManifestBuilder,
    workers: usize,
) -> Result<(), Failure> {
    if let Some(p) = out {
        manifest.output(p);
    }
    let report = Report { body, manifest: manifest.finish(workers) };
    let mut text = serde_json::to_string_pretty(&report).expect("serializable");
    text.push('\n');
    match out {
        Some(p) => write_file(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `1,0,1/2;0,1,0` into rational vectors. Empty input is an empty list.
pub fn parse_vectors(text: &str) -> Result<Vec<Vec<Rational>>, Failure> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_vector)
        .collect()
}

pub fn parse_vector(text: &str) -> Result<Vec<Rational>, Failure> {
    text.split(',')
        .map(|s| parse_rational(s.trim()).map_err(Failure::from))
        .collect()
}

pub fn parse_ic1(text: &str) -> Result<Ic1Model, Failure> {
    match text.trim() {
        "zero" => Ok(Ic1Model::Zero),
        "dense_unknown" => Ok(Ic1Model::DenseUnknown),
        t => match t.strip_prefix("cyclic:") {
            Some(g) => Ok(Ic1Model::cyclic(parse_rational(g.trim())?)?),
            None => Err(Failure::Validation(format!(
                "ic1 must be zero, cyclic:P/Q or dense_unknown, got {t:?}"
            ))),
        },
    }
}

pub fn parse_reps(text: &str, rank: u32) -> Result<Vec<Word>, Failure> {
    text.split(';')
        .map(|s| parse_word(s, rank).map_err(|e| Failure::Validation(format!("representative {s:?}: {e}"))))
        .collect()
}

fn load_spec(path: &Path, ball_cap: usize, manifest: &mut ManifestBuilder) -> Result<QmSpec, Failure> {
    let bytes = read_input(path, manifest)?;
    let doc: QmSpecDoc = parse_json(&bytes, path)?;
    Ok(doc.into_spec(ball_cap)?)
}

fn load_manifold(
    path: &Path,
    manifest: &mut ManifestBuilder,
) -> Result<(String, sympl::ManifoldSpec), Failure> {
    let bytes = read_input(path, manifest)?;
    let doc: ManifoldDoc = parse_json(&bytes, path)?;
    let kind = doc.kind.clone();
    Ok((kind, doc.into_spec()?))
}

fn load_form(source: &FormSource, manifest: &mut ManifestBuilder) -> Result<AltForm, Failure> {
    match (&source.form, &source.manifold) {
        (Some(p), _) => {
            let bytes = read_input(p, manifest)?;
            let v: Value = parse_json(&bytes, p)?;
            Ok(formats::form_from_value(&v)?)
        }
        (None, Some(p)) => {
            let (_, spec) = load_manifold(p, manifest)?;
            let predicted = sympl::predicted_form(&spec)?;
            if !predicted.is_complete() {
                return Err(Failure::Validation(
                    "predicted form has undetermined entries; pass --form instead".into(),
                ));
            }
            Ok(predicted.form)
        }
        (None, None) => Err(Failure::Validation("one of --form or --manifold is required".into())),
    }
}

pub fn cmd_extract(a: &ExtractArgs) -> Result<(), Failure> {
    let mut manifest = ManifestBuilder::start("extract");
    let spec = load_spec(&a.spec, a.ball_cap, &mut manifest)?;
    let reps = match &a.reps {
        Some(r) => parse_reps(r, spec.rank())?,
        None => extract::generator_representatives(spec.rank()),
    };
    let schedule = KSchedule::powers_of_two(a.kmax)?;
    let limits = Limits { max_letters: a.max_letters };
    let (ex, workers) = parallel::extract_matrix_parallel(
        &spec,
        &reps,
        &schedule,
        &limits,
        parallel::workers_from_env(),
    )?;
    let body = formats::ExtractBody::new(&spec, &reps, schedule.values(), &ex);
    if let Some(p) = &a.csv {
        write_file(p, &body.csv())?;
        manifest.output(p);
    }
    emit(&body, a.out.as_deref(), manifest, workers)
}

pub fn cmd_predict(a: &PredictArgs) -> Result<(), Failure> {
    let mut manifest = ManifestBuilder::start("predict");
    let (kind, spec) = load_manifold(&a.manifold, &mut manifest)?;
    let predicted = sympl::predicted_form(&spec)?;
    let vol = sympl::volume(&spec)?;
    let curvature = match sympl::scalar_curvature_product(&spec) {
        Ok(c) => Some(c),
        Err(SymplError::UnsupportedKind) => match &spec {
            sympl::ManifoldSpec::TorusBlowup(b) => b.curvature_a.clone(),
            _ => None,
        },
        Err(e) => return Err(e.into()),
    };
    let body = formats::PredictBody::new(&kind, &spec, &vol, curvature.as_ref(), &predicted);
    emit(&body, a.out.as_deref(), manifest, 1)
}

pub fn cmd_decide(which: &DecideCommand) -> Result<(), Failure> {
    match which {
        DecideCommand::Extendable { source, basis, out } => {
            let mut manifest = ManifestBuilder::start("decide extendable");
            let form = load_form(source, &mut manifest)?;
            let verdict = extract::check_extendable(&form, &parse_vectors(basis)?)?;
            emit(&formats::ExtendableDoc::from(&verdict), out.as_deref(), manifest, 1)
        }
        DecideCommand::Reznikov { source, basis, ic1, out } => {
            let mut manifest = ManifestBuilder::start("decide reznikov");
            let form = load_form(source, &mut manifest)?;
            let ic1_zero = match ic1.trim() {
                "zero" => true,
                "nonzero" => false,
                t => return Err(Failure::Validation(format!("ic1 must be zero or nonzero, got {t:?}"))),
            };
            let verdict = sympl::reznikov_trivial(ic1_zero, &form, &parse_vectors(basis)?)?;
            emit(&formats::ReznikovDoc::from(&verdict), out.as_deref(), manifest, 1)
        }
        DecideCommand::Commute { source, v, w, ic1, out } => {
            let mut manifest = ManifestBuilder::start("decide commute");
            let form = load_form(source, &mut manifest)?;
            let verdict = sympl::commuting_obstruction(
                &form,
                &FluxVector(parse_vector(v)?),
                &FluxVector(parse_vector(w)?),
                &parse_ic1(ic1)?,
            )?;
            emit(&formats::CommuteDoc::from(&verdict), out.as_deref(), manifest, 1)
        }
    }
}

#[derive(Debug, Serialize)]
struct DefectBody {
    lower_bound: String,
    witness: [String; 2],
    search_radius: usize,
    exhaustive: bool,
    pairs_examined: usize,
}

pub fn cmd_defect(a: &DefectArgs) -> Result<(), Failure> {
    let mut manifest = ManifestBuilder::start("defect");
    let bytes = read_input(&a.spec, &mut manifest)?;
    let mut doc: QmSpecDoc = parse_json(&bytes, &a.spec)?;
    // the bound being estimated must not be required up front
    doc.defect_bound = Some(formats::RationalText::Int(0));
    let spec = doc.into_spec(a.ball_cap)?;
    let search = match a.samples {
        Some(samples) => DefectSearch::Random { samples, seed: a.seed },
        None => DefectSearch::Exhaustive,
    };
    let est = qm::estimate_defect(&spec, a.radius, search, a.ball_cap)?;
    let body = DefectBody {
        lower_bound: formats::rational_string(&est.lower_bound),
        witness: [est.witness_pair.0.to_string(), est.witness_pair.1.to_string()],
        search_radius: est.search_radius,
        exhaustive: est.exhaustive,
        pairs_examined: est.pairs_examined,
    };
    emit(&body, a.out.as_deref(), manifest, 1)
}

/// Property harness plus oracle spot checks on a fixed spec.
pub fn cmd_selftest(a: &SelftestArgs) -> Result<(), Failure> {
    let text = r#"{"rank": 3, "core": [["0","1","-2"],["-1","0","1/2"],["2","-1/2","0"]],
        "brooks": [{"pattern": "a b", "weight": "1"}, {"pattern": "c A", "weight": "-1/3"}],
        "homog_depth": 8, "defect_bound": "8"}"#;
    let doc: QmSpecDoc = serde_json::from_str(text).expect("builtin spec");
    let spec = doc.into_spec(qm::DEFAULT_BALL_CAP)?;
    let report = extract::property_harness(&spec, &HarnessConfig { seed: a.seed, ..HarnessConfig::new(a.trials) })?;
    let mut failed = Vec::new();
    for c in &report.checks {
        eprintln!("{:<36} {:>6} cases  {:>4} failures", c.name, c.cases, c.failures);
        if !c.passed() {
            failed.push(format!("{}: {}", c.name, c.counterexample.clone().unwrap_or_default()));
        }
    }
    let cfg = OracleConfig::default();
    let (g1, g2) = (parse_word("a b", 3).expect("word"), parse_word("c", 3).expect("word"));
    for k in [1u64, 3, 8] {
        let fast = extract::estimate_pair(&spec, &g1, &g2, &KSchedule::new(vec![k])?, &Limits::default())?
            .final_estimate;
        let slow = reference::bruteforce_pair(&spec, &g1, &g2, k, &cfg)
            .map_err(|e| Failure::Check(e.to_string()))?;
        if fast != slow {
            failed.push(format!("oracle mismatch at k = {k}: {fast} vs {slow}"));
        }
    }
    if failed.is_empty() {
        eprintln!("selftest passed");
        Ok(())
    } else {
        Err(Failure::Check(failed.join("\n")))
    }
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Extract(a) => cmd_extract(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Decide { which } => cmd_decide(which),
        Command::Defect(a) => cmd_defect(a),
        Command::Selftest(a) => cmd_selftest(a),
    }
}
