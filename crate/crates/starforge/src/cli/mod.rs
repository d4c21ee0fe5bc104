//! The `starforge` command line: analyze, build, compare and verify, each
//! producing a deterministic report.
//!
//! Exit codes: 0 when every check passes, 1 for a mathematical failure
//! (the report carries the witness), 2 for usage and parse errors.

mod verify;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::compare::{compare_stars, nonflatness_witness};
use crate::deform::{extract_star, DeformPresentation};
use crate::error::Error;
use crate::invariants::Check;
use crate::io::{self, Document, Metadata, Presentation};
use crate::kernel::scalar::format_scalar;
use crate::star::StarPresentation;

pub use verify::{run_suite, shrink_script, SuiteOutcome, TrialFailure, SUITES};

#[derive(Parser, Debug)]
#[command(
    name = "starforge",
    version,
    about = "Exact computations on oblate n-stars and fragmented deformations"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Trials per verify suite.
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the invariant suite on presentation documents.
    Analyze { files: Vec<PathBuf> },
    /// Execute a builder script and print the resulting document.
    Build { file: PathBuf },
    /// Compare two star documents.
    Compare { first: PathBuf, second: PathBuf },
    /// Run randomized property suites.
    Verify { suites: Vec<String> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub verdict: Status,
    pub checks: Vec<Check>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Wall-clock time; the only field that varies between identical runs.
    pub timing_ms: u64,
}

impl Report {
    fn new(
        command: String,
        checks: Vec<Check>,
        data: Value,
        seed: Option<u64>,
        start: Instant,
    ) -> Self {
        let verdict = if checks.iter().all(|c| c.passed) {
            Status::Pass
        } else {
            Status::Fail
        };
        Report {
            command,
            verdict,
            checks,
            data,
            seed,
            timing_ms: start.elapsed().as_millis() as u64,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Status::Pass
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Text => {
                let verdict = if self.passed() { "PASS" } else { "FAIL" };
                let mut s = format!("{}: {verdict}\n", self.command);
                for c in &self.checks {
                    s.push_str(&format!("  {c}\n"));
                }
                if let Value::Object(map) = &self.data {
                    for (k, v) in map {
                        s.push_str(&format!("  {k} = {v}\n"));
                    }
                }
                s
            }
        }
    }
}

/// What a command run produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(message: impl Into<String>) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: message.into(),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::Usage(_)
        | Error::DimensionMismatch { .. }
        | Error::TruncationMismatch { .. } => 2,
        _ => 1,
    }
}

fn error_outcome(context: &str, e: &Error) -> Outcome {
    Outcome {
        code: exit_code(e),
        stdout: String::new(),
        stderr: format!("{context}: {e}\n"),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome::usage(text)
            };
        }
    };
    match &args.command {
        Command::Analyze { files } => {
            if files.is_empty() {
                return Outcome::usage("analyze needs at least one FILE\n");
            }
            let mut out = Outcome {
                code: 0,
                stdout: String::new(),
                stderr: String::new(),
            };
            for f in files {
                let o = match read(f) {
                    Ok(doc) => analyze_outcome(&f.display().to_string(), &doc, args.format),
                    Err(e) => error_outcome(&f.display().to_string(), &e),
                };
                out.code = out.code.max(o.code);
                out.stdout.push_str(&o.stdout);
                out.stderr.push_str(&o.stderr);
            }
            out
        }
        Command::Build { file } => match read(file) {
            Ok(doc) => build_outcome(&doc, args.format),
            Err(e) => error_outcome(&file.display().to_string(), &e),
        },
        Command::Compare { first, second } => {
            let docs = read(first).and_then(|a| Ok((a, read(second)?)));
            match docs {
                Ok((a, b)) => {
                    let label = format!("compare {} {}", first.display(), second.display());
                    match cmd_compare(&label, &a, &b) {
                        Ok(r) => report_outcome(&r, args.format),
                        Err(e) => error_outcome(&label, &e),
                    }
                }
                Err(e) => error_outcome("compare", &e),
            }
        }
        Command::Verify { suites } => {
            if suites.is_empty() {
                return Outcome::usage(format!(
                    "verify needs a suite name, one of: {}\n",
                    SUITES.join(", ")
                ));
            }
            match cmd_verify(suites, args.seed, args.trials) {
                Ok(r) => report_outcome(&r, args.format),
                Err(e) => error_outcome("verify", &e),
            }
        }
    }
}

fn read(path: &PathBuf) -> crate::Result<Document> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    io::parse_document(&text)
}

fn report_outcome(r: &Report, format: Format) -> Outcome {
    Outcome {
        code: if r.passed() { 0 } else { 1 },
        stdout: r.render(format),
        stderr: String::new(),
    }
}

fn analyze_outcome(label: &str, doc: &Document, format: Format) -> Outcome {
    match cmd_analyze(&format!("analyze {label}"), doc) {
        Ok(r) => report_outcome(&r, format),
        Err(e) => error_outcome(label, &e),
    }
}

fn scalars(v: &[crate::Scalar]) -> Value {
    Value::from(v.iter().map(format_scalar).collect::<Vec<_>>())
}

fn check_result<T>(name: &str, r: crate::Result<T>) -> (Check, Option<T>) {
    match r {
        Ok(v) => (Check::pass(name), Some(v)),
        Err(e) => (Check::fail(name, e.to_string()), None),
    }
}

/// Every proper nonempty subset for small n, singletons beyond.
fn subsets(n: usize) -> Vec<Vec<usize>> {
    if n > 6 {
        return (0..n).map(|i| vec![i]).collect();
    }
    (1..(1usize << n) - 1)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
        .collect()
}

fn analyze_star(s: &StarPresentation, checks: &mut Vec<Check>) -> crate::Result<Value> {
    let validation = s.validate();
    checks.extend(validation.checks.iter().cloned());
    let mut data = json!({
        "kind": "star",
        "n": s.n(),
        "levels": s.q(),
        "dim": s.dim(),
    });
    if !validation.is_valid() {
        return Ok(data);
    }
    let spectrum = s.spectrum()?;
    data["spectrum"] = json!(spectrum.rows());
    let fiber = s.fiber_algebra()?;
    let embedding = s.embedding_dimension()?;
    data["fiber"] = json!(fiber);
    data["embedding_dimension"] = json!(embedding);
    data["oblate"] = json!(embedding <= 2);
    checks.push(Check::from_option(
        "fiber is K[X]/(X^n) iff embedding dimension <= 2",
        (fiber.oblate != (embedding <= 2)).then(|| {
            format!(
                "fiber verdict {} with embedding dimension {embedding}",
                fiber.oblate
            )
        }),
    ));
    if embedding > 2 {
        data["skipped"] = json!("lambda, unit constants and substar ideals need an oblate star");
        return Ok(data);
    }
    let (c, lambda) = check_result("lambda: dim J = n-1, no zero coordinate", s.lambda());
    checks.push(c);
    if let Some(l) = &lambda {
        data["lambda"] = scalars(l);
    }
    let (c, _) = check_result("unit-constant laws", s.unit_constants());
    checks.push(c);
    for subset in subsets(s.n()) {
        let name = format!(
            "ideal of components {:?} is principal",
            subset.iter().map(|i| i + 1).collect::<Vec<_>>()
        );
        checks.push(check_result(&name, s.substar_ideal(&subset)).0);
    }
    Ok(data)
}

fn analyze_deformation(d: &DeformPresentation, checks: &mut Vec<Check>) -> crate::Result<Value> {
    let validation = d.validate();
    checks.extend(validation.checks.iter().cloned());
    let mut data = json!({
        "kind": "deformation",
        "n": d.n(),
        "xdeg": d.xdeg(),
        "levels": d.q(),
        "dim": d.dim(),
    });
    if !validation.is_valid() {
        return Ok(data);
    }
    data["spectrum"] = json!(d.spectrum()?.rows());
    let (c, lambda) = check_result("lambda: dim J = n-1, no zero coordinate", d.lambda());
    checks.push(c);
    if let Some(l) = &lambda {
        data["lambda"] = scalars(l);
    }
    checks.push(
        check_result(
            "unit constants are constant and obey their laws",
            d.unit_constants(),
        )
        .0,
    );
    checks.push(d.curve_ideal_check()?);
    for k in 0..d.n() {
        checks.push(d.substar_ideal_check(&[k])?);
    }
    let (c, ex) = check_result(
        "t-only slice is an oblate star with the same spectrum",
        extract_star(d),
    );
    checks.push(c);
    if let Some(ex) = ex {
        data["extracted_star"] = json!({ "levels": ex.star.q(), "dim": ex.star.dim() });
        checks.extend(ex.checks);
    }
    Ok(data)
}

pub fn cmd_analyze(command: &str, doc: &Document) -> crate::Result<Report> {
    let start = Instant::now();
    let mut checks = Vec::new();
    let built = doc.presentation();
    let presentation = match built {
        Ok(p) => p,
        // a script whose steps are refused is a mathematical failure
        Err(e) if matches!(doc, Document::BuilderScript(_)) && exit_code(&e) == 1 => {
            checks.push(Check::fail("script builds", e.to_string()));
            return Ok(Report::new(command.into(), checks, json!({}), None, start));
        }
        Err(e) => return Err(e),
    };
    let seed = match doc {
        Document::Star(d) => d.metadata.as_ref().and_then(|m| m.seed),
        Document::Deformation(d) => d.metadata.as_ref().and_then(|m| m.seed),
        Document::BuilderScript(d) => d.metadata.as_ref().and_then(|m| m.seed),
    };
    let data = match &presentation {
        Presentation::Star(s) => analyze_star(s, &mut checks)?,
        Presentation::Deformation(d) => analyze_deformation(d, &mut checks)?,
    };
    Ok(Report::new(command.into(), checks, data, seed, start))
}

/// Runs a builder script; the output document records the script as its
/// provenance.
pub fn cmd_build(doc: &Document) -> crate::Result<Document> {
    let Document::BuilderScript(script) = doc else {
        return Err(Error::Usage(
            "build expects a builder-script document".into(),
        ));
    };
    let presentation = script.build()?;
    let metadata = Metadata {
        seed: script.metadata.as_ref().and_then(|m| m.seed),
        provenance: Some(script.provenance()),
    };
    Ok(Document::from_presentation(&presentation, Some(metadata)))
}

fn build_outcome(doc: &Document, format: Format) -> Outcome {
    match cmd_build(doc) {
        Ok(out) => {
            let stdout = match format {
                Format::Json => io::emit_document(&out),
                Format::Text => match out.presentation() {
                    Ok(Presentation::Star(s)) => format!(
                        "built a {}-star with levels {:?} and dim {}\n",
                        s.n(),
                        s.q(),
                        s.dim()
                    ),
                    Ok(Presentation::Deformation(d)) => format!(
                        "built a {}-component deformation with levels {:?}, xdeg {} and dim {}\n",
                        d.n(),
                        d.q(),
                        d.xdeg(),
                        d.dim()
                    ),
                    Err(e) => format!("built document does not re-parse: {e}\n"),
                },
            };
            Outcome {
                code: 0,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => error_outcome("build", &e),
    }
}

fn as_star(doc: &Document) -> crate::Result<StarPresentation> {
    match doc.presentation()? {
        Presentation::Star(s) => Ok(s),
        Presentation::Deformation(_) => Err(Error::Usage("compare works on stars".into())),
    }
}

pub fn cmd_compare(command: &str, a: &Document, b: &Document) -> crate::Result<Report> {
    let start = Instant::now();
    let (a, b) = (as_star(a)?, as_star(b)?);
    let rep = compare_stars(&a, &b)?;
    let mut checks = rep.checks.clone();
    let mut data = json!({ "comparison": rep });
    if let Some((sub, sup)) = rep.strict_pair() {
        let stars = [&a, &b];
        let w = nonflatness_witness(stars[sub], stars[sup])?;
        checks.push(Check::from_option(
            "non-flatness witness: uv = 0 and phi(u x v) != 0",
            (!w.certified()).then(|| format!("{w:?}")),
        ));
        data["nonflatness"] = json!(w);
    }
    Ok(Report::new(command.into(), checks, data, None, start))
}

pub fn cmd_verify(suites: &[String], seed: u64, trials: usize) -> crate::Result<Report> {
    let start = Instant::now();
    let mut checks = Vec::new();
    let mut outcomes = Vec::new();
    for name in suites {
        let o = run_suite(name, seed, trials)?;
        let name_line = format!("{name}: {}/{} trials pass", o.passed, o.trials - o.skipped);
        checks.push(Check::from_option(
            name_line,
            o.failures
                .first()
                .map(|f| format!("trial {}: {}", f.trial, f.message)),
        ));
        outcomes.push(o);
    }
    let command = format!("verify {}", suites.join(" "));
    Ok(Report::new(
        command,
        checks,
        json!({ "suites": outcomes, "trials": trials }),
        Some(seed),
        start,
    ))
}
