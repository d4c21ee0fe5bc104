//! Randomized property suites behind `starforge verify`.
//!
//! Every trial draws from its own seed, derived from the run seed and the
//! trial index, so a failing trial can be rerun alone. Tower-based failures
//! are shrunk to a short builder script before they are reported.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::build::{
    analyze_quotient, degenerate_step, random_step, random_tower_script, StarBase, TowerScript,
};
use crate::compare::{
    compare_stars, ideal_filtration, nonflatness_witness, random_maximal_ideal_element,
    random_transverse_element, shrink, Verdict,
};
use crate::deform::{
    cancel_basic, check_basic_completion, extend_deformation, extract_star, induced_cocycle,
    planes, random_cancellation_pair, random_t_only_member, ribbon_check, DeformStep,
    ThetaAutomorphism,
};
use crate::error::{Error, Result};
use crate::io::{emit_document, Document, ScriptDocument};
use crate::kernel::{int, BiPoly, Scalar};
use crate::star::{initial, lines, StarPresentation};

pub const SUITES: &[&str] = &[
    "ultrametric",
    "lambda-laws",
    "unit-constants",
    "constructor",
    "oblateness",
    "substar-ideals",
    "filtration",
    "nesting",
    "theta-mult",
    "cocycle",
    "basic",
    "extraction",
];

#[derive(Clone, Debug, Serialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub seed: u64,
    pub message: String,
    /// A builder script (for tower suites) or the offending inputs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reproducer: Option<Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub trials: usize,
    pub passed: usize,
    /// Trials whose random input could not be generated.
    pub skipped: usize,
    pub failures: Vec<TrialFailure>,
}

enum Trial {
    Pass,
    Skip,
    Fail(String, Option<Value>),
}

pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    // splitmix64 step, so neighbouring seeds give unrelated streams
    let mut z = seed.wrapping_add((trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn run_suite(name: &str, seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let runner: fn(u64) -> Trial = match name {
        "ultrametric" => |s| tower_trial(s, ultrametric),
        "lambda-laws" => |s| tower_trial(s, lambda_laws),
        "unit-constants" => |s| tower_trial(s, unit_constant_laws),
        "constructor" => |s| tower_trial(s, constructor),
        "oblateness" => |s| tower_trial(s, oblateness),
        "substar-ideals" => |s| tower_trial(s, substar_ideals),
        "filtration" => |s| tower_trial(s, filtration),
        "nesting" => |s| tower_trial(s, nesting),
        "theta-mult" => theta_mult,
        "cocycle" => cocycle,
        "basic" => basic,
        "extraction" => extraction,
        _ => {
            return Err(Error::Usage(format!(
                "unknown suite {name:?}; known suites: {}",
                SUITES.join(", ")
            )))
        }
    };
    let mut out = SuiteOutcome {
        suite: name.to_string(),
        trials,
        passed: 0,
        skipped: 0,
        failures: Vec::new(),
    };
    for trial in 0..trials {
        let s = trial_seed(seed, trial);
        match runner(s) {
            Trial::Pass => out.passed += 1,
            Trial::Skip => out.skipped += 1,
            Trial::Fail(message, reproducer) => out.failures.push(TrialFailure {
                trial,
                seed: s,
                message,
                reproducer,
            }),
        }
    }
    Ok(out)
}

/// Shortens a failing tower script: drops trailing steps, then lowers
/// orders one at a time, keeping each change only while `fails` holds.
pub fn shrink_script(script: &TowerScript, fails: impl Fn(&TowerScript) -> bool) -> TowerScript {
    let mut cur = script.clone();
    while !cur.steps.is_empty() {
        let mut c = cur.clone();
        c.steps.pop();
        if !fails(&c) {
            break;
        }
        cur = c;
    }
    loop {
        let mut improved = false;
        if let StarBase::Pair { p } = cur.base {
            if p > 1 {
                let mut c = cur.clone();
                c.base = StarBase::Pair { p: p - 1 };
                if fails(&c) {
                    cur = c;
                    improved = true;
                }
            }
        }
        for k in 0..cur.steps.len() {
            for i in 0..cur.steps[k].p_new.len() {
                while cur.steps[k].p_new[i] > 1 {
                    let mut c = cur.clone();
                    c.steps[k].p_new[i] -= 1;
                    if !fails(&c) {
                        break;
                    }
                    cur = c;
                    improved = true;
                }
            }
        }
        if !improved {
            return cur;
        }
    }
}

type Property = fn(&StarPresentation, &mut ChaCha8Rng) -> Result<Option<String>>;

fn check(s: &StarPresentation, seed: u64, prop: Property) -> Option<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match prop(s, &mut rng) {
        Ok(v) => v,
        Err(e) => Some(e.to_string()),
    }
}

fn tower_trial(seed: u64, prop: Property) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=5);
    let script = match random_tower_script(rng.gen(), n, 3) {
        Ok(t) => t,
        Err(Error::GenerationFailed { .. }) => return Trial::Skip,
        Err(e) => return Trial::Fail(format!("tower generation: {e}"), None),
    };
    let prop_seed = rng.gen();
    let fails = |t: &TowerScript| match t.build() {
        Ok(s) => check(&s, prop_seed, prop).is_some(),
        Err(_) => false,
    };
    let star = match script.build() {
        Ok(s) => s,
        Err(e) => return Trial::Fail(format!("tower does not rebuild: {e}"), None),
    };
    let Some(message) = check(&star, prop_seed, prop) else {
        return Trial::Pass;
    };
    let small = shrink_script(&script, fails);
    let doc = Document::BuilderScript(ScriptDocument::from_tower(&small, Some(prop_seed)));
    let reproducer = serde_json::from_str(&emit_document(&doc)).ok();
    Trial::Fail(message, reproducer)
}

fn first<T: std::fmt::Debug>(what: &str, v: Option<T>) -> Option<String> {
    v.map(|w| format!("{what}: {w:?}"))
}

fn ultrametric(s: &StarPresentation, _: &mut ChaCha8Rng) -> Result<Option<String>> {
    let p = s.spectrum()?;
    Ok(first(
        "ultrametric inequality fails at (i, j, k)",
        p.ultrametric_violation(),
    )
    .or_else(|| first("sum_j p_ij != q_i at row", p.consistency_violation(s.q()))))
}

fn lambda_laws(s: &StarPresentation, _: &mut ChaCha8Rng) -> Result<Option<String>> {
    let lambda = s.lambda()?;
    let table = s.unit_constant_table()?;
    Ok(table
        .violations(Some(&lambda))
        .into_iter()
        .find(|v| v.starts_with("lambda")))
}

fn unit_constant_laws(s: &StarPresentation, _: &mut ChaCha8Rng) -> Result<Option<String>> {
    Ok(s.unit_constant_table()?.violations(None).into_iter().next())
}

fn constructor(s: &StarPresentation, rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let step = random_step(s, rng, 3)?;
    let rep = analyze_quotient(s, &step)?;
    if !rep.certified() || rep.dim != rep.q_new {
        return Ok(Some(format!("nondegenerate step {step:?} gave {rep:?}")));
    }
    match degenerate_step(s, rng) {
        Ok(step) => {
            let rep = analyze_quotient(s, &step)?;
            if rep.below_top_nonzero {
                return Ok(Some(format!(
                    "degenerate step {step:?} kept t_n^(q_n - 1) nonzero"
                )));
            }
        }
        // no balanced orders exist when q_n is not the largest level
        Err(Error::GenerationFailed { .. } | Error::Usage(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(None)
}

fn oblateness(s: &StarPresentation, rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let e = s.embedding_dimension()?;
    let f = s.fiber_algebra()?;
    if !f.oblate || e > 2 {
        return Ok(Some(format!(
            "tower star has fiber {f:?} and embedding dimension {e}"
        )));
    }
    let n = rng.gen_range(3..=5);
    let init = initial(n)?;
    let (e, f) = (init.embedding_dimension()?, init.fiber_algebra()?);
    Ok((e != n || f.oblate)
        .then(|| format!("initial({n}) has embedding dimension {e} and fiber {f:?}")))
}

fn substar_ideals(s: &StarPresentation, _: &mut ChaCha8Rng) -> Result<Option<String>> {
    let n = s.n();
    for mask in 1..(1usize << n) - 1 {
        let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if let Err(e) = s.substar_ideal(&subset) {
            return Ok(Some(format!("subset {subset:?}: {e}")));
        }
    }
    Ok(None)
}

fn filtration(s: &StarPresentation, rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let k = rng.gen_range(1..=2);
    let gens = (0..k)
        .map(|_| random_maximal_ideal_element(s, rng))
        .collect::<Result<Vec<_>>>()?;
    if gens
        .iter()
        .all(|g| g.components.iter().all(|c| c.is_zero()))
    {
        return Ok(None);
    }
    let rep = ideal_filtration(s, &gens)?;
    Ok((!rep.certified()).then(|| format!("filtration of {gens:?} failed: {rep:?}")))
}

fn nesting(s: &StarPresentation, rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let w = random_transverse_element(s, rng)?;
    // the maximal ideal of the p = 1 pair star is zero at these truncations
    if w.components.iter().all(|c| c.is_zero()) {
        return Ok(None);
    }
    let sub = shrink(s, &w)?;
    let rep = compare_stars(&sub, s)?;
    if rep.verdict != Verdict::FirstInSecond || rep.checks.iter().any(|c| !c.passed) {
        return Ok(Some(format!("shrinking by {w} gave {rep:?}")));
    }
    let wit = nonflatness_witness(&sub, s)?;
    Ok((!wit.certified()).then(|| format!("witness not certified: {wit:?}")))
}

fn grid<R: Rng>(rng: &mut R, xdeg: usize, trunc: usize) -> BiPoly {
    let c: Vec<Scalar> = (0..xdeg * trunc)
        .map(|_| int(rng.gen_range(-3..=3)))
        .collect();
    BiPoly::new(xdeg, trunc, c).expect("sizes match")
}

fn poly_json(p: &BiPoly) -> Value {
    serde_json::to_value(p).unwrap_or(Value::Null)
}

/// θ(fg) = θ(f)θ(g) inside the x-window, and θ fixes t.
fn theta_mult(seed: u64) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 6;
    let p = rng.gen_range(1..=4);
    let n = p + 1;
    let df = rng.gen_range(1..d);
    let f = grid(&mut rng, df, n).rexdeg(d);
    let g = grid(&mut rng, d - df, n).rexdeg(d);
    let mu = grid(&mut rng, 2, p).rexdeg(d);
    let th = ThetaAutomorphism::new(p, &mu);
    let run = || -> Result<bool> {
        let lhs = th.apply(&f.mul(&g)?)?;
        let rhs = th.apply(&f)?.mul(&th.apply(&g)?)?;
        let t = BiPoly::monomial(int(1), 0, 1, d, n);
        Ok(lhs == rhs && th.apply(&t)? == t)
    };
    match run() {
        Ok(true) => Trial::Pass,
        Ok(false) => Trial::Fail(
            format!("theta is not multiplicative at p = {p}"),
            Some(json!({ "p": p, "mu": poly_json(&mu), "f": poly_json(&f), "g": poly_json(&g) })),
        ),
        Err(e) => Trial::Fail(e.to_string(), None),
    }
}

/// The ribbon of two θ's congruent below t^{p−1} is the shear by τ.
fn cocycle(seed: u64) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = rng.gen_range(1..=4);
    let xdeg = 3;
    let mu1 = grid(&mut rng, 2, p).rexdeg(xdeg);
    let mut mu2 = mu1.clone();
    for a in 0..2 {
        mu2.set(a, p - 1, int(rng.gen_range(-3..=3)));
    }
    let run = || -> Result<Option<String>> {
        if !ribbon_check(p, xdeg)?.certified() {
            return Ok(Some(format!("ribbon map at p = {p} is not certified")));
        }
        let rec = induced_cocycle(p, &mu1, &mu2)?;
        Ok((!rec.holds()).then(|| format!("cocycle fails: {rec:?}")))
    };
    match run() {
        Ok(None) => Trial::Pass,
        Ok(Some(m)) => Trial::Fail(
            m,
            Some(json!({ "p": p, "mu1": poly_json(&mu1), "mu2": poly_json(&mu2) })),
        ),
        Err(e) => Trial::Fail(e.to_string(), None),
    }
}

fn distinct_slopes<R: Rng>(rng: &mut R, n: usize) -> Vec<Scalar> {
    let mut c: Vec<i64> = Vec::with_capacity(n);
    while c.len() < n {
        let v = rng.gen_range(-5..=5);
        if !c.contains(&v) {
            c.push(v);
        }
    }
    c.into_iter().map(int).collect()
}

/// Basic completion on planes and cancellation of basic elements.
fn basic(seed: u64) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=4);
    let c = distinct_slopes(&mut rng, n);
    let run = |rng: &mut ChaCha8Rng| -> Result<Option<String>> {
        let d = planes(&c, 3)?;
        let head: Vec<usize> = (0..n - 1).collect();
        let v = random_t_only_member(&d, rng, &head)?;
        check_basic_completion(&d, &v)?;
        let (u, v) = random_cancellation_pair(&d, rng)?;
        match cancel_basic(&d, &u, &v) {
            Ok(dec) if dec.order.contains(&0) => {
                Ok(Some(format!("cancellation order {:?}", dec.order)))
            }
            // uv vanishing on a coordinate is outside the lemma
            Ok(_) | Err(Error::Usage(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    match run(&mut rng) {
        Ok(None) => Trial::Pass,
        Ok(Some(m)) => Trial::Fail(m, Some(json!({ "slopes": slope_json(&c) }))),
        Err(e) => Trial::Fail(e.to_string(), Some(json!({ "slopes": slope_json(&c) }))),
    }
}

fn slope_json(c: &[Scalar]) -> Value {
    json!(c
        .iter()
        .map(crate::kernel::scalar::format_scalar)
        .collect::<Vec<_>>())
}

/// The t-only slice of planes is the lines star, and extraction commutes
/// with one constant-unit extension.
fn extraction(seed: u64) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=4);
    let c = distinct_slopes(&mut rng, n);
    let run = |rng: &mut ChaCha8Rng| -> Result<Option<String>> {
        let d = planes(&c, 2)?;
        let s = lines(&c)?;
        let ex = extract_star(&d)?;
        if ex.star != s {
            return Ok(Some("extract(planes) differs from lines".into()));
        }
        let step = random_step(&s, rng, 2)?;
        let Some(d2) = extend_deformation(&d, &DeformStep::from_star_step(&step, 2))?.completion
        else {
            return Ok(Some(format!(
                "constant step {step:?} has no free completion"
            )));
        };
        let s2 = crate::build::extend_star(&s, &step)?;
        if extract_star(&d2)?.star != s2 {
            return Ok(Some(format!("extraction does not commute with {step:?}")));
        }
        Ok(None)
    };
    match run(&mut rng) {
        Ok(None) => Trial::Pass,
        Ok(Some(m)) => Trial::Fail(m, Some(json!({ "slopes": slope_json(&c) }))),
        Err(Error::GenerationFailed { .. }) => Trial::Skip,
        Err(e) => Trial::Fail(e.to_string(), Some(json!({ "slopes": slope_json(&c) }))),
    }
}
