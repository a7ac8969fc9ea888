//! Argument definitions and command dispatch for the `hv` binary.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use hv_core::algebra::{bracket, diffop_product, Element, Tag};
use hv_core::automorphisms::{factor_automorphism, lift_automorphism_to_hv, verify_group_laws, AutWord};
use hv_core::cohomology::{extract_class, solve_cubic_fe, solve_linear_fe, verify_cocycle};
use hv_core::derivations::{
    decompose_degree0, default_probes, derive, lift_derivation_to_hv, Derivation,
};
use hv_core::foundations::{GroupInstance, GroupKind};
use hv_core::lift::CentralLift;
use hv_core::sample::Sampler;
use hv_core::{Error, Result};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::parser::parse_element;
use crate::specs::{
    class_to_json, cocycle_from_text, derivation_from_json, element_to_json, inner_from_json, parse_json,
    theta_from_json, word_from_json, word_to_json,
};
use crate::suites::run_suite;

#[derive(Debug, Parser)]
#[command(name = "hv", version, about = "Exact computations in Witt, differential-operator and Heisenberg-Virasoro algebras")]
pub struct Cli {
    /// Run configuration (JSON); falls back to $HV_CONFIG, then the built-in default.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algebra {
    Hv,
    W,
    D,
    D1,
}

impl From<Algebra> for Tag {
    fn from(a: Algebra) -> Tag {
        match a {
            Algebra::Hv => Tag::HV,
            Algebra::W => Tag::W,
            Algebra::D => Tag::D,
            Algebra::D1 => Tag::D1,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lie bracket of two elements.
    Bracket {
        lhs: String,
        rhs: String,
        #[arg(long, value_enum, default_value = "hv")]
        algebra: Algebra,
    },
    /// Associative product in the differential-operator algebra.
    Product { lhs: String, rhs: String },
    /// Applies an automorphism or derivation to an element.
    Apply(ApplyArgs),
    /// 2-cocycles on D1 and W.
    #[command(subcommand)]
    Cocycle(CocycleCommand),
    /// Derivations of D1 and their lifts.
    #[command(subcommand)]
    Der(DerCommand),
    /// Automorphisms of D1 and their lifts.
    #[command(subcommand)]
    Aut(AutCommand),
    /// Runs the verification suites.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        /// Writes the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("morphism").required(true).args(["theta", "inner", "der"])))]
pub struct ApplyArgs {
    #[arg(long)]
    pub theta: Option<String>,
    #[arg(long)]
    pub inner: Option<String>,
    #[arg(long)]
    pub der: Option<String>,
    pub element: String,
    /// `hv` applies the central lift of the map.
    #[arg(long, value_enum, default_value = "d1")]
    pub algebra: Algebra,
}

#[derive(Debug, Subcommand)]
pub enum CocycleCommand {
    /// Evaluates a cocycle on a pair.
    Eval { cocycle: String, u: String, v: String },
    /// Samples antisymmetry and the cocycle identity.
    Verify {
        cocycle: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Reads off the cohomology class (a, b, c).
    Extract { cocycle: String },
    /// Solves a functional equation on a finite window.
    Oracle {
        #[arg(value_enum)]
        equation: Equation,
        #[arg(long, default_value_t = 10)]
        window: i64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Equation {
    Cubic,
    Linear,
}

#[derive(Debug, Subcommand)]
pub enum DerCommand {
    /// Applies a derivation to a D1 element.
    Apply { der: String, element: String },
    /// Samples the Leibniz defect.
    Check {
        der: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Splits a degree-zero derivation into (mu, a, b, c0).
    Decompose { der: String },
    /// Prints the central action of the lift, and its value on an element.
    Lift { der: String, element: Option<String> },
}

#[derive(Debug, Subcommand)]
pub enum AutCommand {
    /// Applies a word to a D1 element.
    Apply { word: String, element: String },
    /// Prints `first ∘ second`.
    Compose { first: String, second: String },
    Invert { word: String },
    /// Recovers the factorization of a word from its action on probes.
    Factor { word: String },
    Lift { word: String, element: Option<String> },
    /// Samples the group-law checks.
    Laws {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// A command result: one canonical text line, one JSON value, and whether
/// every check it ran passed.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub passed: bool,
}

impl Outcome {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Outcome {
            text: text.into(),
            json,
            passed: true,
        }
    }

    fn element(e: &Element) -> Self {
        Outcome::ok(e.to_string(), element_to_json(e))
    }

    /// Process exit status: 0 pass, 1 failed check.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

fn lift_json(lift: &CentralLift, image: Option<Element>) -> (String, Value) {
    let matrix: Vec<Vec<String>> = lift
        .matrix()
        .iter()
        .map(|row| row.iter().map(|s| s.to_string()).collect())
        .collect();
    let centrals: Vec<String> = (0..3).map(|j| lift.central_image(j).to_string()).collect();
    let text = match &image {
        Some(e) => e.to_string(),
        None => format!("C_L -> {}; C_I -> {}; C_LI -> {}", centrals[0], centrals[1], centrals[2]),
    };
    let mut v = json!({"central": centrals, "matrix": matrix});
    if let Some(e) = image {
        v["image"] = element_to_json(&e);
    }
    (text, v)
}

fn integer_window_group(g: &GroupInstance) -> GroupInstance {
    match g.kind() {
        GroupKind::Z => g.clone(),
        _ => GroupInstance::integers(),
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let config = RunConfig::resolve(cli.config.as_deref())?;
    if let Command::Verify { seed, json } = &cli.command {
        let mut config = config;
        if seed.is_some() {
            config.seed = *seed;
        }
        let report = run_suite(&config)?;
        let mut lines = report.summary_lines();
        lines.push(if report.passed { "all suites passed".into() } else { "FAILED".into() });
        let body = report.to_json();
        if let Some(path) = json.as_ref().or(config.output.as_ref()) {
            std::fs::write(path, &body)
                .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        }
        return Ok(Outcome {
            text: lines.join("\n"),
            json: serde_json::from_str(&body).expect("report JSON"),
            passed: report.passed,
        });
    }

    let g = config.primary_group()?;
    let seed = config.seed();
    let g = &g;
    match &cli.command {
        Command::Verify { .. } => unreachable!("handled above"),
        Command::Bracket { lhs, rhs, algebra } => {
            let tag = Tag::from(*algebra);
            let (u, v) = (parse_element(lhs, g, tag)?, parse_element(rhs, g, tag)?);
            Ok(Outcome::element(&bracket(g, &u, &v)?))
        }
        Command::Product { lhs, rhs } => {
            let (u, v) = (parse_element(lhs, g, Tag::D)?, parse_element(rhs, g, Tag::D)?);
            Ok(Outcome::element(&diffop_product(g, &u, &v)?))
        }
        Command::Apply(args) => apply(g, args, seed),
        Command::Cocycle(c) => cocycle(g, c, seed),
        Command::Der(d) => der(g, d, seed),
        Command::Aut(a) => aut(g, a, seed),
    }
}

fn apply(g: &GroupInstance, args: &ApplyArgs, seed: u64) -> Result<Outcome> {
    let tag = Tag::from(args.algebra);
    if tag != Tag::D1 && tag != Tag::HV {
        return Err(Error::Config("apply acts on d1 or hv".into()));
    }
    let u = parse_element(&args.element, g, tag)?;
    if let Some(text) = &args.der {
        let d = derivation_from_json(g, &parse_json(text)?)?;
        let out = match tag {
            Tag::HV => lift_derivation_to_hv(g, &d, Some(seed))?.apply(&u)?,
            _ => derive(g, &d, &u)?,
        };
        return Ok(Outcome::element(&out));
    }
    let word = match (&args.theta, &args.inner) {
        (Some(t), _) => AutWord::new(hv_core::automorphisms::InnerAut::identity(), theta_from_json(g, &parse_json(t)?)?),
        (None, Some(i)) => AutWord::new(inner_from_json(g, &parse_json(i)?)?, hv_core::automorphisms::ThetaAut::identity(g)),
        (None, None) => unreachable!("clap requires one morphism"),
    };
    let out = match tag {
        Tag::HV => lift_automorphism_to_hv(g, &word, Some(seed))?.apply(&u)?,
        _ => word.apply(g, &u)?,
    };
    Ok(Outcome::element(&out))
}

fn cocycle(g: &GroupInstance, cmd: &CocycleCommand, seed: u64) -> Result<Outcome> {
    match cmd {
        CocycleCommand::Eval { cocycle, u, v } => {
            let spec = cocycle_from_text(g, cocycle)?;
            let (u, v) = (parse_element(u, g, spec.domain())?, parse_element(v, g, spec.domain())?);
            let value = spec.eval(g, &u, &v);
            Ok(Outcome::ok(value.to_string(), json!({"value": value.to_string()})))
        }
        CocycleCommand::Verify { cocycle, samples, seed: s } => {
            let spec = cocycle_from_text(g, cocycle)?;
            let report = verify_cocycle(g, |u, v| spec.eval(g, u, v), *samples, s.unwrap_or(seed), spec.domain())?;
            let witness = report.witness.as_ref().map(|w| {
                json!({
                    "check": format!("{:?}", w.check),
                    "u": w.u.to_string(),
                    "v": w.v.to_string(),
                    "w": w.w.to_string(),
                    "defect": w.defect.to_string(),
                })
            });
            let text = match &report.witness {
                None => format!("pass: {} samples", report.samples),
                Some(w) => format!(
                    "FAIL: {} of {} samples; {:?} at u = {}, v = {}, w = {}",
                    report.failures, report.samples, w.check, w.u, w.v, w.w
                ),
            };
            Ok(Outcome {
                text,
                json: json!({"samples": report.samples, "failures": report.failures, "witness": witness}),
                passed: report.passed(),
            })
        }
        CocycleCommand::Extract { cocycle } => {
            let spec = cocycle_from_text(g, cocycle)?;
            if spec.domain() != Tag::D1 {
                return Err(Error::Config("extract takes a cocycle on D1".into()));
            }
            let class = extract_class(g, |u, v| spec.eval(g, u, v))?;
            Ok(Outcome::ok(
                format!("a = {}, b = {}, c = {}", class.a, class.b, class.c),
                class_to_json(&class),
            ))
        }
        CocycleCommand::Oracle { equation, window } => {
            let sol = match equation {
                Equation::Cubic => solve_cubic_fe(*window)?,
                Equation::Linear => solve_linear_fe(*window, &integer_window_group(g))?,
            };
            let basis: Vec<Vec<String>> = sol
                .basis
                .iter()
                .map(|b| b.iter().map(|s| s.to_string()).collect())
                .collect();
            Ok(Outcome {
                text: format!("dimension {} on window {}", sol.dimension, sol.window),
                json: json!({
                    "dimension": sol.dimension,
                    "basis": basis,
                    "window": sol.window,
                    "equations": sol.equations,
                    "matches_closed_form": sol.matches_closed_form,
                }),
                passed: sol.dimension == 2 && sol.matches_closed_form,
            })
        }
    }
}

fn parse_der(g: &GroupInstance, text: &str) -> Result<Derivation> {
    derivation_from_json(g, &parse_json(text)?)
}

fn der(g: &GroupInstance, cmd: &DerCommand, seed: u64) -> Result<Outcome> {
    match cmd {
        DerCommand::Apply { der, element } => {
            let d = parse_der(g, der)?;
            Ok(Outcome::element(&derive(g, &d, &parse_element(element, g, Tag::D1)?)?))
        }
        DerCommand::Check { der, samples, seed: s } => {
            let d = parse_der(g, der)?;
            let mut sampler = Sampler::new(s.unwrap_or(seed));
            let mut failures = 0;
            let mut witness = None;
            for _ in 0..*samples {
                let (u, v) = (sampler.element(g, Tag::D1), sampler.element(g, Tag::D1));
                let defect = hv_core::derivations::leibniz_defect(g, &d, &u, &v)?;
                if !defect.is_zero() {
                    failures += 1;
                    witness.get_or_insert(json!({"u": u.to_string(), "v": v.to_string(), "defect": defect.to_string()}));
                }
            }
            Ok(Outcome {
                text: format!("{}: {failures} of {samples} samples failed", if failures == 0 { "pass" } else { "FAIL" }),
                json: json!({"samples": samples, "failures": failures, "witness": witness}),
                passed: failures == 0,
            })
        }
        DerCommand::Decompose { der } => {
            let d = parse_der(g, der)?;
            let dec = decompose_degree0(g, &d, &default_probes(g))?;
            let mu: Vec<String> = dec.mu.images().iter().map(|s| s.to_string()).collect();
            Ok(Outcome::ok(
                format!("mu = [{}], a = {}, b = {}, c0 = {}", mu.join(", "), dec.a, dec.b, dec.c0),
                json!({"mu": mu, "a": dec.a.to_string(), "b": dec.b.to_string(), "c0": dec.c0.to_string()}),
            ))
        }
        DerCommand::Lift { der, element } => {
            let d = parse_der(g, der)?;
            let lift = lift_derivation_to_hv(g, &d, Some(seed))?;
            let image = match element {
                Some(e) => Some(lift.apply(&parse_element(e, g, Tag::HV)?)?),
                None => None,
            };
            let (text, json) = lift_json(&lift, image);
            Ok(Outcome::ok(text, json))
        }
    }
}

fn parse_word(g: &GroupInstance, text: &str) -> Result<AutWord> {
    word_from_json(g, &parse_json(text)?)
}

fn word_outcome(w: &AutWord) -> Outcome {
    let json = word_to_json(w);
    Outcome::ok(json.to_string(), json)
}

fn aut(g: &GroupInstance, cmd: &AutCommand, seed: u64) -> Result<Outcome> {
    match cmd {
        AutCommand::Apply { word, element } => {
            let w = parse_word(g, word)?;
            Ok(Outcome::element(&w.apply(g, &parse_element(element, g, Tag::D1)?)?))
        }
        AutCommand::Compose { first, second } => {
            Ok(word_outcome(&parse_word(g, first)?.compose(&parse_word(g, second)?)))
        }
        AutCommand::Invert { word } => Ok(word_outcome(&parse_word(g, word)?.inverse())),
        AutCommand::Factor { word } => {
            let w = parse_word(g, word)?;
            Ok(word_outcome(&factor_automorphism(g, |s| w.on_symbol(g, s), &default_probes(g))?))
        }
        AutCommand::Lift { word, element } => {
            let w = parse_word(g, word)?;
            let lift = lift_automorphism_to_hv(g, &w, Some(seed))?;
            let image = match element {
                Some(e) => Some(lift.apply(&parse_element(e, g, Tag::HV)?)?),
                None => None,
            };
            let (text, json) = lift_json(&lift, image);
            Ok(Outcome::ok(text, json))
        }
        AutCommand::Laws { samples, seed: s } => {
            let report = verify_group_laws(g, *samples, s.unwrap_or(seed));
            let checks: Vec<Value> = report
                .checks
                .iter()
                .map(|c| json!({"name": c.name, "samples": c.samples, "failures": c.failures, "witness": c.witness}))
                .collect();
            let text = report
                .checks
                .iter()
                .map(|c| format!("{} {}", if c.passed() { "pass" } else { "FAIL" }, c.name))
                .collect::<Vec<_>>()
                .join("; ");
            Ok(Outcome {
                text,
                json: json!({"checks": checks, "passed": report.passed()}),
                passed: report.passed(),
            })
        }
    }
}
