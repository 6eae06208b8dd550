//! Subcommand definitions and drivers.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cohomkit::char_classes::{
    dual_law_residual, group_class, real_vanishing_check, sum_law_residual, tensor_law_residual,
    ve_compatibility_check, GroupRep, RepKind,
};
use cohomkit::group_cochains::max_residual;
use cohomkit::lie_algebra::{basic_subcomplex, ce_complex, AssemblyOptions, LieAlgebra, Subalgebra};
use cohomkit::matrix_group::{diag, polar_trace, tuple_from_json, CMatrix};
use cohomkit::sampling::rng;
use cohomkit::vanest::{
    builtin_cochain, generator, BasicForm, GeneratorKind, GeneratorName, QuadratureSpec,
};
use cohomkit::{Error, Exec, Result};
use num_complex::Complex64;

use crate::report::{timed, CheckRecord, Outcome, Report};
use crate::suites::{self, SuiteConfig};

#[derive(Debug, Parser)]
#[command(name = "cohomkit", version, about = "Relative Lie algebra and group cohomology checks")]
pub struct Cli {
    /// Emit the structured JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Record per-check wall time (makes output run-dependent).
    #[arg(long, global = true)]
    pub timings: bool,
    /// Run every data-parallel loop on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[arg(long, global = true, default_value_t = cohomkit::sampling::DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Betti numbers of a Lie algebra, optionally relative to a subalgebra.
    Cohomology(CohomologyArgs),
    /// Run a named invariant battery.
    Verify(VerifyArgs),
    /// Evaluate a cochain on a tuple of matrices.
    Eval(EvalArgs),
    /// Characteristic class of a representation and its laws.
    Class(ClassArgs),
}

#[derive(Debug, Args)]
pub struct CohomologyArgs {
    /// Lie algebra JSON file.
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    pub algebra: Option<PathBuf>,
    /// gl1C, gl2C, su2, heisenberg, abelian:N, …
    #[arg(long)]
    pub builtin: Option<String>,
    /// Subalgebra file, or one of `uN`, `zero`, `all`.
    #[arg(long)]
    pub relative: Option<String>,
    #[arg(long)]
    pub max_degree: Option<usize>,
    /// Largest exterior power that may be materialized.
    #[arg(long, default_value_t = cohomkit::lie_algebra::DEFAULT_MAX_FIBER)]
    pub max_fiber: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    Exterior,
    Ce,
    Perturbation,
    Groupchains,
    Vanest,
    Classes,
    All,
}

impl SuiteName {
    fn as_str(self) -> &'static str {
        match self {
            SuiteName::Exterior => "exterior",
            SuiteName::Ce => "ce",
            SuiteName::Perturbation => "perturbation",
            SuiteName::Groupchains => "groupchains",
            SuiteName::Vanest => "vanest",
            SuiteName::Classes => "classes",
            SuiteName::All => "all",
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: SuiteName,
    #[arg(long, default_value_t = cohomkit::sampling::DEFAULT_SAMPLES)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// `v1@n`, `v3@n`, `u1@n`, `u3@n`, `logabsdet@n`, `const:c@n`.
    #[arg(long)]
    pub cochain: String,
    /// Tuple file, inline JSON, or `diag(…);diag(…)`.
    #[arg(long, default_value = "")]
    pub tuple: String,
    /// Gauss–Legendre order per cube axis.
    #[arg(long, default_value_t = 16)]
    pub quad: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LawCheck {
    Sum,
    Tensor,
    Dual,
    Ve,
    Real,
}

#[derive(Debug, Args)]
pub struct ClassArgs {
    /// Representation file or inline JSON.
    #[arg(long)]
    pub rep: String,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long, value_enum)]
    pub check: Option<LawCheck>,
    /// Sample tuples; defaults to 20 at q = 1 and 3 above.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 16)]
    pub quad: usize,
}

impl Cli {
    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

/// Runs the parsed command; failures land in the report's error record.
///
/// `--json` is left out of the command echo so both renderings carry the
/// same content.
pub fn execute(cli: &Cli, argv: Vec<String>) -> Report {
    let echo = argv.into_iter().filter(|a| a != "--json").collect();
    let mut report = Report::new(echo, cli.seed);
    let res = match &cli.command {
        Command::Cohomology(a) => cohomology(cli, a, &mut report),
        Command::Verify(a) => verify(cli, a, &mut report),
        Command::Eval(a) => eval(cli, a, &mut report),
        Command::Class(a) => class(cli, a, &mut report),
    };
    if let Err(e) = res {
        report.fail_with(&e);
    }
    report.finish();
    report
}

fn read_input(arg: &str) -> Result<String> {
    std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("cannot read {arg:?}: {e}")))
}

fn alternating_sum(v: &[usize]) -> i64 {
    v.iter()
        .enumerate()
        .map(|(p, &d)| if p % 2 == 0 { d as i64 } else { -(d as i64) })
        .sum()
}

fn cohomology(cli: &Cli, a: &CohomologyArgs, report: &mut Report) -> Result<()> {
    let g = match (&a.algebra, &a.builtin) {
        (Some(path), _) => LieAlgebra::from_json(&read_input(&path.to_string_lossy())?)?,
        (None, Some(name)) => LieAlgebra::builtin(name)?,
        (None, None) => return Err(Error::Parse("one of --algebra, --builtin is required".into())),
    };
    let opts = AssemblyOptions {
        max_degree: a.max_degree,
        max_fiber: a.max_fiber,
        exec: cli.exec(),
    };
    let k = match &a.relative {
        None => None,
        Some(r) if Path::new(r).is_file() => Some(Subalgebra::from_json(&g, &read_input(r)?)?),
        Some(r) => Some(Subalgebra::builtin(&g, r)?),
    };
    report.set("dim", g.dim());

    let full = ce_complex(&g, opts)?;
    let betti = full.betti(opts.exec);
    let dims = full.dims()[..betti.len()].to_vec();
    if a.max_degree.is_none_or(|d| d >= g.dim()) {
        let euler = alternating_sum(&dims) == alternating_sum(&betti);
        report.push(CheckRecord::from_result("cohomology.euler_characteristic", &Ok(Outcome::Exact(euler)), None));
    }
    report.set("betti", &betti);
    report.set("dims", &dims);

    if let Some(k) = k {
        let basic = basic_subcomplex(&g, &k, opts)?;
        let rel = basic.complex.betti(opts.exec);
        let rdims = basic.complex.dims().to_vec();
        let euler = alternating_sum(&rdims) == alternating_sum(&rel);
        report.push(CheckRecord::from_result(
            "cohomology.relative_euler_characteristic",
            &Ok(Outcome::Exact(euler)),
            None,
        ));
        report.set("relative_betti", &rel);
        report.set("relative_dims", &rdims);
        report.set("relative_zero_differential", basic.complex.has_zero_differential());
        report.set("subalgebra_dim", k.dim());
    }
    Ok(())
}

fn verify(cli: &Cli, a: &VerifyArgs, report: &mut Report) -> Result<()> {
    let checks = suites::suite(a.suite.as_str())?;
    let cfg = SuiteConfig {
        seed: cli.seed,
        samples: a.samples,
        timings: cli.timings,
        exec: cli.exec(),
    };
    report.set("suite", a.suite.as_str());
    report.set("samples", a.samples);
    for rec in suites::run(&checks, &cfg) {
        report.push(rec);
    }
    Ok(())
}

/// One scalar of an inline matrix: a real number, `e`, `pi`, or an
/// imaginary part written with a trailing `i`.
fn parse_entry(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let real = |t: &str| -> Result<f64> {
        let (neg, body) = match t.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let v = match body {
            "e" => std::f64::consts::E,
            "pi" => std::f64::consts::PI,
            "" => 1.0,
            other => other
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad matrix entry {s:?}")))?,
        };
        Ok(if neg { -v } else { v })
    };
    if s.is_empty() {
        return Err(Error::Parse("empty matrix entry".into()));
    }
    match s.strip_suffix('i') {
        Some(im) => Ok(Complex64::new(0.0, real(im)?)),
        None => Ok(Complex64::new(real(s)?, 0.0)),
    }
}

/// Inline tuples: `diag(a,b,…)` and `eye(n)` separated by `;`.
fn parse_inline(text: &str) -> Result<Vec<CMatrix>> {
    text.split(';')
        .map(|item| {
            let item = item.trim();
            let (head, rest) = item
                .split_once('(')
                .ok_or_else(|| Error::Parse(format!("expected diag(…) or eye(n), got {item:?}")))?;
            let body = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unclosed parenthesis in {item:?}")))?;
            match head.trim() {
                "diag" => {
                    let entries = body.split(',').map(parse_entry).collect::<Result<Vec<_>>>()?;
                    Ok(diag(&entries))
                }
                "eye" => {
                    let n: usize = body
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad size in {item:?}")))?;
                    if n == 0 {
                        return Err(Error::Parse("eye(0)".into()));
                    }
                    Ok(CMatrix::identity(n, n))
                }
                other => Err(Error::Parse(format!("unknown matrix constructor {other:?}"))),
            }
        })
        .collect()
}

pub fn parse_tuple(arg: &str) -> Result<Vec<CMatrix>> {
    let arg = arg.trim();
    if arg.is_empty() {
        return Ok(Vec::new());
    }
    if arg.starts_with('[') {
        return tuple_from_json(arg);
    }
    if Path::new(arg).is_file() {
        return tuple_from_json(&read_input(arg)?);
    }
    parse_inline(arg)
}

fn eval(_cli: &Cli, a: &EvalArgs, report: &mut Report) -> Result<()> {
    let spec = QuadratureSpec::default().with_order(a.quad);
    spec.validate()?;
    let tuple = parse_tuple(&a.tuple)?;
    report.set("cochain", &a.cochain);
    report.set("quad", a.quad);

    // Relative Lie algebra generators go through the integration map.
    if let Ok(GeneratorName::Algebra { kind, q, n }) = a.cochain.parse::<GeneratorName>() {
        let basic = BasicForm::from_generator(&generator(n, q, kind)?)?;
        if tuple.len() != basic.degree() {
            return Err(Error::Arity { expected: basic.degree(), got: tuple.len() });
        }
        let value = basic.integrate(&tuple, &spec)?;
        report.set("degree", basic.degree());
        report.set("value", value);
        if kind == GeneratorKind::U && q == 1 {
            push_trace_cross_check(report, &tuple, value)?;
        }
        return Ok(());
    }

    let f = builtin_cochain(&a.cochain, &spec)?;
    let value = f.eval(&tuple)?;
    report.set("degree", f.degree());
    report.set("value", value);
    if matches!(a.cochain.parse::<GeneratorName>(), Ok(GeneratorName::Group { q: 1, .. })) {
        let basic = BasicForm::from_generator(&generator(f.n(), 1, GeneratorKind::U)?)?;
        let quad = basic.integrate(&tuple, &spec)?;
        report.set("quadrature_value", quad);
        push_trace_cross_check(report, &tuple, quad)?;
    }
    Ok(())
}

/// Degree 1: the integral equals `tr X` for the polar part `A = U e^X`.
fn push_trace_cross_check(report: &mut Report, tuple: &[CMatrix], value: f64) -> Result<()> {
    let tr_x = polar_trace(&tuple[0])?;
    report.set("tr_x", tr_x);
    report.push(CheckRecord::from_result(
        "eval.v1_trace_cross_check",
        &Ok(Outcome::within((value - tr_x).abs(), 1e-8)),
        None,
    ));
    Ok(())
}

fn law_tolerance(check: LawCheck, q: usize) -> f64 {
    match (check, q) {
        (LawCheck::Ve, 1) => 1e-5,
        (_, 1) => 1e-6,
        _ => 1e-3,
    }
}

fn class(cli: &Cli, a: &ClassArgs, report: &mut Report) -> Result<()> {
    let text = if a.rep.trim_start().starts_with('{') {
        a.rep.clone()
    } else {
        read_input(&a.rep)?
    };
    let rep = GroupRep::from_json(&text)?;
    if a.q == 0 {
        return Err(Error::Parse("--q must be at least 1".into()));
    }
    let spec = QuadratureSpec::default().with_order(a.quad).with_exec(cli.exec());
    spec.validate()?;
    let samples = a.samples.unwrap_or(if a.q == 1 { 20 } else { 3 });
    let seed = cli.seed;
    report.set("rep", rep.to_string());
    report.set("q", a.q);
    report.set("samples", samples);

    let (hom, ms) = timed(cli.timings, || rep.check(seed, samples.max(10)).map(|_| Outcome::Exact(true)));
    let hom = match hom {
        Err(Error::InvariantViolation(_)) => Ok(Outcome::Exact(false)),
        other => other,
    };
    report.push(CheckRecord::from_result("class.homomorphism", &hom, ms));

    let cls = group_class(&rep, a.q, &spec)?;
    let mut r = rng(seed);
    let tuples: Vec<Vec<CMatrix>> = (0..samples)
        .map(|_| (0..2 * a.q - 1).map(|_| rep.source().sample(&mut r, rep.source_size())).collect())
        .collect();
    let values = tuples.iter().map(|t| cls.eval(t)).collect::<Result<Vec<_>>>()?;
    report.set("values", &values);

    if let Some(law) = a.check {
        let (res, ms) = timed(cli.timings, || run_law(law, &rep, a.q, &spec, seed, samples));
        let name = format!("class.{}", format!("{law:?}").to_lowercase());
        report.push(CheckRecord::from_result(&name, &res, ms));
    }
    Ok(())
}

fn run_law(law: LawCheck, rep: &GroupRep, q: usize, spec: &QuadratureSpec, seed: u64, samples: usize) -> Result<Outcome> {
    let residual = match law {
        LawCheck::Sum => match rep.kind() {
            // v(⊕ V_i) against Σ v(V_i).
            RepKind::BlockDiag(parts) => {
                let whole = group_class(rep, q, spec)?;
                let classes = parts.iter().map(|p| group_class(p, q, spec)).collect::<Result<Vec<_>>>()?;
                let mut r = rng(seed);
                let tuples: Vec<Vec<CMatrix>> = (0..samples)
                    .map(|_| (0..2 * q - 1).map(|_| rep.source().sample(&mut r, rep.source_size())).collect())
                    .collect();
                max_residual(spec.exec, &tuples, |t| {
                    let mut acc = whole.eval(t)?;
                    for c in &classes {
                        acc -= c.eval(t)?;
                    }
                    Ok(acc.abs())
                })?
            }
            _ => sum_law_residual(rep, rep, q, spec, seed, samples)?,
        },
        LawCheck::Tensor => match rep.kind() {
            RepKind::Kron(v, w) => tensor_law_residual(v, w, q, spec, seed, samples)?,
            _ => tensor_law_residual(rep, rep, q, spec, seed, samples)?,
        },
        LawCheck::Dual => dual_law_residual(rep, q, spec, seed, samples)?,
        LawCheck::Ve => ve_compatibility_check(rep, q, spec, seed, samples)?,
        LawCheck::Real => real_vanishing_check(rep, q, spec, seed, samples)?,
    };
    Ok(Outcome::within(residual, law_tolerance(law, q)))
}

/// Caps the global rayon pool from `COHOMKIT_THREADS`.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("COHOMKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Parse(format!("COHOMKIT_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Precondition(e.to_string()))
}
