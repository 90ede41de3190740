//! Command-line front end.
//!
//! ```text
//! logode <solve|verify|oracle> --class <linear|bernoulli|exp|second-order>
//!        [--f EXPR] [--g EXPR] [--alpha A] [--beta B] [--b B] [--c C]
//!        --x0 X0 --y0 Y0 [--yp0 YP0] --range LO:HI
//!        [--samples N] [--format csv|json] [--out PATH]
//!        [--abs-tol T] [--rel-tol T] [--check-tol T]
//! ```
//!
//! Exit status: 0 success, 1 usage error, 2 domain or convergence error,
//! 3 verification failure. Diagnostics go to the error stream as a single
//! line; nothing is written to the output stream on error.
//!
//! CSV documents start with `#`-prefixed metadata lines followed by a
//! header row; numbers use 17 significant digits. JSON documents are a
//! single object with the stable keys `class`, `parameters`, `constants`,
//! `validity` and then `samples` (solve, oracle) or `report` (verify).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::expr::Expression;
use crate::quad::QuadratureConfig;
use crate::solvers::{
    ClosedFormSolution, EquationClass, EquationSpec, InitialCondition, Interval, DEFAULT_SCAN_SAMPLES,
};
use crate::verify::{self, OracleSolution, VerificationReport, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "logode", version, about = "Closed-form ODE solutions with numerical verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the closed-form solution over the range.
    Solve(RunArgs),
    /// Run residual, oracle and invariant checks.
    Verify(RunArgs),
    /// Sample the Runge-Kutta reference solution.
    Oracle(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcmd {
    Solve,
    Verify,
    Oracle,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct RunArgs {
    /// linear | bernoulli | exp | second-order
    #[arg(long, value_parser = parse_class)]
    class: EquationClass,
    /// Coefficient f(x)
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// Coefficient g(x)
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long = "b")]
    b: Option<f64>,
    #[arg(long = "c")]
    c: Option<f64>,
    #[arg(long)]
    x0: f64,
    #[arg(long)]
    y0: f64,
    #[arg(long)]
    yp0: Option<f64>,
    /// lo:hi
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    range: Interval,
    #[arg(long, default_value_t = 201)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, default_value_t = QuadratureConfig::default().abs_tol)]
    abs_tol: f64,
    #[arg(long, default_value_t = QuadratureConfig::default().rel_tol)]
    rel_tol: f64,
    /// Tolerance of the oracle comparison in `verify`
    #[arg(long, default_value_t = verify::DEFAULT_COMPARE_TOL)]
    check_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Shift the closed-form solution by this amount (defect injection).
    #[arg(long, default_value_t = 0.0, hide = true)]
    perturb: f64,
}

fn parse_class(s: &str) -> Result<EquationClass, String> {
    EquationClass::from_name(s)
        .ok_or_else(|| format!("unknown class '{s}' (expected linear, bernoulli, exp or second-order)"))
}

fn parse_range(s: &str) -> Result<Interval, String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("range '{s}' must be lo:hi"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad range start '{lo}'"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad range end '{hi}'"))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(format!("range '{s}' must satisfy lo < hi"));
    }
    Ok(Interval::new(lo, hi))
}

/// Validated parameters of one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub subcommand: Subcmd,
    pub spec: EquationSpec,
    /// Coefficient texts as given, for echoing into documents.
    pub f_text: Option<String>,
    pub g_text: Option<String>,
    pub ic: InitialCondition,
    pub range: Interval,
    pub samples: usize,
    pub format: Format,
    pub quad: QuadratureConfig,
    pub check_tol: f64,
    pub out: Option<PathBuf>,
    pub perturb: f64,
}

fn parse_coeff(flag: &str, text: &Option<String>, class: EquationClass) -> Result<Expression, CliError> {
    let text = text
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("--{flag} is required for class {class}")))?;
    Expression::parse(text).map_err(|e| CliError::Usage(format!("--{flag} '{text}': {e}")))
}

fn require(flag: &str, v: Option<f64>, class: EquationClass) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for class {class}")))
}

fn reject(flag: &str, present: bool, class: EquationClass) -> Result<(), CliError> {
    if present {
        return Err(CliError::Usage(format!("--{flag} does not apply to class {class}")));
    }
    Ok(())
}

impl RunConfig {
    fn from_args(subcommand: Subcmd, a: RunArgs) -> Result<Self, CliError> {
        let class = a.class;
        let spec = match class {
            EquationClass::SecondOrderConst => {
                reject("f", a.f.is_some(), class)?;
                reject("g", a.g.is_some(), class)?;
                reject("alpha", a.alpha.is_some(), class)?;
                reject("beta", a.beta.is_some(), class)?;
                require("yp0", a.yp0, class)?;
                EquationSpec::SecondOrder { b: require("b", a.b, class)?, c: require("c", a.c, class)? }
            }
            _ => {
                reject("b", a.b.is_some(), class)?;
                reject("c", a.c.is_some(), class)?;
                reject("yp0", a.yp0.is_some(), class)?;
                let f = parse_coeff("f", &a.f, class)?;
                let g = parse_coeff("g", &a.g, class)?;
                match class {
                    EquationClass::LinearFirstOrder => {
                        reject("alpha", a.alpha.is_some(), class)?;
                        reject("beta", a.beta.is_some(), class)?;
                        EquationSpec::Linear { f, g }
                    }
                    EquationClass::Bernoulli => {
                        reject("beta", a.beta.is_some(), class)?;
                        EquationSpec::Bernoulli { f, g, alpha: require("alpha", a.alpha, class)? }
                    }
                    _ => {
                        reject("alpha", a.alpha.is_some(), class)?;
                        EquationSpec::Exp { f, g, beta: require("beta", a.beta, class)? }
                    }
                }
            }
        };
        spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        if !a.range.contains(a.x0) {
            return Err(CliError::Usage(format!("--x0 {} must lie in --range {}", a.x0, a.range)));
        }
        if a.samples < 2 {
            return Err(CliError::Usage(format!("--samples must be >= 2, got {}", a.samples)));
        }
        if !(a.check_tol > 0.0) {
            return Err(CliError::Usage(format!("--check-tol must be > 0, got {}", a.check_tol)));
        }
        if !a.perturb.is_finite() {
            return Err(CliError::Usage("--perturb must be finite".into()));
        }
        let quad = QuadratureConfig { abs_tol: a.abs_tol, rel_tol: a.rel_tol, ..QuadratureConfig::default() }
            .with_range(a.range.lo, a.range.hi);
        quad.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        let ic = InitialCondition { x0: a.x0, y0: a.y0, yp0: a.yp0 };
        Ok(RunConfig {
            subcommand,
            spec,
            f_text: a.f,
            g_text: a.g,
            ic,
            range: a.range,
            samples: a.samples,
            format: a.format,
            quad,
            check_tol: a.check_tol,
            out: a.out,
            perturb: a.perturb,
        })
    }
}

/// Format with 17 significant digits, `%.17g` style.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        let fixed = format!("{v:.decimals$}");
        trim_fraction(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Serialize)]
struct Parameters<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    f: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    x0: f64,
    y0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    yp0: Option<f64>,
    range: Interval,
}

impl<'a> Parameters<'a> {
    fn of(cfg: &'a RunConfig) -> Self {
        let (alpha, beta, b, c) = match cfg.spec {
            EquationSpec::Bernoulli { alpha, .. } => (Some(alpha), None, None, None),
            EquationSpec::Exp { beta, .. } => (None, Some(beta), None, None),
            EquationSpec::SecondOrder { b, c } => (None, None, Some(b), Some(c)),
            EquationSpec::Linear { .. } => (None, None, None, None),
        };
        Parameters {
            f: cfg.f_text.as_deref(),
            g: cfg.g_text.as_deref(),
            alpha,
            beta,
            b,
            c,
            x0: cfg.ic.x0,
            y0: cfg.ic.y0,
            yp0: cfg.ic.yp0,
            range: cfg.range,
        }
    }
}

#[derive(Serialize)]
struct Sample {
    x: f64,
    y: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    yp: Option<f64>,
}

#[derive(Serialize)]
struct SolveDoc<'a> {
    class: EquationClass,
    parameters: Parameters<'a>,
    constants: BTreeMap<String, f64>,
    validity: Interval,
    provenance: &'a str,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    non_unique: bool,
    samples: Vec<Sample>,
}

#[derive(Serialize)]
struct VerifyDoc<'a> {
    class: EquationClass,
    parameters: Parameters<'a>,
    constants: BTreeMap<String, f64>,
    validity: Interval,
    report: &'a VerificationReport,
}

#[derive(Serialize)]
struct OracleMeta {
    method: &'static str,
    steps: usize,
    rejected: usize,
    truncated: bool,
}

#[derive(Serialize)]
struct OracleDoc<'a> {
    class: EquationClass,
    parameters: Parameters<'a>,
    oracle: OracleMeta,
    samples: Vec<Sample>,
}

fn constants_map(sol: &ClosedFormSolution) -> BTreeMap<String, f64> {
    sol.constants().iter().cloned().collect()
}

fn constants_line(sol: &ClosedFormSolution) -> String {
    sol.constants()
        .iter()
        .map(|(n, v)| format!("{n}={}", fmt_num(*v)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn domain<E: std::fmt::Display>(stage: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Domain(format!("{stage}: {e}"))
}

fn run_solve(cfg: &RunConfig) -> Result<String, CliError> {
    let mut sol = cfg.spec.solve(&cfg.ic, &cfg.quad).map_err(domain("solve"))?;
    if cfg.perturb != 0.0 {
        sol = sol.with_offset(cfg.perturb);
    }
    if cfg.spec.class() != EquationClass::SecondOrderConst {
        sol.scan_validity(cfg.range, DEFAULT_SCAN_SAMPLES).map_err(domain("validity"))?;
    }
    let window = cfg
        .range
        .intersect(&sol.validity())
        .filter(|w| w.lo < w.hi)
        .ok_or_else(|| CliError::Domain(format!("validity {} does not overlap range {}", sol.validity(), cfg.range)))?;
    let samples = window
        .linspace(cfg.samples)
        .into_iter()
        .map(|x| sol.eval(x).map(|y| Sample { x, y, yp: None }))
        .collect::<Result<Vec<_>, _>>()
        .map_err(domain("evaluate"))?;

    Ok(match cfg.format {
        Format::Json => to_json(&SolveDoc {
            class: cfg.spec.class(),
            parameters: Parameters::of(cfg),
            constants: constants_map(&sol),
            validity: window,
            provenance: sol.provenance(),
            non_unique: sol.is_non_unique(),
            samples,
        }),
        Format::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "# class: {}", cfg.spec.class());
            let _ = writeln!(out, "# provenance: {}", sol.provenance());
            let _ = writeln!(out, "# validity: {},{}", fmt_num(window.lo), fmt_num(window.hi));
            let _ = writeln!(out, "# constants: {}", constants_line(&sol));
            if sol.is_non_unique() {
                let _ = writeln!(out, "# non-unique: other solutions share this initial value");
            }
            out.push_str("x,y\n");
            for s in &samples {
                let _ = writeln!(out, "{},{}", fmt_num(s.x), fmt_num(s.y));
            }
            out
        }
    })
}

fn run_verify(cfg: &RunConfig) -> Result<(String, bool), CliError> {
    let vcfg = VerifyConfig {
        quad: cfg.quad,
        compare_tol: cfg.check_tol,
        perturb: cfg.perturb,
        ..VerifyConfig::default()
    };
    let (sol, report) =
        verify::full_verify_with_solution(&cfg.spec, &cfg.ic, cfg.range, &vcfg).map_err(domain("verify"))?;
    let doc = match cfg.format {
        Format::Json => to_json(&VerifyDoc {
            class: cfg.spec.class(),
            parameters: Parameters::of(cfg),
            constants: constants_map(&sol),
            validity: report.validity,
            report: &report,
        }),
        Format::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "# class: {}", cfg.spec.class());
            let _ = writeln!(out, "# validity: {},{}", fmt_num(report.validity.lo), fmt_num(report.validity.hi));
            let _ = writeln!(out, "# constants: {}", constants_line(&sol));
            for note in &report.notes {
                let _ = writeln!(out, "# note: {note}");
            }
            let _ = writeln!(out, "# pass: {}", report.pass);
            out.push_str("name,max_deviation,tolerance,pass,grid_size\n");
            for c in &report.checks {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    c.name,
                    fmt_num(c.max_deviation),
                    fmt_num(c.tolerance),
                    c.pass,
                    c.grid_size
                );
            }
            out
        }
    };
    Ok((doc, report.pass))
}

fn run_oracle(cfg: &RunConfig) -> Result<String, CliError> {
    let grid = cfg.range.linspace(cfg.samples);
    let oracle: OracleSolution =
        verify::rk_reference_on(&cfg.spec, &cfg.ic, &grid, verify::DEFAULT_ORACLE_TOL).map_err(domain("oracle"))?;
    let samples: Vec<Sample> = oracle
        .grid
        .iter()
        .enumerate()
        .map(|(i, &x)| Sample { x, y: oracle.values[i], yp: oracle.slopes.as_ref().map(|s| s[i]) })
        .collect();
    Ok(match cfg.format {
        Format::Json => to_json(&OracleDoc {
            class: cfg.spec.class(),
            parameters: Parameters::of(cfg),
            oracle: OracleMeta {
                method: oracle.method,
                steps: oracle.steps,
                rejected: oracle.rejected,
                truncated: oracle.truncated,
            },
            samples,
        }),
        Format::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "# class: {}", cfg.spec.class());
            let _ = writeln!(out, "# method: {}", oracle.method);
            let _ = writeln!(out, "# steps: {} rejected: {}", oracle.steps, oracle.rejected);
            let _ = writeln!(out, "# truncated: {}", oracle.truncated);
            let second = oracle.slopes.is_some();
            out.push_str(if second { "x,y,yp\n" } else { "x,y\n" });
            for s in &samples {
                match s.yp {
                    Some(yp) => {
                        let _ = writeln!(out, "{},{},{}", fmt_num(s.x), fmt_num(s.y), fmt_num(yp));
                    }
                    None => {
                        let _ = writeln!(out, "{},{}", fmt_num(s.x), fmt_num(s.y));
                    }
                }
            }
            out
        }
    })
}

/// Parse `argv` (program name first) into a validated configuration.
/// `Ok(None)` means help or version text was requested; it is returned in
/// the error slot's place as printable text.
pub fn parse_args<I, T>(argv: I) -> Result<Result<RunConfig, String>, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Err(e.to_string())),
                _ => {
                    let text = e.to_string();
                    let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("usage error");
                    Err(CliError::Usage(line.trim().to_string()))
                }
            };
        }
    };
    let (sub, args) = match cli.command {
        Command::Solve(a) => (Subcmd::Solve, a),
        Command::Verify(a) => (Subcmd::Verify, a),
        Command::Oracle(a) => (Subcmd::Oracle, a),
    };
    RunConfig::from_args(sub, args).map(Ok)
}

/// Execute a validated configuration, returning the document and whether
/// it represents a verification failure.
pub fn execute(cfg: &RunConfig) -> Result<(String, bool), CliError> {
    match cfg.subcommand {
        Subcmd::Solve => run_solve(cfg).map(|d| (d, true)),
        Subcmd::Verify => run_verify(cfg),
        Subcmd::Oracle => run_oracle(cfg).map(|d| (d, true)),
    }
}

/// Run one invocation. The document goes to `stdout` (or `--out`), a
/// single diagnostic line to `stderr` on failure. Returns the exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_args(argv) {
        Ok(Ok(cfg)) => cfg,
        Ok(Err(text)) => {
            let _ = stdout.write_all(text.as_bytes());
            return EXIT_OK;
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let (doc, pass) = match execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, doc.as_bytes()),
        None => stdout.write_all(doc.as_bytes()).and_then(|_| stdout.flush()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: writing output: {e}");
        return EXIT_DOMAIN;
    }
    if !pass {
        let _ = writeln!(stderr, "error: verification failed");
        return EXIT_VERIFY_FAILED;
    }
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("logode").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(-3.25), "-3.25");
        assert_eq!(fmt_num((-0.5f64).exp()), "0.60653065971263342");
        assert_eq!(fmt_num(1e-7), "9.9999999999999995e-08");
        assert_eq!(fmt_num(1e20), "1e+20");
        assert_eq!(fmt_num(123456.0), "123456");
        for v in [std::f64::consts::PI, 1e-300, -2.5e17, 6.02214076e23, 0.1 + 0.2] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("-1:2.5").unwrap(), Interval::new(-1.0, 2.5));
        assert!(parse_range("1:1").is_err());
        assert!(parse_range("2:1").is_err());
        assert!(parse_range("0-1").is_err());
        assert!(parse_range("a:1").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        let cases: &[&[&str]] = &[
            &["solve", "--class", "linear", "--f", "1", "--x0", "0", "--y0", "1", "--range", "0:1"],
            &["solve", "--class", "linear", "--f", "2*+x", "--g", "0", "--x0", "0", "--y0", "1", "--range", "0:1"],
            &["solve", "--class", "nope", "--x0", "0", "--y0", "1", "--range", "0:1"],
            &["solve", "--class", "linear", "--f", "1", "--g", "0", "--x0", "5", "--y0", "1", "--range", "0:1"],
            &["solve", "--class", "linear", "--f", "1", "--g", "0", "--x0", "0", "--y0", "1", "--range", "0:1", "--bogus"],
            &["solve", "--class", "bernoulli", "--f", "1", "--g", "1", "--alpha", "1", "--x0", "0", "--y0", "1", "--range", "0:1"],
            &["solve", "--class", "second-order", "--b", "0", "--c", "1", "--x0", "0", "--y0", "1", "--range", "0:1"],
            &["solve", "--class", "linear", "--f", "1", "--g", "0", "--alpha", "2", "--x0", "0", "--y0", "1", "--range", "0:1"],
            &["solve", "--class", "linear", "--f", "1", "--g", "0", "--x0", "0", "--y0", "1", "--range", "0:1", "--samples", "1"],
        ];
        for args in cases {
            let (code, out, err) = run_str(args);
            assert_eq!(code, EXIT_USAGE, "{args:?}: {err}");
            assert!(out.is_empty());
            assert_eq!(err.lines().count(), 1, "{err}");
        }
        let (_, _, err) = run_str(cases[1]);
        assert!(err.contains("offset 2"), "{err}");
    }

    #[test]
    fn domain_errors_exit_two() {
        // y0 < 0 with non-integer 1 - alpha has no real branch
        let (code, out, err) = run_str(&[
            "solve", "--class", "bernoulli", "--f", "1", "--g", "1", "--alpha", "0.5", "--x0", "0", "--y0", "-1",
            "--range", "0:1",
        ]);
        assert_eq!(code, EXIT_DOMAIN, "{err}");
        assert!(out.is_empty());
        assert_eq!(err.lines().count(), 1);
        // f undefined everywhere on the range
        let (code, _, _) = run_str(&[
            "solve", "--class", "linear", "--f", "log(x-2)", "--g", "0", "--x0", "0", "--y0", "1", "--range", "0:1",
        ]);
        assert_eq!(code, EXIT_DOMAIN);
    }

    #[test]
    fn negative_values_are_accepted() {
        let (code, out, err) = run_str(&[
            "solve", "--class", "second-order", "--b", "-3", "--c", "2", "--x0", "0", "--y0", "1", "--yp0", "1",
            "--range", "-1:1", "--samples", "3",
        ]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("\n0,1\n"), "{out}");
        let (code, _, err) = run_str(&[
            "solve", "--class", "linear", "--f", "-x", "--g", "-1", "--x0", "0", "--y0", "-1", "--range", "-1:1",
        ]);
        assert_eq!(code, 0, "{err}");
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("solve"));
    }
}
